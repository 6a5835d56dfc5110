#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "twostation/simulator.hpp"
#include "twostation/value_model.hpp"

namespace twostation {

struct EstimatorOptions {
  int n_starts = 8;          // multi-start count
  int max_evals = 20000;     // likelihood evaluations per start
  double tolerance = 1e-8;   // simplex value-spread threshold
  std::uint64_t seed = 1;    // dispersion of the extra starts

  void validate() const;
};

struct EstimationResult {
  ModelParams params_hat;
  double log_lik = 0.0;
  double c_tilde = 0.0;  // data-implied lower bound on the switching cost
  int n_restarts = 0;
  bool converged = false;
  long long n_evals = 0;
  std::string message;
};

// Largest workload gap ever accepted by a customer joining the
// higher-workload station, computed from the pre-decision workloads
// max(0, v_{k-1} - a_k). Any switching cost below this value makes the data
// impossible; 0 when no join ever paid a positive gap.
double lower_bound_c(std::span<const EffectiveArrival> observations);

// Maximum-likelihood fit of (lambda1, lambda2, theta, c) by multi-start
// Nelder-Mead over the reparameterization lambda = e^eta, theta = e^eta,
// c = c_tilde + e^eta, which keeps every iterate strictly inside the region
// of positive likelihood. Sequences shorter than 20 yield a not-converged
// result rather than a fit.
EstimationResult estimate(std::span<const EffectiveArrival> observations,
                          const EstimatorOptions& options = {});

}  // namespace twostation

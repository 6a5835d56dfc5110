#pragma once

#include <span>
#include <vector>

#include "twostation/simulator.hpp"
#include "twostation/value_model.hpp"

namespace twostation {

// Workload-difference regime of one likelihood factor, relative to the
// joined station: within the switching cost of the other station, more than
// the cost above it, or more than the cost below it.
enum class CaseKind { WithinC, JoinedHigher, JoinedLower };

// Boundaries |v_joined - v_other| == c belong to WithinC.
CaseKind classify_case(double v_joined, double v_other, double switch_cost);

// Log of the conditional density of (A_k = a, I_k = station) given the
// post-jump workloads (v1, v2) left by the previous join. Joins are a
// time-inhomogeneous Poisson thinning of the potential streams, so each
// factor is (rate of joins into `station` at a) * exp(-integrated total join
// rate over [0, a]). Returns -infinity on the impossible region of the
// JoinedHigher case (a join at a station still more than c above the other).
double log_density(double a, int station, double v1, double v2,
                   double lambda1, double lambda2,
                   const ValueDistribution& values, double switch_cost);

double log_density(double a, int station, double v1, double v2,
                   const ModelParams& params);

struct LogLikelihoodReport {
  double total = 0.0;
  std::vector<double> per_factor;
  int n_zero_density = 0;  // factors at -infinity
};

// Sum of log_density over the whole observation sequence, conditioning each
// factor on the reconstructed post-jump workloads (empty initial system).
// Jump sizes enter only through that reconstruction; their own density is
// not part of the likelihood.
LogLikelihoodReport log_likelihood(std::span<const EffectiveArrival> observations,
                                   const ModelParams& params);

// Validation oracle: integrates the density over a in (0, a_max], summed
// over both stations. Approaches 1 as a_max grows. Throws QuadratureError
// with the achieved error estimate if the quadrature cannot meet tolerance.
double density_total_mass(double v1, double v2, const ModelParams& params,
                          double a_max);

}  // namespace twostation

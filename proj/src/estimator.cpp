#include "twostation/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "twostation/likelihood.hpp"
#include "twostation/nelder_mead.hpp"
#include "twostation/rng.hpp"

namespace twostation {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMinObservations = 20;

// Conditioning tuple of one likelihood factor; fixed by the data, so it is
// computed once per fit instead of per likelihood evaluation.
struct Factor {
  double a;
  int station;
  double v1, v2;
};

std::vector<Factor> make_factors(std::span<const EffectiveArrival> obs) {
  const std::vector<WorkloadState> states = reconstruct_states(obs);
  std::vector<Factor> factors;
  factors.reserve(obs.size());
  double v1 = 0.0, v2 = 0.0;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    factors.push_back({obs[k].a, obs[k].station, v1, v2});
    v1 = states[k].v1;
    v2 = states[k].v2;
  }
  return factors;
}

double total_log_lik(const std::vector<Factor>& factors,
                     const ModelParams& p) {
  const ParetoValue values(p.theta);
  double total = 0.0;
  for (const Factor& f : factors) {
    const double lf = log_density(f.a, f.station, f.v1, f.v2, p.lambda1,
                                  p.lambda2, values, p.switch_cost);
    if (lf == -kInf) return -kInf;
    total += lf;
  }
  return total;
}

ModelParams from_eta(const std::vector<double>& eta, double c_tilde) {
  return {std::exp(eta[0]), std::exp(eta[1]), std::exp(eta[2]),
          c_tilde + std::exp(eta[3])};
}

}  // namespace

void EstimatorOptions::validate() const {
  if (n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");
  if (max_evals < 8) throw std::invalid_argument("max_evals must be >= 8");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
}

double lower_bound_c(std::span<const EffectiveArrival> observations) {
  if (observations.empty())
    throw std::domain_error("lower_bound_c: empty observation sequence");

  double best = 0.0;
  double v1 = 0.0, v2 = 0.0;
  for (const EffectiveArrival& obs : observations) {
    if (!(obs.a > 0.0) || !(obs.x > 0.0) ||
        (obs.station != 1 && obs.station != 2))
      throw std::domain_error("lower_bound_c: malformed observation");
    const double w1 = std::max(0.0, v1 - obs.a);
    const double w2 = std::max(0.0, v2 - obs.a);
    const double wi = obs.station == 1 ? w1 : w2;
    const double wo = obs.station == 1 ? w2 : w1;
    if (wi > wo) best = std::max(best, wi - wo);
    v1 = w1 + (obs.station == 1 ? obs.x : 0.0);
    v2 = w2 + (obs.station == 2 ? obs.x : 0.0);
  }
  return best;
}

EstimationResult estimate(std::span<const EffectiveArrival> observations,
                          const EstimatorOptions& options) {
  options.validate();

  EstimationResult result;
  result.c_tilde = lower_bound_c(observations);

  // Method-of-moments seeds: the join rate K/T underestimates the potential
  // rate by the joining fraction, so scale it up by a nominal 1/0.8; split
  // by the joined-station shares (smoothed so neither rate seeds at zero).
  const double K = static_cast<double>(observations.size());
  double T = 0.0, k1 = 0.0;
  for (const EffectiveArrival& obs : observations) {
    T += obs.a;
    if (obs.station == 1) k1 += 1.0;
  }
  const double lambda_total = (K / T) / 0.8;
  const double share1 = (k1 + 0.5) / (K + 1.0);
  const double c_offset = 0.05 * (1.0 + result.c_tilde);

  const std::vector<double> eta_seed = {
      std::log(lambda_total * share1), std::log(lambda_total * (1.0 - share1)),
      0.0, std::log(c_offset)};

  result.params_hat = from_eta(eta_seed, result.c_tilde);

  if (observations.size() < kMinObservations) {
    result.message = "too few observations for a fit (need >= " +
                     std::to_string(kMinObservations) + ", got " +
                     std::to_string(observations.size()) + ")";
    result.log_lik = -kInf;
    return result;
  }

  const std::vector<Factor> factors = make_factors(observations);
  const double c_tilde = result.c_tilde;
  const auto objective = [&](const std::vector<double>& eta) {
    const double ll = total_log_lik(factors, from_eta(eta, c_tilde));
    return ll == -kInf ? kInf : -ll;
  };

  NelderMeadOptions nm;
  nm.max_evals = options.max_evals;
  nm.tolerance = options.tolerance;
  nm.initial_step = 0.3;

  double best_f = kInf;
  bool best_converged = false;
  for (int start = 0; start < options.n_starts; ++start) {
    std::vector<double> eta = eta_seed;
    if (start == 1) {
      eta[3] = -20.0;  // probe the boundary solution c ~ c_tilde
    } else if (start >= 2) {
      Rng rng(Rng::substream_seed(options.seed, static_cast<std::uint64_t>(start)));
      for (int i = 0; i < 3; ++i) eta[i] += 1.5 * (rng.next_unit() - 0.5);
      eta[3] += 4.0 * (rng.next_unit() - 0.5);
    }
    const NelderMeadResult run = nelder_mead_minimize(objective, eta, nm);
    result.n_evals += run.n_evals;
    ++result.n_restarts;
    if (run.fx < best_f) {
      best_f = run.fx;
      best_converged = run.converged;
      result.params_hat = from_eta(run.x, c_tilde);
    }
  }

  if (!std::isfinite(best_f)) {
    result.log_lik = -kInf;
    result.converged = false;
    result.message = "likelihood was degenerate at every start";
    return result;
  }

  result.log_lik = -best_f;
  result.converged = best_converged;
  result.message = best_converged ? "simplex spread below tolerance"
                                  : "evaluation budget exhausted";
  return result;
}

}  // namespace twostation

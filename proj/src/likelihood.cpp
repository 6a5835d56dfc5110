#include "twostation/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twostation/quadrature.hpp"

namespace twostation {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void check_inputs(double a, int station, double v1, double v2, double lambda1,
                  double lambda2, double switch_cost) {
  if (!(a > 0.0)) throw std::domain_error("log_density: a must be > 0");
  if (station != 1 && station != 2)
    throw std::domain_error("log_density: station must be 1 or 2");
  if (!(v1 >= 0.0 && v2 >= 0.0))
    throw std::domain_error("log_density: workloads must be >= 0");
  if (!(lambda1 >= 0.0 && lambda2 >= 0.0 && lambda1 + lambda2 > 0.0))
    throw std::domain_error("log_density: invalid arrival rates");
  if (!(switch_cost >= 0.0))
    throw std::domain_error("log_density: switch_cost must be >= 0");
}

}  // namespace

CaseKind classify_case(double v_joined, double v_other, double switch_cost) {
  // Trichotomy on one computed gap: comparing v_joined against
  // v_other + switch_cost instead could disagree with |gap| <= c by one
  // rounding step right at the boundary.
  const double gap = v_joined - v_other;
  if (std::abs(gap) <= switch_cost) return CaseKind::WithinC;
  return gap > switch_cost ? CaseKind::JoinedHigher : CaseKind::JoinedLower;
}

double log_density(double a, int station, double v1, double v2,
                   double lambda1, double lambda2,
                   const ValueDistribution& values, double switch_cost) {
  check_inputs(a, station, v1, v2, lambda1, lambda2, switch_cost);

  const double vi = station == 1 ? v1 : v2;   // joined station
  const double vo = station == 1 ? v2 : v1;   // other station
  const double li = station == 1 ? lambda1 : lambda2;
  const double lo = station == 1 ? lambda2 : lambda1;
  const double c = switch_cost;

  switch (classify_case(vi, vo, c)) {
    case CaseKind::WithinC:
      // The gap stays within c for the whole interval: everyone joins
      // locally, both streams thinned by their own decayed workload.
      return std::log(li) + values.log_tail(vi - a) -
             li * values.tail_integral(vi, a) -
             lo * values.tail_integral(vo, a);

    case CaseKind::JoinedHigher: {
      // Until the joined station drains to within c of the other, nobody
      // joins it; its own arrivals switch away at cost (v_other - u)^+ + c.
      const double split = vi - c;  // > 0 here
      if (a < split) return -kInf;
      const double L = std::clamp(split, 0.0, a);
      return std::log(li) + values.log_tail(vi - a) -
             lo * values.tail_integral(vo, a) -
             li * (values.shifted_tail_integral(vo, L, c) +
                   (values.tail_integral(vi, a) - values.tail_integral(vi, L)));
    }

    case CaseKind::JoinedLower: {
      const double split = vo - c;  // > 0 here
      if (a < split) {
        // Joins at the cheaper station come from both streams: locals plus
        // switchers paying c on top of the decayed local workload.
        const double local = std::log(li) + values.log_tail(vi - a);
        const double switched =
            std::log(lo) + values.log_tail(std::max(vi - a, 0.0) + c);
        return log_add(local, switched) - li * values.tail_integral(vi, a) -
               lo * values.shifted_tail_integral(vi, a, c);
      }
      const double L = std::clamp(split, 0.0, a);
      return std::log(li) + values.log_tail(vi - a) -
             li * values.tail_integral(vi, a) -
             lo * (values.shifted_tail_integral(vi, L, c) +
                   (values.tail_integral(vo, a) - values.tail_integral(vo, L)));
    }
  }
  return -kInf;  // unreachable
}

double log_density(double a, int station, double v1, double v2,
                   const ModelParams& params) {
  params.validate();
  const ParetoValue values(params.theta);
  return log_density(a, station, v1, v2, params.lambda1, params.lambda2,
                     values, params.switch_cost);
}

LogLikelihoodReport log_likelihood(
    std::span<const EffectiveArrival> observations, const ModelParams& params) {
  params.validate();
  const ParetoValue values(params.theta);
  const std::vector<WorkloadState> states = reconstruct_states(observations);

  LogLikelihoodReport report;
  report.per_factor.reserve(observations.size());
  double v1 = 0.0, v2 = 0.0;  // post-jump state before the k-th factor
  for (std::size_t k = 0; k < observations.size(); ++k) {
    const double lf =
        log_density(observations[k].a, observations[k].station, v1, v2,
                    params.lambda1, params.lambda2, values, params.switch_cost);
    report.per_factor.push_back(lf);
    report.total += lf;
    if (lf == -kInf) ++report.n_zero_density;
    v1 = states[k].v1;
    v2 = states[k].v2;
  }
  return report;
}

double density_total_mass(double v1, double v2, const ModelParams& params,
                          double a_max) {
  params.validate();
  if (!(v1 >= 0.0 && v2 >= 0.0))
    throw std::domain_error("density_total_mass: workloads must be >= 0");
  if (!(a_max > 0.0))
    throw std::domain_error("density_total_mass: a_max must be > 0");

  const ParetoValue values(params.theta);
  const auto density = [&](double a) {
    a = std::max(a, 1e-300);  // quadrature endpoint; density has an a->0 limit
    double f = 0.0;
    for (int station : {1, 2}) {
      const double lf = log_density(a, station, v1, v2, params.lambda1,
                                    params.lambda2, values, params.switch_cost);
      if (lf != -kInf) f += std::exp(lf);
    }
    return f;
  };

  // The density has kinks where a workload drains or a case boundary is
  // crossed; cut there so each piece is smooth.
  const std::vector<double> cuts = {v1, v2, v1 - params.switch_cost,
                                    v2 - params.switch_cost};
  const QuadratureResult r =
      integrate_piecewise(density, 0.0, a_max, cuts, 1e-10);
  if (!r.converged)
    throw QuadratureError("density_total_mass: quadrature did not converge; "
                          "achieved error estimate " +
                              std::to_string(r.error_estimate),
                          r.error_estimate);
  return r.value;
}

}  // namespace twostation

#include "twostation/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twostation/rng.hpp"

namespace twostation {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_rates(double lambda1, double lambda2, double switch_cost,
                 int k_target) {
  if (!(lambda1 >= 0.0 && lambda2 >= 0.0 && lambda1 + lambda2 > 0.0))
    throw std::invalid_argument("arrival rates must be >= 0 with a positive sum");
  if (!(switch_cost >= 0.0))
    throw std::invalid_argument("switch_cost must be >= 0");
  if (k_target < 1) throw std::invalid_argument("k_target must be >= 1");
}

}  // namespace

WorkloadState workload_after(const WorkloadState& state, double dt) {
  if (!(dt >= 0.0)) throw std::domain_error("workload_after: dt must be >= 0");
  return {std::max(0.0, state.v1 - dt), std::max(0.0, state.v2 - dt),
          state.clock + dt};
}

SimRunOutput simulate_run(const ValueDistribution& values, double lambda1,
                          double lambda2, double switch_cost,
                          const ServiceDistribution& g1,
                          const ServiceDistribution& g2, int k_target,
                          std::uint64_t seed) {
  check_rates(lambda1, lambda2, switch_cost, k_target);

  const double lambda_total = lambda1 + lambda2;
  const double p1 = lambda1 / lambda_total;
  Rng rng(seed);

  SimRunOutput out;
  out.seed = seed;
  out.observations.reserve(static_cast<std::size_t>(k_target));
  out.join_log.reserve(static_cast<std::size_t>(k_target));

  double v1 = 0.0, v2 = 0.0;
  double t = 0.0, last_join = 0.0;

  while (out.observations.size() < static_cast<std::size_t>(k_target)) {
    const double dt = rng.next_exponential(lambda_total);
    t += dt;
    v1 = std::max(0.0, v1 - dt);
    v2 = std::max(0.0, v2 - dt);

    const int s = rng.next_bernoulli(p1) ? 1 : 2;
    const double r = values.sample(rng.next_unit());
    const double w_local = s == 1 ? v1 : v2;
    const double w_other = s == 1 ? v2 : v1;

    ++out.n_potential;
    const Decision d = decide(w_local, w_other, switch_cost, r);
    if (d == Decision::Balk) {
      ++out.n_balks;
      continue;
    }

    const int joined = d == Decision::JoinLocal ? s : 3 - s;
    if (d == Decision::SwitchToOther) ++out.n_switches;

    out.join_log.push_back({s, v1, v2});
    const double x = (joined == 1 ? g1 : g2).sample(rng.next_unit());
    (joined == 1 ? v1 : v2) += x;
    out.observations.push_back({t - last_join, joined, x});
    last_join = t;
  }
  out.total_time = last_join;
  return out;
}

SimRunOutput simulate_run(const ModelParams& params,
                          const ServiceDistribution& g1,
                          const ServiceDistribution& g2, int k_target,
                          std::uint64_t seed) {
  params.validate();
  const ParetoValue values(params.theta);
  return simulate_run(values, params.lambda1, params.lambda2,
                      params.switch_cost, g1, g2, k_target, seed);
}

std::vector<WorkloadState> reconstruct_states(
    std::span<const EffectiveArrival> observations) {
  if (observations.empty())
    throw std::domain_error("reconstruct_states: empty observation sequence");

  std::vector<WorkloadState> states;
  states.reserve(observations.size());
  WorkloadState s;
  for (const EffectiveArrival& obs : observations) {
    if (!(obs.a > 0.0) || !(obs.x > 0.0) ||
        (obs.station != 1 && obs.station != 2))
      throw std::domain_error("reconstruct_states: malformed observation");
    s = workload_after(s, obs.a);
    (obs.station == 1 ? s.v1 : s.v2) += obs.x;
    states.push_back(s);
  }
  return states;
}

namespace {

// Sorted per-server residual workloads of one station; empty means no
// servers there.
struct StationServers {
  std::vector<double> residual;

  double wait() const { return residual.empty() ? kInf : residual.front(); }

  void decay(double dt) {
    for (double& w : residual) w = std::max(0.0, w - dt);
  }

  void join(double service) {
    residual.front() += service;
    std::sort(residual.begin(), residual.end());
  }
};

}  // namespace

double simulate_multiserver_throughput(ServerLayout layout, double lambda1,
                                       double lambda2,
                                       const ValueDistribution& values,
                                       double switch_cost, int k_target,
                                       std::uint64_t seed) {
  check_rates(lambda1, lambda2, switch_cost, k_target);

  StationServers st1, st2;
  switch (layout) {
    case ServerLayout::OneEach:
      st1.residual = {0.0};
      st2.residual = {0.0};
      break;
    case ServerLayout::BothAtStation1:
      st1.residual = {0.0, 0.0};
      break;
  }

  const ServiceDistribution service = ServiceDistribution::exponential(1.0);
  const double lambda_total = lambda1 + lambda2;
  const double p1 = lambda1 / lambda_total;
  Rng rng(seed);

  int joined = 0;
  double t = 0.0, last_join = 0.0;
  while (joined < k_target) {
    const double dt = rng.next_exponential(lambda_total);
    t += dt;
    st1.decay(dt);
    st2.decay(dt);

    const int s = rng.next_bernoulli(p1) ? 1 : 2;
    const double r = values.sample(rng.next_unit());
    StationServers& local = s == 1 ? st1 : st2;
    StationServers& other = s == 1 ? st2 : st1;

    const Decision d = decide(local.wait(), other.wait(), switch_cost, r);
    if (d == Decision::Balk) continue;

    StationServers& target = d == Decision::JoinLocal ? local : other;
    target.join(service.sample(rng.next_unit()));
    ++joined;
    last_join = t;
  }
  return static_cast<double>(k_target) / last_join;
}

}  // namespace twostation

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "twostation/value_model.hpp"

namespace twostation {

// Workloads are virtual waiting times: between joins each decays linearly at
// rate 1 and is clamped at zero.
struct WorkloadState {
  double v1 = 0.0;
  double v2 = 0.0;
  double clock = 0.0;
};

WorkloadState workload_after(const WorkloadState& state, double dt);

// One observable jump in the workload data: the gap since the previous join,
// the station whose workload jumped, and the jump size.
struct EffectiveArrival {
  double a = 0.0;  // inter-join time
  int station = 1;
  double x = 0.0;  // service-time jump

  bool operator==(const EffectiveArrival&) const = default;
};

// Pre-decision snapshot taken when a customer joined; not part of the
// manager's data, kept for diagnostics and consistency tests.
struct JoinRecord {
  int arrival_station = 1;
  double w1 = 0.0;  // workloads the customer saw
  double w2 = 0.0;

  bool operator==(const JoinRecord&) const = default;
};

struct SimRunOutput {
  std::vector<EffectiveArrival> observations;
  std::vector<JoinRecord> join_log;  // one entry per effective arrival
  double total_time = 0.0;           // time of the last join
  long long n_switches = 0;
  long long n_potential = 0;
  long long n_balks = 0;
  std::uint64_t seed = 0;

  double joining_fraction(double lambda_total) const {
    return static_cast<double>(observations.size()) /
           (lambda_total * total_time);
  }
  double switching_fraction() const {
    return static_cast<double>(n_switches) /
           static_cast<double>(observations.size());
  }

  bool operator==(const SimRunOutput&) const = default;
};

// Runs the two-station system from an empty state until k_target customers
// have joined. Potential arrivals form a merged Poisson(lambda1 + lambda2)
// stream with Bernoulli station labels; each draws a value from the tail
// distribution and acts per decide(). Balking customers consume draws for
// (inter-arrival, station, value) but never a service draw, so a seed's
// decision sequence does not depend on the service distributions.
SimRunOutput simulate_run(const ValueDistribution& values, double lambda1,
                          double lambda2, double switch_cost,
                          const ServiceDistribution& g1,
                          const ServiceDistribution& g2, int k_target,
                          std::uint64_t seed);

// Same with a Pareto value tail taken from params.
SimRunOutput simulate_run(const ModelParams& params,
                          const ServiceDistribution& g1,
                          const ServiceDistribution& g2, int k_target,
                          std::uint64_t seed);

// Post-jump workloads after each observation, i.e. the states the likelihood
// conditions on: v_k = max(0, v_{k-1} - a_k) + x_k at the joined station,
// starting from an empty system.
std::vector<WorkloadState> reconstruct_states(
    std::span<const EffectiveArrival> observations);

// Server allocations compared in the throughput experiment.
enum class ServerLayout { OneEach, BothAtStation1 };

// Event-driven FCFS system where stations may have several (or zero)
// servers, each serving at exponential rate 1. Per-server residual work is
// tracked with the sorted workload-vector recursion; an arriving customer
// sees the smallest residual as the virtual waiting time (+infinity where a
// station has no servers) and acts per decide(). Returns K / T.
double simulate_multiserver_throughput(ServerLayout layout, double lambda1,
                                       double lambda2,
                                       const ValueDistribution& values,
                                       double switch_cost, int k_target,
                                       std::uint64_t seed);

}  // namespace twostation

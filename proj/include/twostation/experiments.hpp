#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "twostation/estimator.hpp"
#include "twostation/simulator.hpp"
#include "twostation/value_model.hpp"

namespace twostation {

struct RunEstimate {
  int run = 0;
  bool converged = false;
  ModelParams params_hat;
  double log_lik = 0.0;
  double c_tilde = 0.0;
  double joining_rate = 0.0;    // K / ((lambda1+lambda2) T)
  double switching_rate = 0.0;  // N / K
};

struct ReplicationRow {
  ModelParams true_params;
  ServiceDistribution service1, service2;
  int k_target = 0;
  int n_runs = 0;
  int n_excluded = 0;  // runs whose fit did not converge
  std::array<double, 4> means{};  // lambda1, lambda2, theta, c
  std::array<double, 4> stds{};   // sample std, denominator L-1
  double avg_joining_rate = 0.0;
  double avg_switching_rate = 0.0;
};

struct ReplicationResult {
  ReplicationRow row;
  std::vector<RunEstimate> runs;  // in run order, including excluded runs
};

// Simulate-and-fit n_runs independent replications. Run l uses the l-th
// substream of master_seed, so results do not depend on scheduling order;
// jobs <= 0 means one worker per hardware thread.
ReplicationResult replicate(const ModelParams& true_params,
                            const ServiceDistribution& g1,
                            const ServiceDistribution& g2, int k_target,
                            int n_runs, std::uint64_t master_seed,
                            const EstimatorOptions& options, int jobs = 0);

void write_replication_table(const std::vector<ReplicationRow>& rows,
                             const std::filesystem::path& path);

// Per-parameter outputs under out_dir: estimates.csv with one row per run,
// hist_<param>.csv with Freedman-Diaconis bins, and hist_<param>.svg with a
// normal overlay at the empirical mean/std (omitted when the spread is
// degenerate, which is flagged in the CSV).
void histogram_report(const std::vector<RunEstimate>& runs,
                      const std::filesystem::path& out_dir);

struct SweepPoint {
  double lambda1 = 0.0;
  double throughput_one_each = 0.0;
  double throughput_both_at_1 = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double crossover_lambda1 = 0.0;  // NaN when the curves do not cross
};

// Mean throughput of both server layouts over a lambda1 grid on
// [lambda_total/2, lambda_total], n_runs replications per point.
SweepResult throughput_sweep(double lambda_total, double grid_step,
                             const ValueDistribution& values,
                             double switch_cost, int k_target, int n_runs,
                             std::uint64_t master_seed, int jobs = 0);

// sweep.csv and sweep.svg under out_dir.
void write_sweep_report(const SweepResult& sweep,
                        const std::filesystem::path& out_dir);

}  // namespace twostation

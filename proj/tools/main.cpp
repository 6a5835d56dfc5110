// twostation: simulate a two-station service system with switching and
// unobserved balking, and estimate (lambda1, lambda2, theta, c) from the
// workload-jump observations. Subcommands: simulate, estimate, replicate,
// throughput. All randomness flows from --seed; machine-readable output goes
// to files under --out only.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "twostation/experiments.hpp"
#include "twostation/format.hpp"
#include "twostation/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNotConverged = 4;

using namespace twostation;

struct CommonFlags {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> k_target;
  std::optional<int> n_runs;
  std::optional<int> n_starts;
  int jobs = 0;
  bool full_scale = false;
};

RunConfig apply_overrides(RunConfig cfg, const CommonFlags& flags) {
  if (flags.out_dir) cfg.output_dir = *flags.out_dir;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.k_target) cfg.k_target = *flags.k_target;
  if (flags.n_runs) cfg.n_runs = *flags.n_runs;
  if (flags.n_starts) cfg.estimator.n_starts = *flags.n_starts;
  if (flags.full_scale) cfg.n_runs = 1000;
  return cfg;
}

std::filesystem::path ensure_out_dir(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  return dir;
}

int cmd_simulate(const std::string& config_path, const CommonFlags& flags) {
  const RunConfig cfg = apply_overrides(load_run_config(config_path), flags);
  const auto out = ensure_out_dir(cfg.output_dir);

  const SimRunOutput run = simulate_run(cfg.params, cfg.service1, cfg.service2,
                                        cfg.k_target, cfg.seed);
  write_observations_csv(out / "obs.csv", run.observations);
  write_summary_json(out / "summary.json", run,
                     cfg.params.lambda1 + cfg.params.lambda2);
  std::fprintf(stderr, "simulate: %zu joins, %lld balks -> %s\n",
               run.observations.size(), run.n_balks, out.string().c_str());
  return kExitOk;
}

int cmd_estimate(const std::string& obs_path, const CommonFlags& flags) {
  const auto out = ensure_out_dir(flags.out_dir.value_or("out"));
  const std::vector<EffectiveArrival> observations =
      read_observations_csv(obs_path);

  EstimatorOptions options;
  if (flags.n_starts) options.n_starts = *flags.n_starts;
  if (flags.seed) options.seed = *flags.seed;

  const EstimationResult result = estimate(observations, options);
  write_estimate_json(out / "estimate.json", result);
  std::fprintf(stderr,
               "estimate: lambda1=%s lambda2=%s theta=%s c=%s (%s)\n",
               format_double(result.params_hat.lambda1).c_str(),
               format_double(result.params_hat.lambda2).c_str(),
               format_double(result.params_hat.theta).c_str(),
               format_double(result.params_hat.switch_cost).c_str(),
               result.message.c_str());
  return result.converged ? kExitOk : kExitNotConverged;
}

int cmd_replicate(const std::string& config_path, const CommonFlags& flags) {
  const RunConfig cfg = apply_overrides(load_run_config(config_path), flags);
  const auto out = ensure_out_dir(cfg.output_dir);

  std::fprintf(stderr, "replicate: %d runs of K=%d at seed %llu\n", cfg.n_runs,
               cfg.k_target,
               static_cast<unsigned long long>(cfg.seed));
  const ReplicationResult result =
      replicate(cfg.params, cfg.service1, cfg.service2, cfg.k_target,
                cfg.n_runs, cfg.seed, cfg.estimator, flags.jobs);
  write_replication_table({result.row}, out / "table.csv");
  histogram_report(result.runs, out);
  std::fprintf(stderr,
               "replicate: means (%.4g, %.4g, %.4g, %.4g), %d run(s) "
               "excluded -> %s\n",
               result.row.means[0], result.row.means[1], result.row.means[2],
               result.row.means[3], result.row.n_excluded,
               out.string().c_str());
  return kExitOk;
}

int cmd_throughput(const CommonFlags& flags, double lambda_total, double cost,
                   double theta, double step) {
  const auto out = ensure_out_dir(flags.out_dir.value_or("out"));
  const ParetoValue values(theta);
  const SweepResult sweep = throughput_sweep(
      lambda_total, step, values, cost, flags.k_target.value_or(1000),
      flags.n_runs.value_or(50), flags.seed.value_or(1), flags.jobs);
  write_sweep_report(sweep, out);
  std::fprintf(stderr, "throughput: %zu grid points, crossover near %s -> %s\n",
               sweep.points.size(),
               format_double(sweep.crossover_lambda1).c_str(),
               out.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-station queueing simulator and workload-data estimator"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string config_path, obs_path;
  double lambda_total = 2.0, cost = 2.0, theta = 4.0, step = 0.1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--seed", flags.seed, "master RNG seed");
    cmd->add_option("--jobs", flags.jobs, "worker threads (0 = all cores)");
  };

  CLI::App* simulate = app.add_subcommand(
      "simulate", "one run; writes obs.csv and summary.json");
  simulate->add_option("--config", config_path, "JSON run config")->required();
  simulate->add_option("--k", flags.k_target, "effective arrivals to observe");
  add_common(simulate);

  CLI::App* estimate = app.add_subcommand(
      "estimate", "fit an observation CSV; writes estimate.json");
  estimate->add_option("--obs", obs_path, "observation CSV")->required();
  estimate->add_option("--starts", flags.n_starts, "optimizer starts");
  add_common(estimate);

  CLI::App* replicate = app.add_subcommand(
      "replicate", "simulate-and-fit grid; writes table.csv and histograms");
  replicate->add_option("--config", config_path, "JSON run config")->required();
  replicate->add_option("--runs", flags.n_runs, "replications");
  replicate->add_option("--k", flags.k_target, "effective arrivals per run");
  replicate->add_option("--starts", flags.n_starts, "optimizer starts");
  replicate->add_flag("--full-scale", flags.full_scale,
                      "use 1000 replications");
  add_common(replicate);

  CLI::App* throughput = app.add_subcommand(
      "throughput", "server-allocation sweep; writes sweep.csv and sweep.svg");
  throughput->add_option("--runs", flags.n_runs, "replications per point");
  throughput->add_option("--k", flags.k_target, "joins per replication");
  throughput->add_option("--lambda-total", lambda_total, "total arrival rate");
  throughput->add_option("--cost", cost, "switching cost");
  throughput->add_option("--theta", theta, "value-tail exponent");
  throughput->add_option("--step", step, "lambda1 grid step");
  add_common(throughput);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, flags);
    if (estimate->parsed()) return cmd_estimate(obs_path, flags);
    if (replicate->parsed()) return cmd_replicate(config_path, flags);
    return cmd_throughput(flags, lambda_total, cost, theta, step);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const CsvError& e) {
    std::fprintf(stderr, "csv error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "invalid data: %s\n", e.what());
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "twostation/estimator.hpp"
#include "twostation/simulator.hpp"
#include "twostation/value_model.hpp"

namespace twostation {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CsvError : std::runtime_error {
  CsvError(const std::string& what, long line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line(line) {}
  long line;
};

// Everything one batch invocation needs; round-trips losslessly through
// JSON, unknown keys are rejected.
struct RunConfig {
  ModelParams params;
  ServiceDistribution service1 = ServiceDistribution::exponential(1.0);
  ServiceDistribution service2 = ServiceDistribution::exponential(5.0);
  int k_target = 1000;
  int n_runs = 200;
  std::uint64_t seed = 1;
  EstimatorOptions estimator;
  std::filesystem::path output_dir = "out";

  bool operator==(const RunConfig& other) const;
};

RunConfig parse_run_config(const std::string& json_text);
std::string run_config_to_json(const RunConfig& config);
RunConfig load_run_config(const std::filesystem::path& path);

// Observation CSV: header "k,a,i,x", floats at 17 significant digits.
void write_observations_csv(const std::filesystem::path& path,
                            std::span<const EffectiveArrival> observations);
std::vector<EffectiveArrival> read_observations_csv(
    const std::filesystem::path& path);

void write_summary_json(const std::filesystem::path& path,
                        const SimRunOutput& run, double lambda_total);
void write_estimate_json(const std::filesystem::path& path,
                         const EstimationResult& result);

}  // namespace twostation

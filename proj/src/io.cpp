#include "twostation/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "twostation/format.hpp"

namespace twostation {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& context) {
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key))
      throw ConfigError("unknown key \"" + key + "\" in " + context);
  }
}

double get_number(const json& j, const std::string& key,
                  const std::string& context) {
  if (!j.contains(key))
    throw ConfigError("missing field \"" + key + "\" in " + context);
  if (!j.at(key).is_number())
    throw ConfigError("field \"" + key + "\" in " + context +
                      " must be a number");
  return j.at(key).get<double>();
}

ServiceDistribution parse_service(const json& j, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + " must be an object");
  reject_unknown_keys(j, {"kind", "beta"}, context);
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw ConfigError("field \"kind\" in " + context + " must be a string");
  const std::string kind = j.at("kind").get<std::string>();
  const double beta = get_number(j, "beta", context);
  try {
    if (kind == "exponential") return ServiceDistribution::exponential(beta);
    if (kind == "pareto") return ServiceDistribution::pareto(beta);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(context + ": " + e.what());
  }
  throw ConfigError("field \"kind\" in " + context +
                    " must be \"exponential\" or \"pareto\"");
}

json service_to_json(const ServiceDistribution& s) {
  return {{"kind", s.kind == ServiceDistribution::Kind::Exponential
                       ? "exponential"
                       : "pareto"},
          {"beta", s.beta}};
}

}  // namespace

bool RunConfig::operator==(const RunConfig& other) const {
  return params.lambda1 == other.params.lambda1 &&
         params.lambda2 == other.params.lambda2 &&
         params.theta == other.params.theta &&
         params.switch_cost == other.params.switch_cost &&
         service1.kind == other.service1.kind &&
         service1.beta == other.service1.beta &&
         service2.kind == other.service2.kind &&
         service2.beta == other.service2.beta &&
         k_target == other.k_target && n_runs == other.n_runs &&
         seed == other.seed && estimator.n_starts == other.estimator.n_starts &&
         estimator.max_evals == other.estimator.max_evals &&
         estimator.tolerance == other.estimator.tolerance &&
         estimator.seed == other.estimator.seed &&
         output_dir == other.output_dir;
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  reject_unknown_keys(j,
                      {"params", "service1", "service2", "k_target", "n_runs",
                       "seed", "estimator", "output_dir"},
                      "config");

  RunConfig cfg;
  if (!j.contains("params") || !j.at("params").is_object())
    throw ConfigError("missing object \"params\" in config");
  const json& p = j.at("params");
  reject_unknown_keys(p, {"lambda1", "lambda2", "theta", "switch_cost"},
                      "params");
  cfg.params.lambda1 = get_number(p, "lambda1", "params");
  cfg.params.lambda2 = get_number(p, "lambda2", "params");
  cfg.params.theta = get_number(p, "theta", "params");
  cfg.params.switch_cost = get_number(p, "switch_cost", "params");
  try {
    cfg.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }

  if (!j.contains("service1") || !j.contains("service2"))
    throw ConfigError("config needs \"service1\" and \"service2\"");
  cfg.service1 = parse_service(j.at("service1"), "service1");
  cfg.service2 = parse_service(j.at("service2"), "service2");

  if (j.contains("k_target")) {
    cfg.k_target = j.at("k_target").get<int>();
    if (cfg.k_target < 1) throw ConfigError("k_target must be >= 1");
  }
  if (j.contains("n_runs")) {
    cfg.n_runs = j.at("n_runs").get<int>();
    if (cfg.n_runs < 2) throw ConfigError("n_runs must be >= 2");
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("estimator")) {
    const json& e = j.at("estimator");
    reject_unknown_keys(e, {"n_starts", "max_evals", "tolerance", "seed"},
                        "estimator");
    if (e.contains("n_starts")) cfg.estimator.n_starts = e.at("n_starts").get<int>();
    if (e.contains("max_evals")) cfg.estimator.max_evals = e.at("max_evals").get<int>();
    if (e.contains("tolerance"))
      cfg.estimator.tolerance = get_number(e, "tolerance", "estimator");
    if (e.contains("seed")) cfg.estimator.seed = e.at("seed").get<std::uint64_t>();
    try {
      cfg.estimator.validate();
    } catch (const std::invalid_argument& err) {
      throw ConfigError(std::string("estimator: ") + err.what());
    }
  }

  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string())
      throw ConfigError("output_dir must be a string");
    cfg.output_dir = j.at("output_dir").get<std::string>();
  }
  return cfg;
}

std::string run_config_to_json(const RunConfig& cfg) {
  json j = {
      {"params",
       {{"lambda1", cfg.params.lambda1},
        {"lambda2", cfg.params.lambda2},
        {"theta", cfg.params.theta},
        {"switch_cost", cfg.params.switch_cost}}},
      {"service1", service_to_json(cfg.service1)},
      {"service2", service_to_json(cfg.service2)},
      {"k_target", cfg.k_target},
      {"n_runs", cfg.n_runs},
      {"seed", cfg.seed},
      {"estimator",
       {{"n_starts", cfg.estimator.n_starts},
        {"max_evals", cfg.estimator.max_evals},
        {"tolerance", cfg.estimator.tolerance},
        {"seed", cfg.estimator.seed}}},
      {"output_dir", cfg.output_dir.string()},
  };
  return j.dump(2) + "\n";
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

void write_observations_csv(const std::filesystem::path& path,
                            std::span<const EffectiveArrival> observations) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "k,a,i,x\n";
  long k = 1;
  for (const EffectiveArrival& obs : observations)
    out << k++ << ',' << format_double(obs.a) << ',' << obs.station << ','
        << format_double(obs.x) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

namespace {

double parse_csv_double(std::string_view field, long line) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw CsvError("bad numeric field \"" + std::string(field) + "\"", line);
  return v;
}

}  // namespace

std::vector<EffectiveArrival> read_observations_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::vector<EffectiveArrival> observations;
  std::string row;
  long line = 0;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    if (line == 1) {
      if (row != "k,a,i,x")
        throw CsvError("expected header \"k,a,i,x\", got \"" + row + "\"",
                       line);
      continue;
    }
    std::array<std::string_view, 4> fields;
    std::string_view rest = row;
    for (int f = 0; f < 4; ++f) {
      const std::size_t comma = rest.find(',');
      if (f < 3 && comma == std::string_view::npos)
        throw CsvError("expected 4 comma-separated fields", line);
      if (f == 3 && comma != std::string_view::npos)
        throw CsvError("expected 4 comma-separated fields", line);
      fields[static_cast<std::size_t>(f)] =
          f < 3 ? rest.substr(0, comma) : rest;
      if (f < 3) rest = rest.substr(comma + 1);
    }
    EffectiveArrival obs;
    obs.a = parse_csv_double(fields[1], line);
    const double station = parse_csv_double(fields[2], line);
    obs.x = parse_csv_double(fields[3], line);
    if (station != 1.0 && station != 2.0)
      throw CsvError("station must be 1 or 2", line);
    obs.station = static_cast<int>(station);
    if (!(obs.a > 0.0) || !(obs.x > 0.0))
      throw CsvError("a and x must be > 0", line);
    observations.push_back(obs);
  }
  if (observations.empty())
    throw CsvError("no observation rows", std::max(line, 1L));
  return observations;
}

void write_summary_json(const std::filesystem::path& path,
                        const SimRunOutput& run, double lambda_total) {
  json j = {
      {"k", run.observations.size()},
      {"total_time", run.total_time},
      {"n_switches", run.n_switches},
      {"n_potential", run.n_potential},
      {"n_balks", run.n_balks},
      {"seed", run.seed},
      {"joining_rate", run.joining_fraction(lambda_total)},
      {"switching_rate", run.switching_fraction()},
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_estimate_json(const std::filesystem::path& path,
                         const EstimationResult& result) {
  json j = {
      {"params_hat",
       {{"lambda1", result.params_hat.lambda1},
        {"lambda2", result.params_hat.lambda2},
        {"theta", result.params_hat.theta},
        {"switch_cost", result.params_hat.switch_cost}}},
      {"log_lik", std::isfinite(result.log_lik)
                      ? json(result.log_lik)
                      : json(nullptr)},
      {"c_tilde", result.c_tilde},
      {"n_restarts", result.n_restarts},
      {"converged", result.converged},
      {"n_evals", result.n_evals},
      {"message", result.message},
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace twostation

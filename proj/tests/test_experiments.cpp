#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_support.hpp"
#include "twostation/experiments.hpp"
#include "twostation/rng.hpp"

using namespace twostation;
namespace fs = std::filesystem;

namespace {

const ServiceDistribution kExp1 = ServiceDistribution::exponential(1.0);
const ServiceDistribution kExp5 = ServiceDistribution::exponential(5.0);

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("twostation_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::vector<std::string>> read_csv_rows(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

EstimatorOptions quick_options() {
  EstimatorOptions opt;
  opt.n_starts = 3;
  opt.max_evals = 6000;
  return opt;
}

}  // namespace

TEST_CASE("replicate aggregates runs with substream independence") {
  const ModelParams p{1.2, 0.9, 1.5, 0.4};
  const ReplicationResult serial =
      replicate(p, kExp1, kExp5, 150, 6, 424242, quick_options(), 1);
  const ReplicationResult threaded =
      replicate(p, kExp1, kExp5, 150, 6, 424242, quick_options(), 3);

  REQUIRE(serial.runs.size() == 6);
  for (int i = 0; i < 4; ++i) {
    CHECK(serial.row.means[static_cast<std::size_t>(i)] ==
          threaded.row.means[static_cast<std::size_t>(i)]);
    CHECK(serial.row.stds[static_cast<std::size_t>(i)] ==
          threaded.row.stds[static_cast<std::size_t>(i)]);
  }
  CHECK(serial.row.avg_joining_rate == threaded.row.avg_joining_rate);
  CHECK(serial.row.avg_switching_rate == threaded.row.avg_switching_rate);

  // single-pass and two-pass recomputation of the aggregates agree
  for (int i = 0; i < 4; ++i) {
    double s = 0.0, ss = 0.0, n = 0.0;
    for (const RunEstimate& r : serial.runs) {
      if (!r.converged) continue;
      const double v = i == 0   ? r.params_hat.lambda1
                       : i == 1 ? r.params_hat.lambda2
                       : i == 2 ? r.params_hat.theta
                                : r.params_hat.switch_cost;
      s += v;
      ss += v * v;
      n += 1.0;
    }
    REQUIRE(n >= 2.0);
    const double mean1 = s / n;
    const double var1 = (ss - n * mean1 * mean1) / (n - 1.0);
    CHECK(std::abs(mean1 - serial.row.means[static_cast<std::size_t>(i)]) <=
          1e-10);
    CHECK(std::abs(std::sqrt(std::max(var1, 0.0)) -
                   serial.row.stds[static_cast<std::size_t>(i)]) <= 1e-10);
  }
}

TEST_CASE("replicate survives a degenerate tiny profile") {
  const ModelParams p{1.0, 1.0, 1.0, 0.5};
  const ReplicationResult r =
      replicate(p, kExp1, kExp5, 50, 2, 7, quick_options(), 1);
  CHECK(r.row.n_runs == 2);
  CHECK(r.runs.size() == 2);
  CHECK(r.row.n_excluded >= 0);
  CHECK_THROWS_AS(replicate(p, kExp1, kExp5, 50, 1, 7, quick_options(), 1),
                  std::invalid_argument);
}

TEST_CASE("replication table and histogram files are written and consistent") {
  const fs::path dir = temp_dir("hist");
  const ModelParams p{1.0, 1.0, 1.2, 0.5};
  const ReplicationResult r =
      replicate(p, kExp1, kExp5, 120, 8, 99, quick_options(), 1);
  write_replication_table({r.row}, dir / "table.csv");
  histogram_report(r.runs, dir);

  const auto table = read_csv_rows(dir / "table.csv");
  REQUIRE(table.size() == 2);
  CHECK(table[0].size() == 19);
  CHECK(table[1].size() == 19);

  const auto estimates = read_csv_rows(dir / "estimates.csv");
  CHECK(estimates.size() == 9);  // header + 8 runs

  for (const char* name : {"lambda1", "lambda2", "theta", "c"}) {
    const fs::path csv = dir / (std::string("hist_") + name + ".csv");
    const fs::path svg = dir / (std::string("hist_") + name + ".svg");
    REQUIRE(fs::exists(csv));
    REQUIRE(fs::exists(svg));
    const auto rows = read_csv_rows(csv);
    long total = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
      total += std::stol(rows[i][2]);
    CHECK(total == 8);  // bin counts sum to the histogrammed runs
    CHECK(fs::file_size(svg) > 500);
  }
}

TEST_CASE("degenerate estimates collapse to one flagged bin") {
  std::vector<RunEstimate> runs;
  for (int l = 0; l < 5; ++l)
    runs.push_back({l, true, {1.0, 2.0, 3.0, 0.25}, -10.0, 0.2, 0.9, 0.1});
  const fs::path dir = temp_dir("degenerate");
  histogram_report(runs, dir);

  std::ifstream in(dir / "hist_theta.csv");
  std::string first;
  std::getline(in, first);
  CHECK(first.find("degenerate") != std::string::npos);
  const auto rows = read_csv_rows(dir / "hist_theta.csv");
  REQUIRE(rows.size() == 2);  // header + one bin
  CHECK(std::stol(rows[1][2]) == 5);
}

TEST_CASE("histogram of synthetic normal draws matches the density") {
  // Box-Muller standard normals through the experiment pipeline; bin masses
  // must track the true normal probabilities and the fitted overlay.
  Rng rng(11);
  const int n = 10000;
  std::vector<RunEstimate> runs;
  std::vector<double> draws;
  for (int i = 0; i < n; i += 2) {
    const double u1 = rng.next_unit(), u2 = rng.next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    draws.push_back(r * std::cos(6.283185307179586 * u2));
    draws.push_back(r * std::sin(6.283185307179586 * u2));
  }
  for (int i = 0; i < n; ++i)
    runs.push_back({i, true, {1.0, 1.0, 10.0 + draws[static_cast<std::size_t>(i)], 0.5},
                    0.0, 0.0, 0.0, 0.0});

  const fs::path dir = temp_dir("normal");
  histogram_report(runs, dir);
  const auto rows = read_csv_rows(dir / "hist_theta.csv");
  REQUIRE(rows.size() > 20);

  const auto normal_cdf = [](double x) {
    return 0.5 * std::erfc(-(x - 10.0) / std::sqrt(2.0));
  };
  long total = 0;
  double max_abs_dev = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double lo = std::stod(rows[i][0]), hi = std::stod(rows[i][1]);
    const long count = std::stol(rows[i][2]);
    total += count;
    const double expected = normal_cdf(hi) - normal_cdf(lo);
    max_abs_dev = std::max(
        max_abs_dev, std::abs(static_cast<double>(count) / n - expected));
  }
  CHECK(total == n);
  CHECK(max_abs_dev <= 0.05);  // per-bin mass within five percent

  // shape check: the sample against the overlay's normal
  CHECK(oracle::ks_distance(draws, [](double x) {
          return 0.5 * std::erfc(-x / std::sqrt(2.0));
        }) <= 0.02);
}

TEST_CASE("throughput sweep produces a well-formed grid") {
  const ParetoValue h(4.0);
  const SweepResult sweep = throughput_sweep(2.0, 0.25, h, 2.0, 400, 6, 13, 1);
  REQUIRE(sweep.points.size() == 5);
  CHECK(sweep.points.front().lambda1 == doctest::Approx(1.0));
  CHECK(sweep.points.back().lambda1 == doctest::Approx(2.0));
  for (const SweepPoint& pt : sweep.points) {
    CHECK(pt.throughput_one_each > 0.3);
    CHECK(pt.throughput_one_each < 2.5);
    CHECK(pt.throughput_both_at_1 > 0.3);
    CHECK(pt.throughput_both_at_1 < 2.5);
  }

  const fs::path dir = temp_dir("sweep");
  write_sweep_report(sweep, dir);
  const auto rows = read_csv_rows(dir / "sweep.csv");
  CHECK(rows.size() == 6);  // header + 5 points
  CHECK(fs::exists(dir / "sweep.svg"));

  // identical master seed reproduces the sweep bit for bit
  const SweepResult again = throughput_sweep(2.0, 0.25, h, 2.0, 400, 6, 13, 2);
  for (std::size_t i = 0; i < sweep.points.size(); ++i) {
    CHECK(sweep.points[i].throughput_one_each ==
          again.points[i].throughput_one_each);
    CHECK(sweep.points[i].throughput_both_at_1 ==
          again.points[i].throughput_both_at_1);
  }
}

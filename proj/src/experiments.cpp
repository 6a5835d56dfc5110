#include "twostation/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include "twostation/format.hpp"
#include "twostation/rng.hpp"
#include "twostation/svg_plot.hpp"

namespace twostation {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs fn(0..n-1) on a small worker pool. Task i always sees the same
// inputs, so the schedule cannot affect results.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::clamp(jobs, 1, n);
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double param_component(const ModelParams& p, int i) {
  switch (i) {
    case 0: return p.lambda1;
    case 1: return p.lambda2;
    case 2: return p.theta;
    default: return p.switch_cost;
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  return out;
}

struct Histogram {
  std::vector<double> edges;   // n_bins + 1
  std::vector<long> counts;    // n_bins
  bool degenerate = false;
};

// Freedman-Diaconis bins; a sample without spread collapses to one bin.
Histogram make_histogram(std::vector<double> values) {
  Histogram h;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const double lo = values.front(), hi = values.back();

  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(n - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return i + 1 < n ? values[i] * (1.0 - frac) + values[i + 1] * frac
                     : values[i];
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));

  if (!(hi > lo) || !(width > 0.0)) {
    h.degenerate = true;
    const double pad = std::max(std::abs(lo) * 0.05, 0.5);
    h.edges = {lo - pad, hi + pad};
    h.counts = {static_cast<long>(n)};
    return h;
  }

  const int n_bins = std::clamp(
      static_cast<int>(std::ceil((hi - lo) / width)), 1, 400);
  h.edges.resize(static_cast<std::size_t>(n_bins) + 1);
  for (int b = 0; b <= n_bins; ++b)
    h.edges[static_cast<std::size_t>(b)] = lo + (hi - lo) * b / n_bins;
  h.counts.assign(static_cast<std::size_t>(n_bins), 0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / (hi - lo) * n_bins);
    b = std::clamp(b, 0, n_bins - 1);  // the max lands in the last bin
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

double normal_pdf(double x, double mean, double sd) {
  constexpr double two_pi = 6.283185307179586;
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(two_pi));
}

}  // namespace

ReplicationResult replicate(const ModelParams& true_params,
                            const ServiceDistribution& g1,
                            const ServiceDistribution& g2, int k_target,
                            int n_runs, std::uint64_t master_seed,
                            const EstimatorOptions& options, int jobs) {
  true_params.validate();
  if (n_runs < 2) throw std::invalid_argument("replicate: n_runs must be >= 2");
  if (k_target < 1) throw std::invalid_argument("replicate: k_target must be >= 1");

  ReplicationResult out;
  out.runs.resize(static_cast<std::size_t>(n_runs));
  const double lambda_total = true_params.lambda1 + true_params.lambda2;

  parallel_for(n_runs, jobs, [&](int l) {
    const std::uint64_t seed =
        Rng::substream_seed(master_seed, static_cast<std::uint64_t>(l));
    const SimRunOutput sim =
        simulate_run(true_params, g1, g2, k_target, seed);
    const EstimationResult est = estimate(sim.observations, options);
    out.runs[static_cast<std::size_t>(l)] =
        {l,
         est.converged,
         est.params_hat,
         est.log_lik,
         est.c_tilde,
         sim.joining_fraction(lambda_total),
         sim.switching_fraction()};
  });

  ReplicationRow& row = out.row;
  row.true_params = true_params;
  row.service1 = g1;
  row.service2 = g2;
  row.k_target = k_target;
  row.n_runs = n_runs;

  std::vector<const RunEstimate*> kept;
  for (const RunEstimate& r : out.runs) {
    if (r.converged)
      kept.push_back(&r);
    else
      ++row.n_excluded;
    row.avg_joining_rate += r.joining_rate / n_runs;
    row.avg_switching_rate += r.switching_rate / n_runs;
  }

  const double L = static_cast<double>(kept.size());
  for (int i = 0; i < 4; ++i) {
    if (kept.empty()) {
      row.means[static_cast<std::size_t>(i)] = kNaN;
      row.stds[static_cast<std::size_t>(i)] = kNaN;
      continue;
    }
    double mean = 0.0;
    for (const RunEstimate* r : kept) mean += param_component(r->params_hat, i);
    mean /= L;
    double ss = 0.0;
    for (const RunEstimate* r : kept) {
      const double d = param_component(r->params_hat, i) - mean;
      ss += d * d;
    }
    row.means[static_cast<std::size_t>(i)] = mean;
    row.stds[static_cast<std::size_t>(i)] =
        kept.size() > 1 ? std::sqrt(ss / (L - 1.0)) : kNaN;
  }
  return out;
}

void write_replication_table(const std::vector<ReplicationRow>& rows,
                             const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "lambda1,lambda2,theta,c,service1,service2,k_target,n_runs,"
         "n_excluded,mean_lambda1,mean_lambda2,mean_theta,mean_c,"
         "std_lambda1,std_lambda2,std_theta,std_c,"
         "avg_joining_rate,avg_switching_rate\n";
  for (const ReplicationRow& r : rows) {
    out << format_double(r.true_params.lambda1) << ','
        << format_double(r.true_params.lambda2) << ','
        << format_double(r.true_params.theta) << ','
        << format_double(r.true_params.switch_cost) << ','
        << r.service1.describe() << ',' << r.service2.describe() << ','
        << r.k_target << ',' << r.n_runs << ',' << r.n_excluded;
    for (double m : r.means) out << ',' << format_double(m);
    for (double s : r.stds) out << ',' << format_double(s);
    out << ',' << format_double(r.avg_joining_rate) << ','
        << format_double(r.avg_switching_rate) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void histogram_report(const std::vector<RunEstimate>& runs,
                      const std::filesystem::path& out_dir) {
  if (runs.size() < 2)
    throw std::invalid_argument("histogram_report: need at least 2 runs");
  std::filesystem::create_directories(out_dir);

  {
    std::ofstream out = open_out(out_dir / "estimates.csv");
    out << "run,converged,lambda1,lambda2,theta,c,c_tilde,log_lik,"
           "joining_rate,switching_rate\n";
    for (const RunEstimate& r : runs) {
      out << r.run << ',' << (r.converged ? 1 : 0) << ','
          << format_double(r.params_hat.lambda1) << ','
          << format_double(r.params_hat.lambda2) << ','
          << format_double(r.params_hat.theta) << ','
          << format_double(r.params_hat.switch_cost) << ','
          << format_double(r.c_tilde) << ',' << format_double(r.log_lik) << ','
          << format_double(r.joining_rate) << ','
          << format_double(r.switching_rate) << '\n';
    }
    if (!out) throw std::runtime_error("failed writing estimates.csv");
  }

  const std::array<const char*, 4> names = {"lambda1", "lambda2", "theta", "c"};
  for (int i = 0; i < 4; ++i) {
    std::vector<double> values;
    for (const RunEstimate& r : runs)
      if (r.converged) values.push_back(param_component(r.params_hat, i));
    if (values.size() < 2) continue;

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (static_cast<double>(values.size()) - 1.0));

    const Histogram h = make_histogram(values);
    const std::string stem = std::string("hist_") + names[static_cast<std::size_t>(i)];

    std::ofstream csv = open_out(out_dir / (stem + ".csv"));
    if (h.degenerate)
      csv << "# degenerate: zero spread; normal overlay omitted\n";
    csv << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b)
      csv << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1])
          << ',' << h.counts[b] << '\n';
    if (!csv) throw std::runtime_error("failed writing " + stem + ".csv");

    SvgPlot plot(std::string(names[static_cast<std::size_t>(i)]) +
                     " estimates (" + std::to_string(values.size()) + " runs)",
                 names[static_cast<std::size_t>(i)], "runs per bin");
    const long max_count = *std::max_element(h.counts.begin(), h.counts.end());
    plot.set_x_range(h.edges.front(), h.edges.back());
    plot.set_y_range(0.0, static_cast<double>(max_count) * 1.15);
    for (std::size_t b = 0; b < h.counts.size(); ++b)
      plot.add_bar(h.edges[b], h.edges[b + 1],
                   static_cast<double>(h.counts[b]));
    if (!h.degenerate && sd > 0.0) {
      const double bin_width = h.edges[1] - h.edges[0];
      std::vector<std::pair<double, double>> curve;
      const int n_pts = 200;
      for (int p = 0; p <= n_pts; ++p) {
        const double x = h.edges.front() +
                         (h.edges.back() - h.edges.front()) * p / n_pts;
        curve.emplace_back(x, normal_pdf(x, mean, sd) * bin_width *
                                  static_cast<double>(values.size()));
      }
      plot.add_polyline(curve, "black", 2.0);
    }
    plot.write(out_dir / (stem + ".svg"));
  }
}

SweepResult throughput_sweep(double lambda_total, double grid_step,
                             const ValueDistribution& values,
                             double switch_cost, int k_target, int n_runs,
                             std::uint64_t master_seed, int jobs) {
  if (!(lambda_total > 0.0) || !(grid_step > 0.0))
    throw std::invalid_argument("throughput_sweep: bad grid");
  if (n_runs < 1) throw std::invalid_argument("throughput_sweep: n_runs < 1");

  const double lo = lambda_total / 2.0;
  const int n_points =
      static_cast<int>(std::round((lambda_total - lo) / grid_step)) + 1;

  SweepResult out;
  out.points.resize(static_cast<std::size_t>(n_points));
  const std::size_t n_tasks = static_cast<std::size_t>(n_points) *
                              static_cast<std::size_t>(n_runs);
  std::vector<double> one_each(n_tasks), both_at_1(n_tasks);

  // One task per (grid point, replication); both layouts share the seed so
  // the comparison is paired. Per-task slots keep the later reduction in a
  // fixed order regardless of scheduling.
  parallel_for(n_points * n_runs, jobs, [&](int task) {
    const int p = task / n_runs;
    const double lambda1 = std::min(lo + grid_step * p, lambda_total);
    const double lambda2 = lambda_total - lambda1;
    const std::uint64_t seed =
        Rng::substream_seed(master_seed, static_cast<std::uint64_t>(task));
    one_each[static_cast<std::size_t>(task)] = simulate_multiserver_throughput(
        ServerLayout::OneEach, lambda1, lambda2, values, switch_cost, k_target,
        seed);
    both_at_1[static_cast<std::size_t>(task)] =
        simulate_multiserver_throughput(ServerLayout::BothAtStation1, lambda1,
                                        lambda2, values, switch_cost, k_target,
                                        seed);
  });

  for (int p = 0; p < n_points; ++p) {
    SweepPoint& pt = out.points[static_cast<std::size_t>(p)];
    pt.lambda1 = std::min(lo + grid_step * p, lambda_total);
    double sum_one = 0.0, sum_both = 0.0;
    for (int run = 0; run < n_runs; ++run) {
      sum_one += one_each[static_cast<std::size_t>(p * n_runs + run)];
      sum_both += both_at_1[static_cast<std::size_t>(p * n_runs + run)];
    }
    pt.throughput_one_each = sum_one / n_runs;
    pt.throughput_both_at_1 = sum_both / n_runs;
  }

  out.crossover_lambda1 = kNaN;
  for (std::size_t p = 0; p + 1 < out.points.size(); ++p) {
    const double d0 = out.points[p].throughput_both_at_1 -
                      out.points[p].throughput_one_each;
    const double d1 = out.points[p + 1].throughput_both_at_1 -
                      out.points[p + 1].throughput_one_each;
    if (d0 <= 0.0 && d1 > 0.0) {
      const double frac = d0 == d1 ? 0.0 : -d0 / (d1 - d0);
      out.crossover_lambda1 =
          out.points[p].lambda1 +
          frac * (out.points[p + 1].lambda1 - out.points[p].lambda1);
      break;
    }
  }
  return out;
}

void write_sweep_report(const SweepResult& sweep,
                        const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out = open_out(out_dir / "sweep.csv");
    out << "lambda1,throughput_one_each,throughput_both_at_1\n";
    for (const SweepPoint& p : sweep.points)
      out << format_double(p.lambda1) << ','
          << format_double(p.throughput_one_each) << ','
          << format_double(p.throughput_both_at_1) << '\n';
    out << "# crossover_lambda1," << format_double(sweep.crossover_lambda1)
        << '\n';
    if (!out) throw std::runtime_error("failed writing sweep.csv");
  }

  double y_lo = 1e300, y_hi = -1e300;
  std::vector<std::pair<double, double>> one, both;
  for (const SweepPoint& p : sweep.points) {
    one.emplace_back(p.lambda1, p.throughput_one_each);
    both.emplace_back(p.lambda1, p.throughput_both_at_1);
    y_lo = std::min({y_lo, p.throughput_one_each, p.throughput_both_at_1});
    y_hi = std::max({y_hi, p.throughput_one_each, p.throughput_both_at_1});
  }
  SvgPlot plot("Mean throughput per unit time", "lambda1", "throughput");
  plot.set_x_range(sweep.points.front().lambda1, sweep.points.back().lambda1);
  plot.set_y_range(y_lo - 0.05 * (y_hi - y_lo), y_hi + 0.1 * (y_hi - y_lo));
  plot.add_polyline(one, "steelblue", 2.0);
  plot.add_polyline(both, "darkorange", 2.0);
  plot.add_legend({{"one server each", "steelblue"},
                   {"both at station 1", "darkorange"}});
  plot.write(out_dir / "sweep.svg");
}

}  // namespace twostation

#include "twostation/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twostation {

NelderMeadResult nelder_mead_minimize(
    const std::function<double(const std::vector<double>&)>& objective,
    std::vector<double> start, const NelderMeadOptions& options) {
  const std::size_t n = start.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty start point");
  if (options.max_evals < static_cast<int>(n) + 1)
    throw std::invalid_argument("nelder_mead: eval budget below simplex size");

  NelderMeadResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.n_evals;
    const double f = objective(x);
    return std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
  };

  std::vector<std::vector<double>> xs(n + 1, start);
  std::vector<double> fs(n + 1);
  for (std::size_t j = 1; j <= n; ++j) xs[j][j - 1] += options.initial_step;
  for (std::size_t j = 0; j <= n; ++j) fs[j] = eval(xs[j]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);

  while (result.n_evals < options.max_evals) {
    for (std::size_t j = 0; j <= n; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });

    const std::size_t best = order[0], worst = order[n], second = order[n - 1];
    if (std::isfinite(fs[worst]) && fs[worst] - fs[best] <= options.tolerance) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t j = 0; j <= n; ++j) {
      if (j == worst) continue;
      for (std::size_t i = 0; i < n; ++i) centroid[i] += xs[j][i];
    }
    for (double& ci : centroid) ci /= static_cast<double>(n);

    for (std::size_t i = 0; i < n; ++i)
      xr[i] = centroid[i] + (centroid[i] - xs[worst][i]);
    const double fr = eval(xr);

    if (fr < fs[best]) {
      for (std::size_t i = 0; i < n; ++i)
        xe[i] = centroid[i] + 2.0 * (xr[i] - centroid[i]);
      const double fe = eval(xe);
      if (fe < fr) {
        xs[worst] = xe;
        fs[worst] = fe;
      } else {
        xs[worst] = xr;
        fs[worst] = fr;
      }
    } else if (fr < fs[second]) {
      xs[worst] = xr;
      fs[worst] = fr;
    } else {
      const bool outside = fr < fs[worst];
      const std::vector<double>& base = outside ? xr : xs[worst];
      for (std::size_t i = 0; i < n; ++i)
        xc[i] = centroid[i] + 0.5 * (base[i] - centroid[i]);
      const double fc = eval(xc);
      if (fc < (outside ? fr : fs[worst])) {
        xs[worst] = xc;
        fs[worst] = fc;
      } else {
        for (std::size_t j = 0; j <= n; ++j) {
          if (j == best) continue;
          for (std::size_t i = 0; i < n; ++i)
            xs[j][i] = xs[best][i] + 0.5 * (xs[j][i] - xs[best][i]);
          fs[j] = eval(xs[j]);
        }
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t j = 1; j <= n; ++j)
    if (fs[j] < fs[best]) best = j;
  result.x = xs[best];
  result.fx = fs[best];
  return result;
}

}  // namespace twostation

#pragma once

#include <functional>
#include <vector>

namespace twostation {

struct NelderMeadOptions {
  int max_evals = 20000;
  double tolerance = 1e-8;    // convergence on the simplex value spread
  double initial_step = 0.3;  // per-axis offset building the first simplex
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0.0;
  int n_evals = 0;
  bool converged = false;
};

// Downhill simplex minimization (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5). The objective may return +infinity; such vertices are ordered
// worst and the spread criterion only fires once the whole simplex is finite.
NelderMeadResult nelder_mead_minimize(
    const std::function<double(const std::vector<double>&)>& objective,
    std::vector<double> start, const NelderMeadOptions& options = {});

}  // namespace twostation

#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twostation {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // accumulated Richardson estimate
  bool converged = true;
  long n_evals = 0;
};

struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_error(achieved) {}
  double achieved_error;
};

// Adaptive Simpson on [lo, hi] to an absolute tolerance.
QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                           double hi, double abs_tol = 1e-10,
                           int max_depth = 48);

// Same, splitting first at interior breakpoints (integrand kinks). Points
// outside (lo, hi) are ignored.
QuadratureResult integrate_piecewise(const std::function<double(double)>& f,
                                     double lo, double hi,
                                     std::vector<double> breakpoints,
                                     double abs_tol = 1e-10);

}  // namespace twostation

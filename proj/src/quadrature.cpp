#include "twostation/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace twostation {

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  double abs_tol;
  int max_depth;
  double error = 0.0;
  bool converged = true;
  long n_evals = 0;

  double eval(double x) {
    ++n_evals;
    return f(x);
  }

  double recurse(double a, double b, double fa, double fm, double fb,
                 double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth >= max_depth) {
      converged = false;
      error += std::abs(delta);
      return left + right + delta / 15.0;
    }
    if (std::abs(delta) <= 15.0 * tol) {
      error += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                           double hi, double abs_tol, int max_depth) {
  QuadratureResult out;
  if (!(hi > lo)) return out;
  SimpsonState st{f, abs_tol, max_depth};
  const double fa = st.eval(lo);
  const double m = 0.5 * (lo + hi);
  const double fm = st.eval(m);
  const double fb = st.eval(hi);
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  out.value = st.recurse(lo, hi, fa, fm, fb, whole, abs_tol, 0);
  out.error_estimate = st.error;
  out.converged = st.converged;
  out.n_evals = st.n_evals;
  return out;
}

QuadratureResult integrate_piecewise(const std::function<double(double)>& f,
                                     double lo, double hi,
                                     std::vector<double> breakpoints,
                                     double abs_tol) {
  std::vector<double> cuts;
  cuts.push_back(lo);
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double b : breakpoints) {
    if (b > lo && b < hi && (cuts.empty() || b > cuts.back())) cuts.push_back(b);
  }
  cuts.push_back(hi);

  QuadratureResult out;
  const double piece_tol = abs_tol / static_cast<double>(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    QuadratureResult piece = integrate(f, cuts[i], cuts[i + 1], piece_tol);
    out.value += piece.value;
    out.error_estimate += piece.error_estimate;
    out.converged = out.converged && piece.converged;
    out.n_evals += piece.n_evals;
  }
  return out;
}

}  // namespace twostation

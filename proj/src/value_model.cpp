#include "twostation/value_model.hpp"

#include <cmath>

#include "twostation/quadrature.hpp"

namespace twostation {

namespace {

void require_finite_positive(double v, const char* name) {
  if (!(std::isfinite(v) && v > 0.0))
    throw std::invalid_argument(std::string(name) + " must be finite and > 0");
}

void require_unit_open(double u) {
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("uniform variate must lie in (0,1)");
}

// integral of w^{-theta} dw over [A, B], 1 <= A <= B. Written through expm1
// so it stays exact as theta -> 1, where the power antiderivative would
// divide by theta - 1; the limit is log(B / A).
double power_integral(double A, double B, double theta) {
  const double eps = 1.0 - theta;
  const double lr = std::log(A / B);  // <= 0
  const double x = eps * lr;
  const double scale = std::pow(B, eps);
  if (x == 0.0) return -lr * scale;
  return scale * std::expm1(x) * (-lr / x);
}

}  // namespace

void ModelParams::validate() const {
  require_finite_positive(lambda1, "lambda1");
  require_finite_positive(lambda2, "lambda2");
  require_finite_positive(theta, "theta");
  if (!(std::isfinite(switch_cost) && switch_cost >= 0.0))
    throw std::invalid_argument("switch_cost must be finite and >= 0");
}

bool ModelParams::is_valid() const {
  try {
    validate();
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

double ValueDistribution::log_tail(double x) const { return std::log(tail(x)); }

double ValueDistribution::tail_integral(double v, double a) const {
  if (!(v >= 0.0)) throw std::domain_error("tail_integral: v must be >= 0");
  if (!(a >= 0.0)) throw std::domain_error("tail_integral: a must be >= 0");
  if (a == 0.0) return 0.0;
  return integrate_piecewise([this, v](double u) { return tail(v - u); }, 0.0,
                             a, {v}, 1e-12)
      .value;
}

double ValueDistribution::shifted_tail_integral(double v, double a,
                                                double c) const {
  if (!(v >= 0.0 && a >= 0.0 && c >= 0.0))
    throw std::domain_error("shifted_tail_integral: negative input");
  if (a == 0.0) return 0.0;
  return integrate_piecewise(
             [this, v, c](double u) { return tail(std::max(v - u, 0.0) + c); },
             0.0, a, {v}, 1e-12)
      .value;
}

ParetoValue::ParetoValue(double theta) : theta_(theta) {
  require_finite_positive(theta, "theta");
}

double ParetoValue::tail(double x) const {
  if (x <= 0.0) return 1.0;
  return std::exp(-theta_ * std::log1p(x));
}

double ParetoValue::log_tail(double x) const {
  if (x <= 0.0) return 0.0;
  return -theta_ * std::log1p(x);
}

double ParetoValue::tail_integral(double v, double a) const {
  if (!(v >= 0.0)) throw std::domain_error("tail_integral: v must be >= 0");
  if (!(a >= 0.0)) throw std::domain_error("tail_integral: a must be >= 0");
  const double m = std::min(a, v);
  double r = power_integral(1.0 + v - m, 1.0 + v, theta_);
  if (a > v) r += a - v;  // integrand is 1 once the argument turns negative
  return r;
}

double ParetoValue::shifted_tail_integral(double v, double a, double c) const {
  if (!(v >= 0.0 && a >= 0.0 && c >= 0.0))
    throw std::domain_error("shifted_tail_integral: negative input");
  const double m = std::min(a, v);
  double r = power_integral(1.0 + v + c - m, 1.0 + v + c, theta_);
  if (a > v) r += (a - v) * tail(c);
  return r;
}

double ParetoValue::sample(double u) const {
  require_unit_open(u);
  // P(R > x) = (1 + x)^{-theta}  =>  R = u^{-1/theta} - 1
  return std::expm1(-std::log(u) / theta_);
}

ServiceDistribution ServiceDistribution::exponential(double beta) {
  require_finite_positive(beta, "beta");
  return {Kind::Exponential, beta};
}

ServiceDistribution ServiceDistribution::pareto(double beta) {
  require_finite_positive(beta, "beta");
  return {Kind::Pareto, beta};
}

double ServiceDistribution::cdf(double x) const {
  if (x < 0.0) return 0.0;
  switch (kind) {
    case Kind::Exponential:
      return -std::expm1(-beta * x);
    case Kind::Pareto:
      return -std::expm1(-beta * std::log1p(x));
  }
  return 0.0;
}

double ServiceDistribution::sample(double u) const {
  require_unit_open(u);
  switch (kind) {
    case Kind::Exponential:
      return -std::log1p(-u) / beta;
    case Kind::Pareto:
      return std::expm1(-std::log1p(-u) / beta);
  }
  return 0.0;
}

std::string ServiceDistribution::describe() const {
  const char* name = kind == Kind::Exponential ? "exponential" : "pareto";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s(%g)", name, beta);
  return buf;
}

Decision decide(double v_local, double v_other, double switch_cost,
                double value) {
  const double other_cost = v_other + switch_cost;
  if (v_local <= other_cost)
    return v_local < value ? Decision::JoinLocal : Decision::Balk;
  return other_cost < value ? Decision::SwitchToOther : Decision::Balk;
}

}  // namespace twostation

#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace twostation {

// The estimable quadruple: regional arrival rates, value-tail exponent,
// and the cost of joining the station a customer did not arrive at.
struct ModelParams {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double theta = 1.0;
  double switch_cost = 0.5;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
  bool is_valid() const;
};

// Perceived-value distribution. tail(x) = P(R > x) is the probability that
// a customer facing total joining cost x joins; it is 1 for x <= 0, so a
// customer who can join at no cost always does.
class ValueDistribution {
 public:
  virtual ~ValueDistribution() = default;

  virtual double tail(double x) const = 0;
  virtual double log_tail(double x) const;

  // integral of tail(v - u) du over u in [0, a].
  virtual double tail_integral(double v, double a) const;

  // integral of tail((v - u)^+ + c) du over u in [0, a].
  virtual double shifted_tail_integral(double v, double a, double c) const;

  // Inverse-transform sample from u in (0,1).
  virtual double sample(double u) const = 0;
};

// tail(x) = (1 + x)^{-theta} for x >= 0. Both tail integrals have closed
// forms; the antiderivative is evaluated through expm1 so the theta -> 1
// limit (where the generic form divides by theta - 1) is exact.
class ParetoValue final : public ValueDistribution {
 public:
  explicit ParetoValue(double theta);

  double tail(double x) const override;
  double log_tail(double x) const override;
  double tail_integral(double v, double a) const override;
  double shifted_tail_integral(double v, double a, double c) const override;
  double sample(double u) const override;

  double theta() const { return theta_; }

 private:
  double theta_;
};

struct ServiceDistribution {
  enum class Kind { Exponential, Pareto };

  Kind kind = Kind::Exponential;
  double beta = 1.0;

  static ServiceDistribution exponential(double beta);
  static ServiceDistribution pareto(double beta);

  double cdf(double x) const;
  double sample(double u) const;  // inverse transform, u in (0,1)
  std::string describe() const;   // e.g. "exponential(1)"
};

enum class Decision { JoinLocal, SwitchToOther, Balk };

// Per-customer choice given the workload at the arrival station, the
// workload at the other station, and the perceived service value. The three
// outcomes partition the input space; ties between the two stations go to
// the local one, and a customer indifferent between cost and value balks.
// Workloads may be +infinity (a station with no servers).
Decision decide(double v_local, double v_other, double switch_cost,
                double value);

}  // namespace twostation

#pragma once

#include <vector>

namespace rmt {

/// A distribution function on the real line: nondecreasing, right-continuous,
/// with limits 0 and 1. Implementations expose their atoms so that distance
/// computations can locate every discontinuity exactly; between atoms the
/// function must be continuous.
class DistributionFunction {
 public:
  virtual ~DistributionFunction() = default;

  virtual double cdf(double x) const = 0;

  /// lim_{y -> x-} F(y).
  virtual double cdf_left(double x) const = 0;

  /// Points carrying positive mass, ascending. Empty for continuous laws.
  virtual std::vector<double> atoms() const = 0;
};

/// Standard normal distribution function via erfc.
double normal_cdf(double x) noexcept;

class StandardNormal final : public DistributionFunction {
 public:
  double cdf(double x) const override { return normal_cdf(x); }
  double cdf_left(double x) const override { return normal_cdf(x); }
  std::vector<double> atoms() const override { return {}; }
};

}  // namespace rmt

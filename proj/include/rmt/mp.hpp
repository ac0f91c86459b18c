#pragma once

#include <utility>
#include <vector>

#include "rmt/distribution.hpp"

namespace rmt {

/// Marchenko-Pastur law with index q = T/N and scale sigma2.
struct MpParams {
  double q = 1.0;
  double sigma2 = 1.0;

  /// Throws InvalidArgument unless q > 0 and sigma2 > 0 (both finite).
  void validate() const;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// [sigma2 (1 - sqrt(1/q))^2, sigma2 (1 + sqrt(1/q))^2].
Interval mp_support(const MpParams& params);

/// Continuous part of the density. The q < 1 atom at zero is not included.
double mp_pdf(const MpParams& params, double x);

/// max(1 - q, 0).
double mp_mass_at_zero(const MpParams& params);

/// Distribution function, atom included. Evaluated by adaptive
/// Gauss-Kronrod quadrature of the density after the substitution
/// x = c - r cos(theta), which removes both square-root edge singularities.
double mp_cdf(const MpParams& params, double x);

/// Evenly spaced (x, pdf, cdf) samples over [0.9 lower, 1.1 upper].
struct MpCurvePoint {
  double x;
  double pdf;
  double cdf;
};
std::vector<MpCurvePoint> mp_curve(const MpParams& params, std::size_t points);

class MarchenkoPastur final : public DistributionFunction {
 public:
  explicit MarchenkoPastur(MpParams params);

  double cdf(double x) const override;
  double cdf_left(double x) const override;
  std::vector<double> atoms() const override;

  const MpParams& params() const noexcept { return params_; }

 private:
  MpParams params_;
};

}  // namespace rmt

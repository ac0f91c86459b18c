#include "rmt/mp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rmt/error.hpp"

namespace rmt {

namespace {

constexpr double kQuadratureTol = 1e-12;
constexpr unsigned kQuadratureDepth = 15;

void require_finite_x(double x) {
  if (std::isnan(x)) {
    throw Error(ErrorKind::InvalidArgument, "Marchenko-Pastur evaluation at NaN");
  }
}

// Distribution function of MP_q (unit scale).
double unit_cdf(double q, double x) {
  const double atom = std::max(1.0 - q, 0.0);
  if (x < 0.0) return 0.0;
  const double s = std::sqrt(1.0 / q);
  const double a = (1.0 - s) * (1.0 - s);
  const double b = (1.0 + s) * (1.0 + s);
  if (x < a) return atom;
  if (x >= b) return 1.0;

  // x = c - r cos(theta): sqrt((b - x)(x - a)) dx = r^2 sin^2(theta) dtheta,
  // and x = a + 2 r sin^2(theta / 2) stays accurate near theta = 0 when a = 0.
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const double theta_max = std::acos(std::clamp((c - x) / r, -1.0, 1.0));
  const double coeff = q * r * r / (2.0 * std::numbers::pi);
  auto integrand = [&](double theta) {
    const double half = std::sin(0.5 * theta);
    const double u = a + 2.0 * r * half * half;
    const double sn = std::sin(theta);
    return coeff * sn * sn / u;
  };
  double error = 0.0;
  const double mass = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, theta_max, kQuadratureDepth, kQuadratureTol, &error);
  return std::clamp(atom + mass, 0.0, 1.0);
}

}  // namespace

void MpParams::validate() const {
  if (!(q > 0.0) || !std::isfinite(q) || !(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw Error(ErrorKind::InvalidArgument,
                "Marchenko-Pastur parameters need q > 0 and sigma2 > 0, got q=" +
                    std::to_string(q) + " sigma2=" + std::to_string(sigma2));
  }
}

Interval mp_support(const MpParams& params) {
  params.validate();
  const double s = std::sqrt(1.0 / params.q);
  return {params.sigma2 * (1.0 - s) * (1.0 - s), params.sigma2 * (1.0 + s) * (1.0 + s)};
}

double mp_pdf(const MpParams& params, double x) {
  require_finite_x(x);
  const auto [lower, upper] = mp_support(params);
  if (x <= 0.0 || x <= lower || x >= upper) return 0.0;
  return params.q / (2.0 * std::numbers::pi * params.sigma2 * x) *
         std::sqrt((upper - x) * (x - lower));
}

double mp_mass_at_zero(const MpParams& params) {
  params.validate();
  return std::max(1.0 - params.q, 0.0);
}

double mp_cdf(const MpParams& params, double x) {
  require_finite_x(x);
  params.validate();
  return unit_cdf(params.q, x / params.sigma2);
}

std::vector<MpCurvePoint> mp_curve(const MpParams& params, std::size_t points) {
  if (points == 0) {
    throw Error(ErrorKind::InvalidArgument, "mp_curve needs at least one point");
  }
  const auto [lower, upper] = mp_support(params);
  const double lo = 0.9 * lower;
  const double hi = 1.1 * upper;
  std::vector<MpCurvePoint> out;
  out.reserve(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double x =
        points == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    out.push_back({x, mp_pdf(params, x), mp_cdf(params, x)});
  }
  return out;
}

MarchenkoPastur::MarchenkoPastur(MpParams params) : params_(params) { params_.validate(); }

double MarchenkoPastur::cdf(double x) const { return mp_cdf(params_, x); }

double MarchenkoPastur::cdf_left(double x) const {
  // The only discontinuity is the q < 1 atom at the origin.
  if (x == 0.0) return 0.0;
  return mp_cdf(params_, x);
}

std::vector<double> MarchenkoPastur::atoms() const {
  if (params_.q < 1.0) return {0.0};
  return {};
}

}  // namespace rmt

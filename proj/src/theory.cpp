#include "rmt/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rmt/error.hpp"

namespace rmt {

namespace {

constexpr double kPowerTol = 1e-12;
constexpr std::size_t kPowerMaxIter = 2000;

}  // namespace

double rho_from_correlation(const Matrix& c) {
  const double n = static_cast<double>(c.rows());
  return std::clamp(top_eigenvalue(c, kPowerTol, kPowerMaxIter) / n, 0.0, 1.0);
}

double estimate_rho(const DataMatrix& x) { return rho_from_correlation(correlation(x)); }

MpParams fitted_mp(std::size_t n, std::size_t t, double lambda1_over_n) {
  const double scale = 1.0 - lambda1_over_n;
  if (!(scale > 0.0)) {
    throw Error(ErrorKind::DegenerateScale,
                "fitted Marchenko-Pastur scale 1 - lambda1/N = " + std::to_string(scale) +
                    " is not positive");
  }
  return {static_cast<double>(t) / static_cast<double>(n), scale};
}

MpParams fitted_mp(const DataMatrix& x) { return fitted_mp(x.n(), x.t(), estimate_rho(x)); }

std::vector<double> positive_grid(double hi, std::size_t points) {
  if (!(hi > 0.0) || points == 0) {
    throw Error(ErrorKind::InvalidArgument, "positive grid needs hi > 0 and points >= 1");
  }
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = hi * static_cast<double>(k + 1) / static_cast<double>(points);
  }
  return grid;
}

double scaling_residual(const DataMatrix& x, std::span<const double> grid) {
  const std::vector<double> eigs = eigenvalues_sym(correlation(x));
  const Esd spectrum(eigs);
  const double n = static_cast<double>(x.n());
  const MpParams fit = fitted_mp(x.n(), x.t(), std::clamp(eigs.front() / n, 0.0, 1.0));
  double worst = 0.0;
  for (double g : grid) {
    if (std::abs(g) < 1e-6) continue;  // the statement excludes the origin
    worst = std::max(worst, std::abs(spectrum.cdf(g) - mp_cdf(fit, g)));
  }
  return worst;
}

CltParams clt_params(std::size_t n, std::size_t t, double rho) {
  if (!(rho > 0.0)) {
    throw Error(ErrorKind::RhoZero, "CLT normalization needs rho > 0, got " + std::to_string(rho));
  }
  if (!(rho < 1.0) || n < 1 || t < 1) {
    throw Error(ErrorKind::InvalidArgument, "CLT normalization needs rho < 1 and n, t >= 1");
  }
  const double nn = static_cast<double>(n);
  const double tt = static_cast<double>(t);
  const double spike = (nn - 1.0) * rho + 1.0;
  const double tau = spike * ((1.0 + (tt - 1.0) * nn) * rho + nn - 1.0) / (nn * tt * rho);
  return {tau, spike * std::sqrt(2.0 / tt)};
}

CltCenter clt_center_general(std::span<const double> population_eigs, std::size_t t) {
  if (population_eigs.empty() || t == 0) {
    throw Error(ErrorKind::InvalidArgument, "CLT centering needs eigenvalues and t >= 1");
  }
  if (!std::is_sorted(population_eigs.rbegin(), population_eigs.rend())) {
    throw Error(ErrorKind::InvalidArgument, "population eigenvalues must be nonincreasing");
  }
  const double top = population_eigs.front();
  if (population_eigs.size() > 1 && !(top > population_eigs[1])) {
    throw Error(ErrorKind::NoSpectralGap, "lambda_1 must exceed lambda_2");
  }
  double sum = 0.0;
  for (std::size_t k = 1; k < population_eigs.size(); ++k) {
    sum += population_eigs[k] / (top - population_eigs[k]);
  }
  const double tt = static_cast<double>(t);
  return {1.0 + sum / tt, std::sqrt(2.0 / tt)};
}

std::vector<double> normalize_lambda1(std::span<const double> lambda1_samples,
                                      const CltParams& params) {
  if (!(params.varsigma > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "normalization scale must be positive");
  }
  std::vector<double> out;
  out.reserve(lambda1_samples.size());
  for (double l : lambda1_samples) out.push_back((l - params.tau) / params.varsigma);
  return out;
}

double ks_normal(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "Kolmogorov-Smirnov statistic needs >= 2 samples");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double phi = normal_cdf(sorted[i]);
    d = std::max(d, static_cast<double>(i + 1) / n - phi);
    d = std::max(d, phi - static_cast<double>(i) / n);
  }
  return d;
}

std::string_view to_string(BbpRegime regime) noexcept {
  switch (regime) {
    case BbpRegime::Subcritical: return "subcritical";
    case BbpRegime::Critical: return "critical";
    case BbpRegime::Supercritical: return "supercritical";
  }
  return "critical";
}

BbpReport bbp_supercritical_normalization(double spike, double q, std::size_t t,
                                          DataField field) {
  const double inv_q = 1.0 / q;
  const double center = spike + inv_q * spike / (spike - 1.0);
  const double radicand = spike * spike - inv_q * spike * spike / ((spike - 1.0) * (spike - 1.0));
  if (!(radicand > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "spike is not above the phase-transition threshold");
  }
  const double field_factor = field == DataField::Real ? std::sqrt(2.0) : 1.0;
  return {BbpRegime::Supercritical, center,
          field_factor * std::sqrt(radicand) / std::sqrt(static_cast<double>(t))};
}

BbpReport bbp_subcritical_normalization(double q, std::size_t t) {
  const double edge = (1.0 + std::sqrt(1.0 / q)) * (1.0 + std::sqrt(1.0 / q));
  const double scale = std::pow(1.0 + std::sqrt(q), 4.0 / 3.0) /
                       (std::sqrt(q) * std::pow(static_cast<double>(t), 2.0 / 3.0));
  return {BbpRegime::Subcritical, edge, scale};
}

BbpReport bbp_classify(double spike, double q, std::size_t t, DataField field) {
  if (!(q > 1.0) || !std::isfinite(q)) {
    throw Error(ErrorKind::InvalidQ, "phase-transition classification needs q > 1, got " +
                                         std::to_string(q));
  }
  if (!(spike > 1.0) || t == 0) {
    throw Error(ErrorKind::InvalidArgument, "phase-transition classification needs spike > 1");
  }
  const double threshold = 1.0 + 1.0 / std::sqrt(q);
  if (spike > threshold) return bbp_supercritical_normalization(spike, q, t, field);
  if (spike < threshold) return bbp_subcritical_normalization(q, t);
  const double edge = (1.0 + std::sqrt(1.0 / q)) * (1.0 + std::sqrt(1.0 / q));
  return {BbpRegime::Critical, edge, 0.0};
}

ClipReport clip_eigenvalues_report(const Matrix& c, std::size_t t) {
  const EigenDecomposition eig = eigen_sym(c);
  const auto n = static_cast<std::size_t>(c.rows());
  const double lambda1 = eig.values[0];
  const MpParams fit = fitted_mp(n, t, std::clamp(lambda1 / static_cast<double>(n), 0.0, 1.0));
  const Interval bulk = mp_support(fit);

  Vector values = eig.values;
  std::vector<Eigen::Index> inside;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values[k] >= bulk.lower && values[k] <= bulk.upper) {
      inside.push_back(k);
      sum += values[k];
    }
  }
  if (inside.empty()) return {c, 0, 0.0, fit};

  const double average = sum / static_cast<double>(inside.size());
  for (Eigen::Index k : inside) values[k] = average;
  Matrix cleaned = eig.vectors * values.asDiagonal() * eig.vectors.transpose();
  cleaned = 0.5 * (cleaned + cleaned.transpose()).eval();
  return {cleaned, inside.size(), average, fit};
}

Matrix clip_eigenvalues(const Matrix& c, std::size_t t) {
  return clip_eigenvalues_report(c, t).cleaned;
}

}  // namespace rmt

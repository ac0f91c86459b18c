#include "rmt/models.hpp"

#include <cmath>

#include "rmt/error.hpp"

namespace rmt {

namespace {

void require_shape(std::size_t n, std::size_t t) {
  if (n < 1 || t < 2) {
    throw Error(ErrorKind::InvalidArgument, "sampling needs n >= 1 and t >= 2, got n=" +
                                                std::to_string(n) + " t=" + std::to_string(t));
  }
}

double squared_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

void EquiCorrSpec::validate(std::size_t n) const {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "equi-correlation needs 0 <= rho < 1, got " +
                                                std::to_string(rho));
  }
  if (!mu.empty() && mu.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "mu has " + std::to_string(mu.size()) +
                                                " entries for n=" + std::to_string(n));
  }
  if (!delta.empty() && delta.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "delta has " + std::to_string(delta.size()) +
                                                " entries for n=" + std::to_string(n));
  }
  for (double d : delta) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw Error(ErrorKind::InvalidArgument, "delta entries must be positive");
    }
  }
}

LoadingRule LoadingRule::constant(std::vector<double> limit) {
  LoadingRule rule;
  rule.limit = limit;
  rule.loading = [limit](std::size_t) { return limit; };
  return rule;
}

LoadingRule LoadingRule::harmonic(std::vector<double> limit, std::vector<double> perturbation) {
  if (perturbation.size() != limit.size()) {
    throw Error(ErrorKind::InvalidArgument, "loading perturbation and limit differ in length");
  }
  LoadingRule rule;
  rule.limit = limit;
  rule.loading = [limit, perturbation](std::size_t i) {
    std::vector<double> l = limit;
    for (std::size_t k = 0; k < l.size(); ++k) l[k] += perturbation[k] / static_cast<double>(i);
    return l;
  };
  return rule;
}

void FactorModelSpec::validate() const {
  if (!(psi1 > 0.0) || !std::isfinite(psi1)) {
    throw Error(ErrorKind::InvalidArgument, "psi1 must be positive");
  }
  if (loadings.limit.size() != k) {
    throw Error(ErrorKind::InvalidArgument, "loading limit has " +
                                                std::to_string(loadings.limit.size()) +
                                                " entries for k=" + std::to_string(k));
  }
  if (k > 0 && !loadings.loading) {
    throw Error(ErrorKind::InvalidArgument, "factor model without a loading rule");
  }
  for (double l : loadings.limit) {
    if (!std::isfinite(l)) throw Error(ErrorKind::InvalidArgument, "loading limit is not finite");
  }
}

DataMatrix sample_equicorr(const EquiCorrSpec& spec, std::size_t n, std::size_t t,
                           std::uint64_t seed) {
  require_shape(n, t);
  spec.validate(n);
  const double common = std::sqrt(spec.rho);
  const double specific = std::sqrt(1.0 - spec.rho);
  Rng rng(seed);
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
  for (std::size_t col = 0; col < t; ++col) {
    const double f = rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
      const double z = common * f + specific * rng.normal();
      const double scale = spec.delta.empty() ? 1.0 : spec.delta[i];
      const double shift = spec.mu.empty() ? 0.0 : spec.mu[i];
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) = shift + scale * z;
    }
  }
  return DataMatrix(std::move(x));
}

DataMatrix sample_factor(const FactorModelSpec& spec, std::size_t n, std::size_t t,
                         std::uint64_t seed) {
  require_shape(n, t);
  spec.validate();
  // Loadings and means are fixed per variable; evaluate them once.
  std::vector<std::vector<double>> loadings(n);
  std::vector<double> means(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.k > 0) {
      loadings[i] = spec.loadings.loading(i + 1);
      if (loadings[i].size() != spec.k) {
        throw Error(ErrorKind::InvalidArgument, "loading rule returned a vector of wrong length");
      }
    }
    if (spec.mean) means[i] = spec.mean(i + 1);
  }
  const double idio_scale = std::sqrt(spec.psi1);
  Rng rng(seed);
  std::vector<double> f(spec.k);
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
  for (std::size_t col = 0; col < t; ++col) {
    for (double& fk : f) fk = rng.draw(spec.factor_dist);
    for (std::size_t i = 0; i < n; ++i) {
      double common = 0.0;
      for (std::size_t k = 0; k < spec.k; ++k) common += loadings[i][k] * f[k];
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) =
          means[i] + common + idio_scale * rng.draw(spec.idio_dist);
    }
  }
  return DataMatrix(std::move(x));
}

LimitingParams limiting_params(const FactorModelSpec& spec) {
  spec.validate();
  const double common = squared_norm(spec.loadings.limit);
  const double total = common + spec.psi1;
  return {total, common / total};
}

Matrix population_equicorr(std::size_t n, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "equi-correlation needs 0 <= rho < 1");
  }
  const auto size = static_cast<Eigen::Index>(n);
  Matrix sigma = Matrix::Constant(size, size, rho);
  sigma.diagonal().setOnes();
  return sigma;
}

FactorModelSpec equicorr_as_factor(double rho) {
  FactorModelSpec spec;
  spec.k = 1;
  spec.loadings = LoadingRule::constant({std::sqrt(rho)});
  spec.psi1 = 1.0 - rho;
  return spec;
}

VariateKind parse_variate_kind(std::string_view name) {
  if (name == "normal") return VariateKind::Normal;
  if (name == "uniform") return VariateKind::Uniform;
  if (name == "rademacher") return VariateKind::Rademacher;
  throw Error(ErrorKind::InvalidArgument, "unknown distribution tag '" + std::string(name) + "'");
}

std::string_view to_string(VariateKind kind) noexcept {
  switch (kind) {
    case VariateKind::Normal: return "normal";
    case VariateKind::Uniform: return "uniform";
    case VariateKind::Rademacher: return "rademacher";
  }
  return "normal";
}

}  // namespace rmt

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rmt/rng.hpp"
#include "rmt/spectra.hpp"

namespace rmt {

/// Normal population with correlation matrix Sigma_rho, mean mu and
/// diagonal scaling delta: x_it = mu_i + delta_i (sqrt(rho) f_t + sqrt(1 - rho) e_it).
/// Empty mu / delta mean 0 / 1 for every variable.
struct EquiCorrSpec {
  double rho = 0.0;
  std::vector<double> mu;
  std::vector<double> delta;

  void validate(std::size_t n) const;
};

/// Loadings l_i as a pure function of the (1-based) variable index, with the
/// declared entrywise limit l = lim l_i.
struct LoadingRule {
  std::function<std::vector<double>(std::size_t)> loading;
  std::vector<double> limit;

  /// l_i = limit for every i.
  static LoadingRule constant(std::vector<double> limit);
  /// l_i = limit + perturbation / i.
  static LoadingRule harmonic(std::vector<double> limit, std::vector<double> perturbation);
};

/// K-factor model x_it = mu_i + l_i f_t + e_it with i.i.d. idiosyncratic
/// components of common variance psi1.
struct FactorModelSpec {
  std::size_t k = 0;
  LoadingRule loadings = LoadingRule::constant({});
  std::function<double(std::size_t)> mean;  ///< empty means mu_i = 0
  double psi1 = 1.0;
  VariateKind factor_dist = VariateKind::Normal;
  VariateKind idio_dist = VariateKind::Normal;

  void validate() const;
};

struct LimitingParams {
  double sigma_inf2;
  double rho;
};

DataMatrix sample_equicorr(const EquiCorrSpec& spec, std::size_t n, std::size_t t,
                           std::uint64_t seed);

DataMatrix sample_factor(const FactorModelSpec& spec, std::size_t n, std::size_t t,
                         std::uint64_t seed);

/// (||l||^2 + psi1, ||l||^2 / (||l||^2 + psi1)) from the declared limit.
LimitingParams limiting_params(const FactorModelSpec& spec);

/// Sigma_rho: unit diagonal, every off-diagonal entry rho.
Matrix population_equicorr(std::size_t n, double rho);

/// The one-factor instance equivalent to sample_equicorr(rho) with mu = 0,
/// delta = 1: K = 1, l_i = sqrt(rho), psi1 = 1 - rho, normal variates.
FactorModelSpec equicorr_as_factor(double rho);

VariateKind parse_variate_kind(std::string_view name);
std::string_view to_string(VariateKind kind) noexcept;

}  // namespace rmt

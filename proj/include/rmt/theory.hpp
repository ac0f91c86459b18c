#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "rmt/mp.hpp"
#include "rmt/spectra.hpp"

namespace rmt {

/// lambda_1(C) / N. Power iteration with eigensolver fallback; clamped to
/// [0, 1] against roundoff.
double estimate_rho(const DataMatrix& x);

/// Same statistic from an already-formed correlation matrix.
double rho_from_correlation(const Matrix& c);

/// MP law with index t/n and scale 1 - lambda_1(C)/n. Throws DegenerateScale
/// when the scale is not positive.
MpParams fitted_mp(const DataMatrix& x);
MpParams fitted_mp(std::size_t n, std::size_t t, double lambda1_over_n);

/// max over the grid of |F^C(x) - MP_fitted(x)|. Grid points within 1e-6 of
/// the origin are skipped.
double scaling_residual(const DataMatrix& x, std::span<const double> grid);

/// Evenly spaced grid of `points` values on (0, hi].
std::vector<double> positive_grid(double hi, std::size_t points);

/// Centering and scale of the largest sample-covariance eigenvalue of an
/// equi-correlated normal population.
struct CltParams {
  double tau;
  double varsigma;
};

/// tau = ((N-1)rho+1)((1+(T-1)N)rho+N-1)/(N T rho), varsigma = ((N-1)rho+1) sqrt(2/T),
/// i.e. lambda_1(Sigma_rho) times the clt_center_general centering and scale.
/// Throws RhoZero unless 0 < rho < 1.
CltParams clt_params(std::size_t n, std::size_t t, double rho);

struct CltCenter {
  double center;  ///< centering of lambda_1(S) / lambda_1(Sigma)
  double scale;   ///< sqrt(2 / T)
};

/// 1 + (1/T) sum_{k>=2} l_k / (l_1 - l_k) for population eigenvalues sorted
/// nonincreasing. Throws NoSpectralGap unless l_1 > l_2.
CltCenter clt_center_general(std::span<const double> population_eigs, std::size_t t);

/// (lambda - tau) / varsigma elementwise.
std::vector<double> normalize_lambda1(std::span<const double> lambda1_samples,
                                      const CltParams& params);

/// One-sample Kolmogorov statistic against the standard normal.
double ks_normal(std::span<const double> samples);

enum class BbpRegime { Subcritical, Critical, Supercritical };

std::string_view to_string(BbpRegime regime) noexcept;

struct BbpReport {
  BbpRegime regime;
  double center;
  double scale;  ///< 0 in the critical case, where no limit law is claimed
};

/// Entry field of the Gaussian data. Above the threshold the fluctuation
/// variance of real data is twice that of complex data; the edge scaling
/// below it is the same for both.
enum class DataField { Real, Complex };

/// Regime of the top sample eigenvalue for a population spike relative to
/// the threshold 1 + 1/sqrt(q). Throws InvalidQ unless q > 1.
BbpReport bbp_classify(double spike, double q, std::size_t t,
                       DataField field = DataField::Real);

/// Centering/scale pairs for both regimes, regardless of which one applies.
/// Complex: scale = sqrt(l^2 - l^2/(q (l-1)^2)) / sqrt(T); Real: sqrt(2) times that.
BbpReport bbp_supercritical_normalization(double spike, double q, std::size_t t,
                                          DataField field = DataField::Real);
BbpReport bbp_subcritical_normalization(double q, std::size_t t);

/// Replace the eigenvalues of c that fall inside the fitted MP bulk by their
/// average; eigenvalues outside the bulk and all eigenvectors are kept.
Matrix clip_eigenvalues(const Matrix& c, std::size_t t);

struct ClipReport {
  Matrix cleaned;
  std::size_t bulk_count;
  double bulk_value;
  MpParams fit;
};
ClipReport clip_eigenvalues_report(const Matrix& c, std::size_t t);

}  // namespace rmt

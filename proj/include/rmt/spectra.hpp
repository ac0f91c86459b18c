#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rmt/distribution.hpp"

namespace rmt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// N x T sample: rows are variables, columns are observations.
/// Construction enforces n >= 1, t >= 2 and finite entries.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values);

  std::size_t n() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t t() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  const Matrix& values() const noexcept { return values_; }

  bool operator==(const DataMatrix& other) const { return values_ == other.values_; }

 private:
  Matrix values_;
};

/// S = X X^T / T.
Matrix sample_covariance(const DataMatrix& x);

/// S° = (X - Xbar)(X - Xbar)^T / T, Xbar replicating each row mean.
Matrix centered_covariance(const DataMatrix& x);

/// C = Y Y^T with Y the row-centered, row-normalized data. Throws RowError
/// (ConstantRow) naming the first zero-variance row.
Matrix correlation(const DataMatrix& x);

/// C~ with rows scaled by 1/||x_i|| and no centering. Throws RowError (ZeroRow).
Matrix noncentered_correlation(const DataMatrix& x);

/// Row-centered, row-normalized Y such that correlation(x) = Y Y^T.
Matrix normalized_rows(const DataMatrix& x);

/// E = (X - Xbar) / sqrt(T) such that centered_covariance(x) = E E^T.
Matrix centered_scaled(const DataMatrix& x);

struct EigenDecomposition {
  Vector values;   ///< nonincreasing
  Matrix vectors;  ///< column k pairs with values[k]
};

/// Dense symmetric eigendecomposition. Throws NotSymmetric when
/// max|P - P^T| exceeds 1e-10 max|P|.
EigenDecomposition eigen_sym(const Matrix& p);

/// Eigenvalues only, nonincreasing.
std::vector<double> eigenvalues_sym(const Matrix& p);

struct TopEigenpair {
  double value;
  Vector vector;
  std::size_t iterations;
};

/// Power iteration for the top eigenpair of a PSD matrix, started from the
/// normalized all-ones vector. Stops when ||P v - lambda v|| <= tol * lambda.
/// Throws NoConvergence after max_iter steps.
TopEigenpair largest_eigenvalue(const Matrix& p, double tol = 1e-10,
                                std::size_t max_iter = 1000);

/// largest_eigenvalue with a fallback to eigen_sym on NoConvergence.
double top_eigenvalue(const Matrix& p, double tol = 1e-10, std::size_t max_iter = 1000);

/// Empirical spectral distribution: mass 1/N on each eigenvalue.
class Esd final : public DistributionFunction {
 public:
  explicit Esd(std::vector<double> eigenvalues);

  /// Eigenvalues sorted nonincreasing.
  const std::vector<double>& eigenvalues() const noexcept { return descending_; }
  std::size_t size() const noexcept { return ascending_.size(); }

  double cdf(double x) const override;
  double cdf_left(double x) const override;
  std::vector<double> atoms() const override;

 private:
  std::vector<double> ascending_;
  std::vector<double> descending_;
};

Esd esd(std::span<const double> eigenvalues);

/// sup_x |F1(x) - F2(x)|. Exact when every discontinuity of either function
/// is listed in its atoms() and the functions are monotone between them;
/// probe_grid adds evaluation points for pairs of continuous laws.
double kolmogorov_distance(const DistributionFunction& f1, const DistributionFunction& f2,
                           std::span<const double> probe_grid = {});

/// Levy distance inf{eps > 0 : F1(x - eps) - eps <= F2(x) <= F1(x + eps) + eps
/// for all x}, by bisection to absolute tolerance tol.
double levy_distance(const DistributionFunction& f1, const DistributionFunction& f2,
                     std::span<const double> probe_grid = {}, double tol = 1e-6);

}  // namespace rmt

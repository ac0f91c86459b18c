#include "rmt/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rmt/error.hpp"
#include "rmt/rng.hpp"

namespace rmt {

namespace {

// Gram product A A^T * scale via a symmetric rank update.
Matrix gram(const Matrix& a, double scale) {
  const Eigen::Index n = a.rows();
  Matrix g = Matrix::Zero(n, n);
  g.selfadjointView<Eigen::Lower>().rankUpdate(a, scale);
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

Matrix row_centered(const Matrix& x) {
  const Vector means = x.rowwise().mean();
  return x.colwise() - means;
}

// Rows of `a` divided by their Euclidean norms. A row whose norm is zero, or
// negligible against the reference row norm, is reported as degenerate.
Matrix unit_rows(const Matrix& a, const Matrix& reference, ErrorKind kind) {
  Matrix y = a;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double norm = a.row(i).norm();
    const double ref = reference.row(i).norm();
    if (!(norm > 0.0) || norm <= 1e-12 * ref) {
      const char* what = kind == ErrorKind::ConstantRow ? "has zero sample variance"
                                                        : "is the zero vector";
      throw RowError(kind, static_cast<std::size_t>(i),
                     "row " + std::to_string(i) + " " + what);
    }
    y.row(i) /= norm;
  }
  return y;
}

Matrix unit_diagonal_gram(const Matrix& y) {
  Matrix c = gram(y, 1.0);
  c = c.cwiseMax(-1.0).cwiseMin(1.0);
  c.diagonal().setOnes();
  return c;
}

void require_symmetric(const Matrix& p) {
  if (p.rows() != p.cols()) {
    throw Error(ErrorKind::NotSymmetric, "matrix is not square");
  }
  const double scale = p.cwiseAbs().maxCoeff();
  const double asym = (p - p.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw Error(ErrorKind::NotSymmetric,
                "matrix asymmetry " + std::to_string(asym) + " exceeds tolerance");
  }
}

}  // namespace

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 2) {
    throw Error(ErrorKind::InvalidArgument,
                "data matrix needs n >= 1 and t >= 2, got " + std::to_string(values_.rows()) +
                    "x" + std::to_string(values_.cols()));
  }
  if (!values_.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "data matrix has non-finite entries");
  }
}

Matrix sample_covariance(const DataMatrix& x) {
  return gram(x.values(), 1.0 / static_cast<double>(x.t()));
}

Matrix centered_covariance(const DataMatrix& x) {
  return gram(row_centered(x.values()), 1.0 / static_cast<double>(x.t()));
}

Matrix normalized_rows(const DataMatrix& x) {
  return unit_rows(row_centered(x.values()), x.values(), ErrorKind::ConstantRow);
}

Matrix centered_scaled(const DataMatrix& x) {
  return row_centered(x.values()) / std::sqrt(static_cast<double>(x.t()));
}

Matrix correlation(const DataMatrix& x) { return unit_diagonal_gram(normalized_rows(x)); }

Matrix noncentered_correlation(const DataMatrix& x) {
  return unit_diagonal_gram(unit_rows(x.values(), x.values(), ErrorKind::ZeroRow));
}

EigenDecomposition eigen_sym(const Matrix& p) {
  require_symmetric(p);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(p);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NoConvergence, "symmetric eigensolver failed");
  }
  // Eigen returns ascending order.
  return {solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
}

std::vector<double> eigenvalues_sym(const Matrix& p) {
  require_symmetric(p);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(p, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NoConvergence, "symmetric eigensolver failed");
  }
  const Vector& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::reverse(out.begin(), out.end());
  return out;
}

TopEigenpair largest_eigenvalue(const Matrix& p, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "power iteration needs tol > 0");
  require_symmetric(p);
  const Eigen::Index n = p.rows();

  // All-ones start with a small fixed perturbation so that a top eigenvector
  // orthogonal to the all-ones direction is still reached.
  Rng rng(0x5eedULL);
  Vector v = Vector::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] += 1e-3 * rng.normal();
  v.normalize();

  std::size_t restarts = 0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    Vector w = p * v;
    const double lambda = v.dot(w);
    const double residual = (w - lambda * v).norm();
    if (residual <= tol * std::abs(lambda) || residual == 0.0) {
      return {lambda, v, it};
    }
    const double norm = w.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      // Stagnated in the null space: restart from a random direction.
      if (++restarts > 3) break;
      for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
      v.normalize();
      continue;
    }
    v = w / norm;
  }
  throw Error(ErrorKind::NoConvergence,
              "power iteration did not converge in " + std::to_string(max_iter) + " iterations");
}

double top_eigenvalue(const Matrix& p, double tol, std::size_t max_iter) {
  try {
    return largest_eigenvalue(p, tol, max_iter).value;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoConvergence) throw;
    return eigenvalues_sym(p).front();
  }
}

Esd::Esd(std::vector<double> eigenvalues) : ascending_(std::move(eigenvalues)) {
  if (ascending_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "empirical spectral distribution of no eigenvalues");
  }
  for (double v : ascending_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite eigenvalue");
  }
  std::sort(ascending_.begin(), ascending_.end());
  descending_.assign(ascending_.rbegin(), ascending_.rend());
}

double Esd::cdf(double x) const {
  const auto count = std::upper_bound(ascending_.begin(), ascending_.end(), x) - ascending_.begin();
  return static_cast<double>(count) / static_cast<double>(ascending_.size());
}

double Esd::cdf_left(double x) const {
  const auto count = std::lower_bound(ascending_.begin(), ascending_.end(), x) - ascending_.begin();
  return static_cast<double>(count) / static_cast<double>(ascending_.size());
}

std::vector<double> Esd::atoms() const {
  std::vector<double> out = ascending_;
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Esd esd(std::span<const double> eigenvalues) {
  return Esd(std::vector<double>(eigenvalues.begin(), eigenvalues.end()));
}

}  // namespace rmt

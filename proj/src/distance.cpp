#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmt/error.hpp"
#include "rmt/spectra.hpp"

namespace rmt {

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

std::vector<double> candidate_points(const DistributionFunction& f1,
                                     const DistributionFunction& f2,
                                     std::span<const double> probe_grid) {
  std::vector<double> points = f1.atoms();
  const std::vector<double> more = f2.atoms();
  points.insert(points.end(), more.begin(), more.end());
  points.insert(points.end(), probe_grid.begin(), probe_grid.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

// sup over x of F_a(x - shift) - F_b(x), evaluated at the points where either
// term can jump (both one-sided values). Between such points one term is
// constant whenever the other is a step function, so the supremum is reached
// at a probe.
double sup_shifted_difference(const DistributionFunction& fa, const std::vector<double>& atoms_a,
                              double shift, const DistributionFunction& fb,
                              const std::vector<double>& atoms_b,
                              std::span<const double> probe_grid) {
  double best = 0.0;  // both tails tend to 0 or to 1 - 1
  auto probe = [&](double x) {
    best = std::max(best, fa.cdf(x - shift) - fb.cdf(x));
    best = std::max(best, fa.cdf_left(x - shift) - fb.cdf_left(x));
  };
  for (double p : atoms_a) probe(p + shift);
  for (double q : atoms_b) probe(q);
  for (double g : probe_grid) probe(g);
  return best;
}

}  // namespace

double kolmogorov_distance(const DistributionFunction& f1, const DistributionFunction& f2,
                           std::span<const double> probe_grid) {
  const std::vector<double> points = candidate_points(f1, f2, probe_grid);
  if (points.empty()) {
    throw Error(ErrorKind::InvalidArgument,
                "Kolmogorov distance between continuous laws needs a probe grid");
  }
  double best = 0.0;
  for (double x : points) {
    best = std::max(best, std::abs(f1.cdf(x) - f2.cdf(x)));
    best = std::max(best, std::abs(f1.cdf_left(x) - f2.cdf_left(x)));
  }
  return best;
}

double levy_distance(const DistributionFunction& f1, const DistributionFunction& f2,
                     std::span<const double> probe_grid, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "Levy distance needs tol > 0");
  const std::vector<double> atoms1 = f1.atoms();
  const std::vector<double> atoms2 = f2.atoms();
  if (atoms1.empty() && atoms2.empty() && probe_grid.empty()) {
    throw Error(ErrorKind::InvalidArgument,
                "Levy distance between continuous laws needs a probe grid");
  }
  constexpr double kSlack = 1e-14;

  // F1(x - eps) - eps <= F2(x) and F2(x) <= F1(x + eps) + eps for all x.
  auto feasible = [&](double eps) {
    const double lower = sup_shifted_difference(f1, atoms1, eps, f2, atoms2, probe_grid);
    if (lower > eps + kSlack) return false;
    // F2(x) - F1(x + eps): substitute y = x + eps so the shift sits on F2.
    const double upper = sup_shifted_difference(f2, atoms2, eps, f1, atoms1, probe_grid);
    return upper <= eps + kSlack;
  };

  if (feasible(0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace rmt

#pragma once

#include <cstdint>
#include <vector>

#include "rmt/spectra.hpp"

namespace rmt::testing {

/// One randomized instance of an inequality lhs <= rhs.
struct InequalityCase {
  double lhs;
  double rhs;
  bool holds;
};

/// Eigenvalues of a Gram matrix A A^T with roundoff-level values
/// (below 1e-9 of the largest) set to exactly 0.
std::vector<double> gram_spectrum(const Matrix& a);

/// K(F^{AA^T}, F^{BB^T}) <= rank(A - B)/N with B = A + rank-r perturbation.
InequalityCase rank_inequality_case(std::uint64_t seed);

/// L <= K for a random pair drawn from ESDs, MP laws and shifted normals.
InequalityCase levy_below_kolmogorov_case(std::uint64_t seed);

/// L^4(F^{YY^T}, F^{EE^T}) <= (2/N) Tr(YY^T + EE^T) (1/N) Tr((Y-E)(Y-E)^T)
/// for Y, E from the same simulated sample. lhs uses the certified lower
/// end of the Levy bisection bracket.
InequalityCase levy_trace_case(std::uint64_t seed);

/// |(1/N) Tr S - sigma_inf^2| <= 0.02 for a random factor model at N=400, T=1000.
InequalityCase trace_limit_case(std::uint64_t seed);

}  // namespace rmt::testing

#pragma once

#include <cstdint>
#include <random>

namespace rmt {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derive an independent stream seed from a master seed and two indices
/// (grid point, replication). Depends only on its arguments, so parallel
/// runs reproduce serial ones.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) noexcept;

/// Centered, unit-variance variate families.
enum class VariateKind { Normal, Uniform, Rademacher };

/// Seeded generator with portable variate transforms. std::normal_distribution
/// is implementation-defined, so normals come from the Marsaglia polar method
/// on top of mt19937_64 to keep streams identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double normal();
  double rademacher();
  /// Uniform on [-sqrt(3), sqrt(3)).
  double uniform_unit_variance();

  double draw(VariateKind kind);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rmt

#include "rmt/rng.hpp"

#include <cmath>

namespace rmt {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (a + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (b + 0x85157af5ULL));
  return h;
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

double Rng::rademacher() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }

double Rng::uniform_unit_variance() {
  static const double half_width = std::sqrt(3.0);
  return half_width * (2.0 * uniform01() - 1.0);
}

double Rng::draw(VariateKind kind) {
  switch (kind) {
    case VariateKind::Normal: return normal();
    case VariateKind::Uniform: return uniform_unit_variance();
    case VariateKind::Rademacher: return rademacher();
  }
  return normal();
}

}  // namespace rmt

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rmt/error.hpp"
#include "rmt/spectra.hpp"

namespace rmt::testing {

/// Kind of the rmt::Error raised by f, or nullopt when f returns normally.
template <class F>
std::optional<ErrorKind> thrown_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

struct SectorTarget {
  std::string name;
  std::size_t n;
  double lambda1_over_n;
};

/// The eleven sectors with their ticker counts and target lambda_1(C)/N.
const std::vector<SectorTarget>& market_sectors();
inline constexpr std::size_t kMarketDates = 2516;
inline constexpr double kMarketTotalLambda = 0.381;

struct ReturnsFixture {
  std::filesystem::path returns;
  std::filesystem::path sectors;
  Matrix population;  ///< correlation matrix the sample reproduces exactly
};

/// Per-process scratch directory under the system temp dir, recreated empty.
std::filesystem::path scratch_dir(const std::string& name);

/// Returns matrix whose sample correlation equals `population` up to rounding:
/// X = L Q^T with L L^T = population and Q having orthonormal, centered
/// columns; each row then gets an arbitrary positive scale and shift.
Matrix returns_with_correlation(const Matrix& population, std::size_t t, std::uint64_t seed);

/// Market-plus-sector correlation over the eleven market sectors: every sector
/// block is equi-correlated with the sector's target, and the market share
/// is tuned so the full matrix hits the total target.
Matrix market_population();

/// Writes the 429 x 2516 returns CSV and the ticker,sector CSV into dir.
/// Built once per process and reused.
const ReturnsFixture& market_fixture();

/// Writes returns (tickers x dates) as Date,TICK... CSV with labels
/// "S<sector>_<k>" and the matching sectors file.
ReturnsFixture write_sector_fixture(const std::filesystem::path& dir, const Matrix& returns,
                                    const std::vector<std::string>& sector_names,
                                    const std::vector<std::size_t>& sector_sizes);

}  // namespace rmt::testing

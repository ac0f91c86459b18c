#include "fixtures.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "rmt/finance.hpp"
#include "rmt/rng.hpp"

#include <unistd.h>

namespace rmt::testing {

const std::vector<SectorTarget>& market_sectors() {
  static const std::vector<SectorTarget> sectors = {
      {"Communication Services", 19, 0.357}, {"Consumer Discretionary", 52, 0.384},
      {"Health Care", 47, 0.394},            {"Consumer Staples", 23, 0.430},
      {"Information Technology", 62, 0.464}, {"Industrials", 65, 0.498},
      {"Materials", 24, 0.498},              {"Real estate", 30, 0.581},
      {"Financials", 63, 0.608},             {"Energy", 16, 0.687},
      {"Utilities", 28, 0.689},
  };
  return sectors;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("rmtkit_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

Matrix returns_with_correlation(const Matrix& population, std::size_t t, std::uint64_t seed) {
  const Eigen::Index n = population.rows();
  Eigen::LLT<Matrix> llt(population);
  if (llt.info() != Eigen::Success) throw std::runtime_error("population is not positive definite");
  Rng rng(seed);
  Matrix g(static_cast<Eigen::Index>(t), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.normal();
  }
  g.rowwise() -= g.colwise().mean();
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), n);
  Matrix x = llt.matrixL() * q.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double scale = 0.005 + 0.03 * rng.uniform01();
    const double shift = 0.001 * (rng.uniform01() - 0.5);
    x.row(i) = (x.row(i).array() * scale + shift).matrix();
  }
  return x;
}

namespace {

Matrix market_sector_matrix(double market_share) {
  const auto& sectors = market_sectors();
  std::vector<double> market;
  std::vector<std::size_t> label;
  std::vector<double> within;
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    const double n = static_cast<double>(sectors[s].n);
    const double rho = (sectors[s].lambda1_over_n * n - 1.0) / (n - 1.0);
    for (std::size_t k = 0; k < sectors[s].n; ++k) {
      market.push_back(std::sqrt(market_share * rho));
      label.push_back(s);
      within.push_back(rho);
    }
  }
  const auto n = static_cast<Eigen::Index>(market.size());
  Matrix b(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      if (i == j) {
        b(i, j) = 1.0;
      } else if (label[ui] == label[uj]) {
        b(i, j) = within[ui];
      } else {
        b(i, j) = market[ui] * market[uj];
      }
    }
  }
  return b;
}

}  // namespace

Matrix market_population() {
  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const Matrix b = market_sector_matrix(mid);
    const double ratio = top_eigenvalue(b, 1e-13, 5000) / static_cast<double>(b.rows());
    (ratio < kMarketTotalLambda ? lo : hi) = mid;
  }
  return market_sector_matrix(0.5 * (lo + hi));
}

ReturnsFixture write_sector_fixture(const std::filesystem::path& dir, const Matrix& returns,
                                    const std::vector<std::string>& sector_names,
                                    const std::vector<std::size_t>& sector_sizes) {
  ReturnsTable table{{}, {}, DataMatrix(returns)};
  using namespace std::chrono;
  sys_days day = year{2010} / January / 4;
  for (Eigen::Index c = 0; c < returns.cols(); ++c) {
    const year_month_day ymd{day};
    std::ostringstream date;
    date << static_cast<int>(ymd.year()) << '-' << std::setw(2) << std::setfill('0')
         << static_cast<unsigned>(ymd.month()) << '-' << std::setw(2) << std::setfill('0')
         << static_cast<unsigned>(ymd.day());
    table.dates.push_back(date.str());
    day += days{1};
  }
  std::ofstream sectors(dir / "sectors.csv");
  sectors << "ticker,sector\n";
  for (std::size_t s = 0; s < sector_sizes.size(); ++s) {
    for (std::size_t k = 0; k < sector_sizes[s]; ++k) {
      char ticker[32];
      std::snprintf(ticker, sizeof(ticker), "S%02zu_%03zu", s, k);
      table.tickers.emplace_back(ticker);
      sectors << ticker << ',' << sector_names[s] << '\n';
    }
  }
  sectors.close();
  write_returns_csv(dir / "returns.csv", table);
  return {dir / "returns.csv", dir / "sectors.csv", Matrix()};
}

const ReturnsFixture& market_fixture() {
  static const ReturnsFixture fixture = [] {
    const auto dir = scratch_dir("market");
    Matrix population = market_population();
    const Matrix x = returns_with_correlation(population, kMarketDates, 20240601);
    std::vector<std::string> names;
    std::vector<std::size_t> sizes;
    for (const auto& s : market_sectors()) {
      names.push_back(s.name);
      sizes.push_back(s.n);
    }
    ReturnsFixture f = write_sector_fixture(dir, x, names, sizes);
    f.population = std::move(population);
    return f;
  }();
  return fixture;
}

}  // namespace rmt::testing

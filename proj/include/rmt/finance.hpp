#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rmt/spectra.hpp"

namespace rmt {

/// Wide-format daily returns (tickers x dates) without sector labels.
struct ReturnsTable {
  std::vector<std::string> dates;
  std::vector<std::string> tickers;
  DataMatrix returns;
};

/// Returns joined with GICS-style sector labels.
struct SectorDataset {
  std::vector<std::string> dates;
  std::vector<std::string> tickers;
  DataMatrix returns;
  std::map<std::string, std::string> sector_of;

  /// Sector labels in order of first appearance among the tickers.
  std::vector<std::string> sectors() const;
  /// Row indices of the tickers in `sector`, in ticker order.
  std::vector<std::size_t> rows_of(const std::string& sector) const;
};

/// Parses `Date,TICK1,TICK2,...` with one row per date. Throws ParseError
/// (line number), MissingValue (ticker, date) or TooFewDates.
ReturnsTable load_returns_table(const std::filesystem::path& returns_path);

/// load_returns_table joined with a `ticker,sector` file. Throws MissingSector
/// for an unlabeled ticker.
SectorDataset load_returns_csv(const std::filesystem::path& returns_path,
                               const std::filesystem::path& sectors_path);

void write_returns_csv(const std::filesystem::path& path, const ReturnsTable& table);

struct SectorSummaryRow {
  std::string sector;
  std::size_t n;
  std::size_t t;
  double n_over_t;
  double lambda1_over_n;
};

inline constexpr const char* kTotalLabel = "total";

/// One row per sector (first-appearance order) plus a final "total" row over
/// every ticker. A constant return series is reported with its ticker.
std::vector<SectorSummaryRow> sector_summary(const SectorDataset& ds);

void write_summary_csv(const std::filesystem::path& path,
                       std::span<const SectorSummaryRow> rows);

struct RegressionResult {
  double slope;
  double intercept;
  double r2;
  double adj_r2;
  std::size_t n_points;
};

/// Simple least squares y ~ slope x + intercept with adjusted R^2 =
/// 1 - (1 - R^2)(n - 1)/(n - 2). Throws DegenerateX for constant xs.
RegressionResult ols_fit(std::span<const double> xs, std::span<const double> ys);

/// Row of the transcribed sector table: sector, N, lambda_1(C)/N and the
/// time-averaged GARCH-DECO equi-correlation.
struct SectorTableRow {
  std::string sector;
  std::size_t n;
  double lambda1_over_n;
  double rho_bar;
};

std::vector<SectorTableRow> load_sector_table(const std::filesystem::path& path);

/// Named numeric column from a CSV with a `sector` column, keyed by sector.
std::map<std::string, double> load_sector_column(const std::filesystem::path& path,
                                                 const std::string& column_name);

/// Joins lambda1_over_n (summary) with rho_bar by sector and regresses
/// rho_bar on lambda1_over_n.
RegressionResult regress_files(const std::filesystem::path& summary_path,
                               const std::filesystem::path& rhobar_path);

/// Dendrogram leaf order of average-linkage agglomerative clustering on
/// d_ij = 1 - c_ij. Ties go to the pair with the smallest member indices.
std::vector<std::size_t> cluster_order(const Matrix& c, std::span<const std::string> labels);

/// CSV with a label header row and label column, entries c[order[i]][order[j]].
void export_heatmap(const Matrix& c, std::span<const std::size_t> order,
                    std::span<const std::string> labels, const std::filesystem::path& path);

struct LabeledMatrix {
  std::vector<std::string> labels;
  Matrix values;
};

LabeledMatrix read_heatmap(const std::filesystem::path& path);

}  // namespace rmt

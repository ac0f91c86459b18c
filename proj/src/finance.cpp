#include "rmt/finance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>

#include "rmt/csv.hpp"
#include "rmt/error.hpp"
#include "rmt/theory.hpp"

namespace rmt {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  return out;
}

void check_written(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw Error(ErrorKind::IoError, "write to '" + path.string() + "' failed");
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

}  // namespace

std::vector<std::string> SectorDataset::sectors() const {
  std::vector<std::string> out;
  for (const auto& ticker : tickers) {
    const std::string& s = sector_of.at(ticker);
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

std::vector<std::size_t> SectorDataset::rows_of(const std::string& sector) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < tickers.size(); ++i) {
    if (sector_of.at(tickers[i]) == sector) rows.push_back(i);
  }
  return rows;
}

ReturnsTable load_returns_table(const std::filesystem::path& returns_path) {
  const std::vector<std::string> lines = csv::read_lines(returns_path);
  if (lines.empty()) throw Error(ErrorKind::ParseError, where(returns_path, 1) + ": empty file");
  const std::vector<std::string> header = csv::split(lines[0]);
  if (header.size() < 2) {
    throw Error(ErrorKind::ParseError, where(returns_path, 1) + ": header needs Date and tickers");
  }
  std::vector<std::string> tickers(header.begin() + 1, header.end());
  std::set<std::string> seen;
  for (const auto& ticker : tickers) {
    if (ticker.empty() || !seen.insert(ticker).second) {
      throw Error(ErrorKind::ParseError,
                  where(returns_path, 1) + ": empty or duplicate ticker '" + ticker + "'");
    }
  }

  const std::size_t n = tickers.size();
  const std::size_t t = lines.size() - 1;
  if (t < 2) {
    throw Error(ErrorKind::TooFewDates,
                returns_path.string() + ": need at least 2 dates, got " + std::to_string(t));
  }
  std::vector<std::string> dates;
  dates.reserve(t);
  Matrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::vector<std::string> fields = csv::split(lines[row]);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::ParseError, where(returns_path, row + 1) + ": expected " +
                                             std::to_string(header.size()) + " fields, got " +
                                             std::to_string(fields.size()));
    }
    dates.push_back(fields[0]);
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.0;
      if (!csv::parse_double(fields[i + 1], v)) {
        throw Error(ErrorKind::MissingValue, "ticker " + tickers[i] + " has no usable value on " +
                                                 fields[0] + " (" +
                                                 where(returns_path, row + 1) + ")");
      }
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(row - 1)) = v;
    }
  }
  return {std::move(dates), std::move(tickers), DataMatrix(std::move(values))};
}

SectorDataset load_returns_csv(const std::filesystem::path& returns_path,
                               const std::filesystem::path& sectors_path) {
  ReturnsTable table = load_returns_table(returns_path);

  const std::vector<std::string> lines = csv::read_lines(sectors_path);
  if (lines.empty()) throw Error(ErrorKind::ParseError, where(sectors_path, 1) + ": empty file");
  const std::vector<std::string> header = csv::split(lines[0]);
  const std::size_t ticker_col = csv::column(header, "ticker");
  const std::size_t sector_col = csv::column(header, "sector");
  if (ticker_col == std::string::npos || sector_col == std::string::npos) {
    throw Error(ErrorKind::ParseError, where(sectors_path, 1) + ": header needs ticker,sector");
  }
  std::map<std::string, std::string> labels;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::vector<std::string> fields = csv::split(lines[row]);
    if (fields.size() != header.size() || fields[sector_col].empty()) {
      throw Error(ErrorKind::ParseError, where(sectors_path, row + 1) + ": malformed row");
    }
    labels[fields[ticker_col]] = fields[sector_col];
  }

  std::map<std::string, std::string> sector_of;
  for (const auto& ticker : table.tickers) {
    const auto it = labels.find(ticker);
    if (it == labels.end()) {
      throw Error(ErrorKind::MissingSector, "ticker " + ticker + " has no sector in '" +
                                                sectors_path.string() + "'");
    }
    sector_of[ticker] = it->second;
  }
  return {std::move(table.dates), std::move(table.tickers), std::move(table.returns),
          std::move(sector_of)};
}

void write_returns_csv(const std::filesystem::path& path, const ReturnsTable& table) {
  std::ofstream out = open_output(path);
  out << "Date";
  for (const auto& ticker : table.tickers) out << ',' << ticker;
  out << '\n';
  const Matrix& v = table.returns.values();
  for (Eigen::Index col = 0; col < v.cols(); ++col) {
    out << table.dates[static_cast<std::size_t>(col)];
    for (Eigen::Index i = 0; i < v.rows(); ++i) out << ',' << csv::format(v(i, col));
    out << '\n';
  }
  check_written(out, path);
}

std::vector<SectorSummaryRow> sector_summary(const SectorDataset& ds) {
  const std::size_t t = ds.returns.t();
  auto summarize = [&](const std::string& label, const std::vector<std::size_t>& rows) {
    if (rows.size() < 2) {
      throw Error(ErrorKind::InvalidArgument,
                  "sector " + label + " needs at least 2 tickers, got " + std::to_string(rows.size()));
    }
    Matrix block(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      block.row(static_cast<Eigen::Index>(r)) = ds.returns.values().row(static_cast<Eigen::Index>(rows[r]));
    }
    double rho = 0.0;
    try {
      rho = estimate_rho(DataMatrix(std::move(block)));
    } catch (const RowError& e) {
      throw Error(e.kind(), "ticker " + ds.tickers[rows[e.row()]] + " in sector " + label +
                                " has constant returns");
    }
    const double n = static_cast<double>(rows.size());
    return SectorSummaryRow{label, rows.size(), t, n / static_cast<double>(t), rho};
  };

  std::vector<SectorSummaryRow> out;
  for (const auto& sector : ds.sectors()) out.push_back(summarize(sector, ds.rows_of(sector)));
  std::vector<std::size_t> all(ds.tickers.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  out.push_back(summarize(kTotalLabel, all));
  return out;
}

void write_summary_csv(const std::filesystem::path& path,
                       std::span<const SectorSummaryRow> rows) {
  std::ofstream out = open_output(path);
  out << "sector,n,t,n_over_t,lambda1_over_n\n";
  for (const auto& r : rows) {
    out << r.sector << ',' << r.n << ',' << r.t << ',' << csv::format(r.n_over_t) << ','
        << csv::format(r.lambda1_over_n) << '\n';
  }
  check_written(out, path);
}

RegressionResult ols_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 3) {
    throw Error(ErrorKind::InvalidArgument,
                "regression needs equal-length inputs with at least 3 points");
  }
  const double n = static_cast<double>(xs.size());
  const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - mean_x;
    const double dy = ys[k] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::DegenerateX, "regressor values are all equal");
  const double slope = sxy / sxx;
  const double intercept = mean_y - slope * mean_x;
  double sse = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double r = ys[k] - (intercept + slope * xs[k]);
    sse += r * r;
  }
  // Constant ys: nothing to explain, R^2 = 0 by convention.
  const double r2 = syy > 0.0 ? 1.0 - sse / syy : 0.0;
  const double adj = 1.0 - (1.0 - r2) * (n - 1.0) / (n - 2.0);
  return {slope, intercept, r2, adj, xs.size()};
}

std::vector<SectorTableRow> load_sector_table(const std::filesystem::path& path) {
  const std::vector<std::string> lines = csv::read_lines(path);
  if (lines.empty()) throw Error(ErrorKind::ParseError, where(path, 1) + ": empty file");
  const std::vector<std::string> header = csv::split(lines[0]);
  const std::size_t sector_col = csv::column(header, "sector");
  const std::size_t n_col = csv::column(header, "n");
  const std::size_t l_col = csv::column(header, "lambda1_over_n");
  const std::size_t r_col = csv::column(header, "rho_bar");
  if (sector_col == std::string::npos || n_col == std::string::npos ||
      l_col == std::string::npos || r_col == std::string::npos) {
    throw Error(ErrorKind::ParseError,
                where(path, 1) + ": header needs sector,n,lambda1_over_n,rho_bar");
  }
  std::vector<SectorTableRow> rows;
  for (std::size_t line = 1; line < lines.size(); ++line) {
    const std::vector<std::string> f = csv::split(lines[line]);
    double n = 0.0;
    double l = 0.0;
    double r = 0.0;
    if (f.size() != header.size() || !csv::parse_double(f[n_col], n) ||
        !csv::parse_double(f[l_col], l) || !csv::parse_double(f[r_col], r) || n < 1.0) {
      throw Error(ErrorKind::ParseError, where(path, line + 1) + ": malformed row");
    }
    rows.push_back({f[sector_col], static_cast<std::size_t>(n), l, r});
  }
  return rows;
}

std::map<std::string, double> load_sector_column(const std::filesystem::path& path,
                                                 const std::string& column_name) {
  const std::vector<std::string> lines = csv::read_lines(path);
  if (lines.empty()) throw Error(ErrorKind::ParseError, where(path, 1) + ": empty file");
  const std::vector<std::string> header = csv::split(lines[0]);
  const std::size_t sector_col = csv::column(header, "sector");
  const std::size_t value_col = csv::column(header, column_name);
  if (sector_col == std::string::npos || value_col == std::string::npos) {
    throw Error(ErrorKind::ParseError,
                where(path, 1) + ": header needs sector and " + column_name);
  }
  std::map<std::string, double> out;
  for (std::size_t line = 1; line < lines.size(); ++line) {
    const std::vector<std::string> f = csv::split(lines[line]);
    double v = 0.0;
    if (f.size() != header.size() || !csv::parse_double(f[value_col], v)) {
      throw Error(ErrorKind::ParseError, where(path, line + 1) + ": malformed row");
    }
    out[f[sector_col]] = v;
  }
  return out;
}

RegressionResult regress_files(const std::filesystem::path& summary_path,
                               const std::filesystem::path& rhobar_path) {
  const auto lambda = load_sector_column(summary_path, "lambda1_over_n");
  const auto rho_bar = load_sector_column(rhobar_path, "rho_bar");
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [sector, x] : lambda) {
    const auto it = rho_bar.find(sector);
    if (it == rho_bar.end()) {
      throw Error(ErrorKind::MissingSector, "sector " + sector + " has no rho_bar in '" +
                                                rhobar_path.string() + "'");
    }
    xs.push_back(x);
    ys.push_back(it->second);
  }
  return ols_fit(xs, ys);
}

std::vector<std::size_t> cluster_order(const Matrix& c, std::span<const std::string> labels) {
  const auto n = static_cast<std::size_t>(c.rows());
  if (c.rows() != c.cols() || (!labels.empty() && labels.size() != n)) {
    throw Error(ErrorKind::InvalidArgument, "cluster_order needs a square matrix matching labels");
  }
  // Cluster slots are keyed by their smallest member index; merging keeps the
  // lower slot, so scanning slots in order implements the tie-break.
  std::vector<std::vector<std::size_t>> members(n);
  std::vector<bool> active(n, true);
  Matrix d(c.rows(), c.cols());
  for (std::size_t i = 0; i < n; ++i) {
    members[i] = {i};
    for (std::size_t j = 0; j < n; ++j) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          1.0 - c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  for (std::size_t merges = 1; merges < n; ++merges) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    std::size_t bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        const double dij = d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (dij < best) {
          best = dij;
          bi = i;
          bj = j;
        }
      }
    }
    // Average linkage (Lance-Williams update).
    const double wi = static_cast<double>(members[bi].size());
    const double wj = static_cast<double>(members[bj].size());
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const auto ek = static_cast<Eigen::Index>(k);
      const double merged = (wi * d(static_cast<Eigen::Index>(bi), ek) +
                             wj * d(static_cast<Eigen::Index>(bj), ek)) / (wi + wj);
      d(static_cast<Eigen::Index>(bi), ek) = merged;
      d(ek, static_cast<Eigen::Index>(bi)) = merged;
    }
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    members[bj].clear();
    active[bj] = false;
  }
  return n == 0 ? std::vector<std::size_t>{} : members[0];
}

void export_heatmap(const Matrix& c, std::span<const std::size_t> order,
                    std::span<const std::string> labels, const std::filesystem::path& path) {
  const auto n = static_cast<std::size_t>(c.rows());
  std::vector<bool> seen(n, false);
  bool valid = order.size() == n && labels.size() == n && c.cols() == c.rows();
  for (std::size_t k = 0; valid && k < order.size(); ++k) {
    valid = order[k] < n && !seen[order[k]];
    if (valid) seen[order[k]] = true;
  }
  if (!valid) {
    throw Error(ErrorKind::InvalidArgument, "heatmap order is not a permutation of the labels");
  }
  std::ofstream out = open_output(path);
  for (std::size_t j : order) out << ',' << labels[j];
  out << '\n';
  for (std::size_t i : order) {
    out << labels[i];
    for (std::size_t j : order) {
      out << ',' << csv::format(c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out << '\n';
  }
  check_written(out, path);
}

LabeledMatrix read_heatmap(const std::filesystem::path& path) {
  const std::vector<std::string> lines = csv::read_lines(path);
  if (lines.empty()) throw Error(ErrorKind::ParseError, where(path, 1) + ": empty file");
  const std::vector<std::string> header = csv::split(lines[0]);
  const std::size_t n = header.size() - 1;
  if (lines.size() != n + 1) {
    throw Error(ErrorKind::ParseError, path.string() + ": heatmap is not square");
  }
  LabeledMatrix out{{header.begin() + 1, header.end()},
                    Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<std::string> f = csv::split(lines[i + 1]);
    if (f.size() != n + 1 || f[0] != out.labels[i]) {
      throw Error(ErrorKind::ParseError, where(path, i + 2) + ": malformed heatmap row");
    }
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;
      if (!csv::parse_double(f[j + 1], v)) {
        throw Error(ErrorKind::ParseError, where(path, i + 2) + ": bad entry");
      }
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return out;
}

}  // namespace rmt

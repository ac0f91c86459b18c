#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rmt/error.hpp"
#include "rmt/models.hpp"

namespace rmt {

enum class Statistic {
  Lambda1COverN,
  Lambda1S,
  EsdKDistance,
  ScalingResidual,
  CltNormalized,
};

Statistic parse_statistic(std::string_view name);
std::string_view to_string(Statistic statistic) noexcept;

/// One (N, T) point driven either by an equicorrelated normal population
/// (rho, optional mu / delta) or by a named factor model.
struct GridPoint {
  std::size_t n = 0;
  std::size_t t = 0;
  double rho = 0.0;
  std::vector<double> mu;
  std::vector<double> delta;
  std::optional<std::string> model;
};

struct ExperimentConfig {
  std::vector<GridPoint> grid;
  std::map<std::string, FactorModelSpec> models;
  Statistic statistic = Statistic::Lambda1COverN;
  std::size_t reps = 1;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;

  void validate() const;
};

/// JSON config:
///   {"statistic": "...", "reps": R, "master_seed": S, "workers": W,
///    "models": {"name": {"k": K, "loading_limit": [...], "loading_decay": [...],
///                        "psi1": p, "factor_dist": "normal", "idio_dist": "rademacher"}},
///    "grid": [{"n": N, "t": T, "rho": r}, {"n": N, "t": T, "model": "name"}]}
/// Loadings of a named model are l_i = loading_limit + loading_decay / i.
ExperimentConfig parse_experiment_config(std::string_view json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ResultRow {
  std::size_t n;
  std::size_t t;
  double rho;
  std::size_t rep;
  Statistic statistic;
  double value;
  std::uint64_t seed;

  bool operator==(const ResultRow&) const = default;
};

/// A (grid point, replication) task that failed its preconditions or hit a
/// numerical error. The rest of the run is unaffected.
struct ErrorRecord {
  std::size_t grid_index;
  std::size_t n;
  std::size_t t;
  double rho;
  std::size_t rep;
  std::uint64_t seed;
  ErrorKind kind;
  std::string message;

  bool operator==(const ErrorRecord&) const = default;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<ErrorRecord> errors;
};

/// Population rho reported for a grid point (the limiting rho for factor models).
double grid_rho(const ExperimentConfig& config, const GridPoint& point);

/// Replication r at grid point g uses mix_seed(master_seed, g, r). Rows come
/// back ordered by (g, r) whatever the worker count.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Statistic of one simulated sample; throws rmt::Error on precondition failure.
double evaluate_statistic(const ExperimentConfig& config, std::size_t grid_index,
                          std::uint64_t seed);

/// Runs f(i) for i in [0, count) on `workers` threads. Each index is visited
/// exactly once; callers write into preallocated per-index slots.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& f);

void write_rows_csv(std::ostream& out, std::span<const ResultRow> rows);
void write_rows_jsonl(std::ostream& out, const ExperimentResult& result);

struct HistogramBin {
  double center;
  double density;
};

struct Histogram {
  std::vector<HistogramBin> bins;
  std::size_t outside;
};

/// Density histogram over [lo, hi]: density * width sums to the fraction of
/// values inside the range. The last bin is closed on the right.
Histogram histogram(std::span<const double> values, std::size_t bins, double lo, double hi);

}  // namespace rmt

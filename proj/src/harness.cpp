#include "rmt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <variant>

#include "json.hpp"

#include "rmt/csv.hpp"
#include "rmt/mp.hpp"
#include "rmt/rng.hpp"
#include "rmt/theory.hpp"

namespace rmt {

namespace {

using nlohmann::json;

constexpr std::size_t kResidualGridPoints = 200;

void reject_unknown_keys(const json& object, std::initializer_list<std::string_view> allowed,
                         const std::string& context) {
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorKind::ParseError, context + ": unknown key '" + key + "'");
    }
  }
}

std::vector<double> number_list(const json& value, const std::string& context) {
  if (!value.is_array()) throw Error(ErrorKind::ParseError, context + " must be an array");
  std::vector<double> out;
  for (const auto& v : value) {
    if (!v.is_number()) throw Error(ErrorKind::ParseError, context + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::size_t positive_count(const json& object, const char* key, const std::string& context) {
  if (!object.contains(key) || !object.at(key).is_number_unsigned() ||
      object.at(key).get<std::uint64_t>() == 0) {
    throw Error(ErrorKind::ParseError, context + ": '" + key + "' must be a positive integer");
  }
  return static_cast<std::size_t>(object.at(key).get<std::uint64_t>());
}

FactorModelSpec parse_model(const json& m, const std::string& name) {
  const std::string context = "model '" + name + "'";
  if (!m.is_object()) throw Error(ErrorKind::ParseError, context + " must be an object");
  reject_unknown_keys(m, {"k", "loading_limit", "loading_decay", "psi1", "factor_dist", "idio_dist"},
                      context);
  FactorModelSpec spec;
  spec.k = m.contains("k") ? m.at("k").get<std::size_t>() : 0;
  const std::vector<double> limit =
      m.contains("loading_limit") ? number_list(m.at("loading_limit"), context + ".loading_limit")
                                  : std::vector<double>{};
  const std::vector<double> decay =
      m.contains("loading_decay") ? number_list(m.at("loading_decay"), context + ".loading_decay")
                                  : std::vector<double>(limit.size(), 0.0);
  spec.loadings = LoadingRule::harmonic(limit, decay);
  if (m.contains("psi1")) spec.psi1 = m.at("psi1").get<double>();
  if (m.contains("factor_dist")) {
    spec.factor_dist = parse_variate_kind(m.at("factor_dist").get<std::string>());
  }
  if (m.contains("idio_dist")) {
    spec.idio_dist = parse_variate_kind(m.at("idio_dist").get<std::string>());
  }
  spec.validate();
  return spec;
}

GridPoint parse_grid_point(const json& g, std::size_t index) {
  const std::string context = "grid[" + std::to_string(index) + "]";
  if (!g.is_object()) throw Error(ErrorKind::ParseError, context + " must be an object");
  reject_unknown_keys(g, {"n", "t", "rho", "mu", "delta", "model"}, context);
  GridPoint point;
  point.n = positive_count(g, "n", context);
  point.t = positive_count(g, "t", context);
  if (g.contains("model")) {
    if (g.contains("rho") || g.contains("mu") || g.contains("delta")) {
      throw Error(ErrorKind::ParseError, context + ": 'model' excludes rho/mu/delta");
    }
    point.model = g.at("model").get<std::string>();
    return point;
  }
  if (!g.contains("rho") || !g.at("rho").is_number()) {
    throw Error(ErrorKind::ParseError, context + ": needs 'rho' or 'model'");
  }
  point.rho = g.at("rho").get<double>();
  if (g.contains("mu")) point.mu = number_list(g.at("mu"), context + ".mu");
  if (g.contains("delta")) point.delta = number_list(g.at("delta"), context + ".delta");
  return point;
}

DataMatrix simulate(const ExperimentConfig& config, const GridPoint& point, std::uint64_t seed) {
  if (point.model) {
    return sample_factor(config.models.at(*point.model), point.n, point.t, seed);
  }
  return sample_equicorr({point.rho, point.mu, point.delta}, point.n, point.t, seed);
}

bool is_standard_equicorr(const GridPoint& point) {
  const bool zero_mean =
      std::all_of(point.mu.begin(), point.mu.end(), [](double m) { return m == 0.0; });
  const bool unit_scale =
      std::all_of(point.delta.begin(), point.delta.end(), [](double d) { return d == 1.0; });
  return !point.model && zero_mean && unit_scale;
}

double row_rho(const ExperimentConfig& config, const GridPoint& point) {
  return point.model ? limiting_params(config.models.at(*point.model)).rho : point.rho;
}

}  // namespace

Statistic parse_statistic(std::string_view name) {
  for (Statistic s : {Statistic::Lambda1COverN, Statistic::Lambda1S, Statistic::EsdKDistance,
                      Statistic::ScalingResidual, Statistic::CltNormalized}) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown statistic '" + std::string(name) + "'");
}

std::string_view to_string(Statistic statistic) noexcept {
  switch (statistic) {
    case Statistic::Lambda1COverN: return "lambda1_C_over_N";
    case Statistic::Lambda1S: return "lambda1_S";
    case Statistic::EsdKDistance: return "esd_K_distance";
    case Statistic::ScalingResidual: return "scaling_residual";
    case Statistic::CltNormalized: return "clt_normalized";
  }
  return "lambda1_C_over_N";
}

void ExperimentConfig::validate() const {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "experiment grid is empty");
  if (reps == 0 || workers == 0) {
    throw Error(ErrorKind::InvalidArgument, "reps and workers must be at least 1");
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const GridPoint& p = grid[g];
    const std::string where = "grid point " + std::to_string(g);
    if (p.n < 1 || p.t < 2) throw Error(ErrorKind::InvalidArgument, where + " needs n >= 1, t >= 2");
    if (p.model) {
      if (models.find(*p.model) == models.end()) {
        throw Error(ErrorKind::InvalidArgument, where + " names unknown model '" + *p.model + "'");
      }
    } else {
      EquiCorrSpec{p.rho, p.mu, p.delta}.validate(p.n);
    }
  }
}

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "config must be a JSON object");
  reject_unknown_keys(doc, {"grid", "models", "statistic", "reps", "master_seed", "workers"},
                      "config");
  ExperimentConfig config;
  try {
    if (doc.contains("models")) {
      for (const auto& [name, m] : doc.at("models").items()) config.models[name] = parse_model(m, name);
    }
    if (!doc.contains("grid") || !doc.at("grid").is_array()) {
      throw Error(ErrorKind::ParseError, "config needs a 'grid' array");
    }
    std::size_t index = 0;
    for (const auto& g : doc.at("grid")) config.grid.push_back(parse_grid_point(g, index++));
    if (!doc.contains("statistic")) throw Error(ErrorKind::ParseError, "config needs 'statistic'");
    config.statistic = parse_statistic(doc.at("statistic").get<std::string>());
    if (doc.contains("reps")) config.reps = positive_count(doc, "reps", "config");
    if (doc.contains("master_seed")) {
      if (!doc.at("master_seed").is_number_unsigned()) {
        throw Error(ErrorKind::ParseError, "config: 'master_seed' must be a non-negative integer");
      }
      config.master_seed = doc.at("master_seed").get<std::uint64_t>();
    }
    if (doc.contains("workers")) config.workers = positive_count(doc, "workers", "config");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config has a wrongly typed field: ") + e.what());
  }
  config.validate();
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

double grid_rho(const ExperimentConfig& config, const GridPoint& point) {
  return row_rho(config, point);
}

double evaluate_statistic(const ExperimentConfig& config, std::size_t grid_index,
                          std::uint64_t seed) {
  const GridPoint& point = config.grid.at(grid_index);
  const double rho = row_rho(config, point);
  const double q = static_cast<double>(point.t) / static_cast<double>(point.n);

  // Preconditions that do not depend on the sample are checked before drawing it.
  if (config.statistic == Statistic::CltNormalized) {
    if (!is_standard_equicorr(point)) {
      throw Error(ErrorKind::InvalidArgument,
                  "clt_normalized needs a zero-mean, unit-scale equi-correlated grid point");
    }
    clt_params(point.n, point.t, rho);
  }

  const DataMatrix x = simulate(config, point, seed);
  switch (config.statistic) {
    case Statistic::Lambda1COverN:
      return estimate_rho(x);
    case Statistic::Lambda1S:
      return eigenvalues_sym(sample_covariance(x)).front();
    case Statistic::EsdKDistance: {
      const Esd spectrum(eigenvalues_sym(correlation(x)));
      return kolmogorov_distance(spectrum, MarchenkoPastur({q, 1.0 - rho}));
    }
    case Statistic::ScalingResidual: {
      const double upper = mp_support({q, 1.0 - rho}).upper;
      return scaling_residual(x, positive_grid(std::max(3.0, 1.1 * upper), kResidualGridPoints));
    }
    case Statistic::CltNormalized: {
      const CltParams params = clt_params(point.n, point.t, rho);
      const double lambda1 = eigenvalues_sym(sample_covariance(x)).front();
      return (lambda1 - params.tau) / params.varsigma;
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unhandled statistic");
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& f) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t total = config.grid.size() * config.reps;
  std::vector<std::variant<ResultRow, ErrorRecord>> slots(total);

  parallel_for(total, config.workers, [&](std::size_t task) {
    const std::size_t g = task / config.reps;
    const std::size_t r = task % config.reps;
    const GridPoint& point = config.grid[g];
    const std::uint64_t seed = mix_seed(config.master_seed, g, r);
    const double rho = row_rho(config, point);
    try {
      const double value = evaluate_statistic(config, g, seed);
      slots[task] = ResultRow{point.n, point.t, rho, r, config.statistic, value, seed};
    } catch (const Error& e) {
      slots[task] = ErrorRecord{g, point.n, point.t, rho, r, seed, e.kind(), e.what()};
    }
  });

  ExperimentResult result;
  for (auto& slot : slots) {
    if (auto* row = std::get_if<ResultRow>(&slot)) {
      result.rows.push_back(*row);
    } else {
      result.errors.push_back(std::get<ErrorRecord>(std::move(slot)));
    }
  }
  return result;
}

void write_rows_csv(std::ostream& out, std::span<const ResultRow> rows) {
  out << "n,t,rho,rep,statistic,value,seed\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.t << ',' << csv::format(r.rho) << ',' << r.rep << ','
        << to_string(r.statistic) << ',' << csv::format(r.value) << ',' << r.seed << '\n';
  }
}

void write_rows_jsonl(std::ostream& out, const ExperimentResult& result) {
  for (const auto& r : result.rows) {
    json line = {{"n", r.n},         {"t", r.t},
                 {"rho", r.rho},     {"rep", r.rep},
                 {"statistic", std::string(to_string(r.statistic))},
                 {"value", r.value}, {"seed", r.seed}};
    out << line.dump() << '\n';
  }
  for (const auto& e : result.errors) {
    json line = {{"n", e.n},       {"t", e.t},
                 {"rho", e.rho},   {"rep", e.rep},
                 {"seed", e.seed}, {"grid_index", e.grid_index},
                 {"error", std::string(to_string(e.kind))},
                 {"message", e.message}};
    out << line.dump() << '\n';
  }
}

Histogram histogram(std::span<const double> values, std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(lo < hi)) {
    throw Error(ErrorKind::InvalidArgument, "histogram needs bins >= 1 and lo < hi");
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  std::size_t outside = 0;
  for (double v : values) {
    if (!(v >= lo && v <= hi)) {
      ++outside;
      continue;
    }
    const auto k = std::min(bins - 1, static_cast<std::size_t>((v - lo) / width));
    ++counts[k];
  }
  Histogram h{{}, outside};
  h.bins.reserve(bins);
  const double total = static_cast<double>(values.size());
  for (std::size_t k = 0; k < bins; ++k) {
    const double density = values.empty() ? 0.0 : static_cast<double>(counts[k]) / (total * width);
    h.bins.push_back({lo + (static_cast<double>(k) + 0.5) * width, density});
  }
  return h;
}

}  // namespace rmt

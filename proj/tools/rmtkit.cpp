// Command-line front end for the rmtkit library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rmt/csv.hpp"
#include "rmt/error.hpp"
#include "rmt/finance.hpp"
#include "rmt/harness.hpp"
#include "rmt/mp.hpp"
#include "rmt/theory.hpp"

namespace {

using nlohmann::json;

constexpr int kExitDomainError = 1;
constexpr int kExitUsageError = 2;

std::size_t default_workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

// Output goes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw rmt::Error(rmt::ErrorKind::IoError, "cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void print_json(const json& value) { std::cout << value.dump() << '\n'; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Moments {
  double mean;
  double var;
};

Moments moments(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, values.size() > 1 ? ss / (n - 1.0) : 0.0};
}

std::vector<double> values_of(const rmt::ExperimentResult& result) {
  std::vector<double> out;
  out.reserve(result.rows.size());
  for (const auto& row : result.rows) out.push_back(row.value);
  return out;
}

void report_errors(const rmt::ExperimentResult& result) {
  for (const auto& e : result.errors) {
    std::cerr << "warning: " << rmt::to_string(e.kind) << ": grid " << e.grid_index << " rep "
              << e.rep << ": " << e.message << '\n';
  }
}

// A single-point equi-correlated experiment.
rmt::ExperimentConfig single_point(std::size_t n, std::size_t t, double rho, rmt::Statistic stat,
                                   std::size_t reps, std::uint64_t seed, std::size_t workers) {
  rmt::ExperimentConfig config;
  rmt::GridPoint point;
  point.n = n;
  point.t = t;
  point.rho = rho;
  config.grid = {point};
  config.statistic = stat;
  config.reps = reps;
  config.master_seed = seed;
  config.workers = workers;
  return config;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& field : rmt::csv::split(text)) {
    double v = 0.0;
    if (!rmt::csv::parse_double(field, v) || v < 1.0 || v != std::floor(v)) {
      throw rmt::Error(rmt::ErrorKind::InvalidArgument, "bad list entry '" + field + "'");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-matrix spectral statistics toolkit"};
  app.require_subcommand(1);

  // mp-curve
  double mp_q = 1.0;
  double mp_sigma2 = 1.0;
  std::size_t mp_points = 200;
  std::string mp_out;
  auto* mp_cmd = app.add_subcommand("mp-curve", "Marchenko-Pastur density and CDF as CSV x,pdf,cdf");
  mp_cmd->add_option("--q", mp_q, "index Q = T/N (> 0)")->required();
  mp_cmd->add_option("--sigma2", mp_sigma2, "scale sigma^2 (> 0)")->capture_default_str();
  mp_cmd->add_option("--points", mp_points, "number of grid points (>= 1)")->capture_default_str();
  mp_cmd->add_option("--out", mp_out, "output file (default stdout)");

  // simulate
  std::string sim_config;
  std::string sim_out;
  std::string sim_format = "csv";
  std::optional<std::size_t> sim_workers;
  std::optional<std::uint64_t> sim_seed;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte-Carlo experiment from a JSON config");
  sim_cmd->add_option("--config", sim_config, "experiment config (JSON)")->required();
  sim_cmd->add_option("--out", sim_out, "output file (default stdout)");
  sim_cmd->add_option("--format", sim_format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();
  sim_cmd->add_option("--workers", sim_workers, "worker threads (overrides the config)");
  sim_cmd->add_option("--seed", sim_seed, "master seed (overrides the config)");

  // estimate-rho
  std::string rho_input;
  auto* rho_cmd = app.add_subcommand("estimate-rho", "lambda_1(C)/N of a returns CSV as JSON");
  rho_cmd->add_option("--input", rho_input, "returns CSV: Date,TICK1,...")->required();

  // clt-check
  std::size_t clt_n = 0;
  std::size_t clt_t = 0;
  double clt_rho = 0.0;
  std::size_t clt_reps = 0;
  std::uint64_t clt_seed = 0;
  std::size_t clt_workers = default_workers();
  auto* clt_cmd = app.add_subcommand(
      "clt-check", "Moments and KS distance of (lambda_1(S) - tau)/varsigma over replications");
  clt_cmd->add_option("--n", clt_n, "dimension N")->required();
  clt_cmd->add_option("--t", clt_t, "sample size T")->required();
  clt_cmd->add_option("--rho", clt_rho, "equi-correlation in (0, 1)")->required();
  clt_cmd->add_option("--reps", clt_reps, "replications (>= 2)")->required();
  clt_cmd->add_option("--seed", clt_seed, "master seed")->required();
  clt_cmd->add_option("--workers", clt_workers, "worker threads")->capture_default_str();

  // scaling-check
  std::size_t sc_n = 0;
  std::size_t sc_t = 0;
  double sc_rho = 0.0;
  std::uint64_t sc_seed = 0;
  std::size_t sc_points = 200;
  double sc_hi = 3.0;
  auto* sc_cmd = app.add_subcommand(
      "scaling-check", "sup |F^C - fitted MP| over a grid on (0, hi] for one equi-correlated sample");
  sc_cmd->add_option("--n", sc_n, "dimension N")->required();
  sc_cmd->add_option("--t", sc_t, "sample size T")->required();
  sc_cmd->add_option("--rho", sc_rho, "equi-correlation in [0, 1)")->required();
  sc_cmd->add_option("--seed", sc_seed, "seed")->required();
  sc_cmd->add_option("--grid-points", sc_points, "grid points")->capture_default_str();
  sc_cmd->add_option("--hi", sc_hi, "upper grid end")->capture_default_str();

  // bbp-sweep
  double bbp_q = 2.0;
  std::string bbp_t_list;
  double bbp_c = 1.0;
  double bbp_gamma = 1.0;
  std::size_t bbp_reps = 0;
  std::uint64_t bbp_seed = 0;
  std::size_t bbp_workers = default_workers();
  std::string bbp_format = "csv";
  std::string bbp_field = "real";
  auto* bbp_cmd = app.add_subcommand(
      "bbp-sweep", "Regime and KS-to-normal of normalized lambda_1(S) with rho_N = c N^-gamma");
  bbp_cmd->add_option("--q", bbp_q, "index Q = T/N (> 1)")->required();
  bbp_cmd->add_option("--t-list", bbp_t_list, "comma-separated sample sizes")->required();
  bbp_cmd->add_option("--c", bbp_c, "rho_N = c N^-gamma")->required();
  bbp_cmd->add_option("--gamma", bbp_gamma, "rho_N = c N^-gamma")->required();
  bbp_cmd->add_option("--reps", bbp_reps, "replications per T (>= 2)")->required();
  bbp_cmd->add_option("--seed", bbp_seed, "master seed")->required();
  bbp_cmd->add_option("--workers", bbp_workers, "worker threads")->capture_default_str();
  bbp_cmd->add_option("--format", bbp_format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();
  bbp_cmd->add_option("--field", bbp_field, "supercritical scale for real or complex data")
      ->check(CLI::IsMember({"real", "complex"}))
      ->capture_default_str();

  // clip
  std::string clip_input;
  std::string clip_output;
  auto* clip_cmd = app.add_subcommand(
      "clip", "Eigenvalue-clipped correlation matrix of a returns CSV, written as labeled CSV");
  clip_cmd->add_option("--input", clip_input, "returns CSV: Date,TICK1,...")->required();
  clip_cmd->add_option("--output", clip_output, "cleaned matrix CSV")->required();

  // finance
  auto* fin_cmd = app.add_subcommand("finance", "Sector-level empirical analysis");
  fin_cmd->require_subcommand(1);
  std::string fs_returns;
  std::string fs_sectors;
  std::string fs_out;
  auto* fs_cmd = fin_cmd->add_subcommand("summarize", "Per-sector N, T, N/T and lambda_1(C)/N");
  fs_cmd->add_option("--returns", fs_returns, "returns CSV: Date,TICK1,...")->required();
  fs_cmd->add_option("--sectors", fs_sectors, "ticker,sector CSV")->required();
  fs_cmd->add_option("--out", fs_out, "output CSV (default stdout)");
  std::string fr_summary;
  std::string fr_rhobar;
  auto* fr_cmd = fin_cmd->add_subcommand("regress", "OLS of rho_bar on lambda_1(C)/N by sector");
  fr_cmd->add_option("--summary", fr_summary, "CSV with sector,lambda1_over_n")->required();
  fr_cmd->add_option("--rhobar", fr_rhobar, "CSV with sector,rho_bar")->required();
  std::string fh_returns;
  std::string fh_sectors;
  std::string fh_sector;
  std::string fh_out;
  auto* fh_cmd = fin_cmd->add_subcommand(
      "heatmap", "Correlation matrix reordered by average-linkage clustering");
  fh_cmd->add_option("--returns", fh_returns, "returns CSV: Date,TICK1,...")->required();
  fh_cmd->add_option("--sectors", fh_sectors, "ticker,sector CSV")->required();
  fh_cmd->add_option("--sector", fh_sector, "restrict to one sector (default all tickers)");
  fh_cmd->add_option("--out", fh_out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsageError;
  }

  try {
    if (mp_cmd->parsed()) {
      const auto curve = rmt::mp_curve({mp_q, mp_sigma2}, mp_points);
      Output out(mp_out);
      out.stream() << "x,pdf,cdf\n";
      for (const auto& p : curve) {
        out.stream() << rmt::csv::format(p.x) << ',' << rmt::csv::format(p.pdf) << ','
                     << rmt::csv::format(p.cdf) << '\n';
      }
    } else if (sim_cmd->parsed()) {
      rmt::ExperimentConfig config = rmt::load_experiment_config(sim_config);
      if (sim_workers) config.workers = *sim_workers;
      if (sim_seed) config.master_seed = *sim_seed;
      const rmt::ExperimentResult result = rmt::run_experiment(config);
      Output out(sim_out);
      if (sim_format == "csv") {
        rmt::write_rows_csv(out.stream(), result.rows);
      } else {
        rmt::write_rows_jsonl(out.stream(), result);
      }
      report_errors(result);
    } else if (rho_cmd->parsed()) {
      const rmt::ReturnsTable table = rmt::load_returns_table(rho_input);
      print_json({{"n", table.returns.n()},
                  {"t", table.returns.t()},
                  {"lambda1_over_n", rmt::estimate_rho(table.returns)}});
    } else if (clt_cmd->parsed()) {
      if (clt_reps < 2) throw rmt::Error(rmt::ErrorKind::InvalidArgument, "--reps must be >= 2");
      const auto config = single_point(clt_n, clt_t, clt_rho, rmt::Statistic::CltNormalized,
                                        clt_reps, clt_seed, clt_workers);
      rmt::clt_params(clt_n, clt_t, clt_rho);
      const rmt::ExperimentResult result = rmt::run_experiment(config);
      if (!result.errors.empty()) {
        const auto& e = result.errors.front();
        throw rmt::Error(e.kind, e.message);
      }
      const std::vector<double> values = values_of(result);
      const Moments m = moments(values);
      print_json({{"mean", m.mean},
                  {"var", m.var},
                  {"ks", rmt::ks_normal(values)},
                  {"reps", values.size()}});
    } else if (sc_cmd->parsed()) {
      const rmt::DataMatrix x = rmt::sample_equicorr({sc_rho, {}, {}}, sc_n, sc_t, sc_seed);
      print_json({{"residual", rmt::scaling_residual(x, rmt::positive_grid(sc_hi, sc_points))}});
    } else if (bbp_cmd->parsed()) {
      if (bbp_reps < 2) throw rmt::Error(rmt::ErrorKind::InvalidArgument, "--reps must be >= 2");
      const std::vector<std::size_t> ts = parse_size_list(bbp_t_list);
      const rmt::DataField field =
          bbp_field == "real" ? rmt::DataField::Real : rmt::DataField::Complex;
      std::ostringstream body;
      if (bbp_format == "csv") body << "n,t,rho,spike,regime,ks_normal_super,ks_normal_sub\n";
      for (std::size_t k = 0; k < ts.size(); ++k) {
        const std::size_t t = ts[k];
        const auto n = static_cast<std::size_t>(std::llround(static_cast<double>(t) / bbp_q));
        const double q = static_cast<double>(t) / static_cast<double>(n);
        const double rho = bbp_c * std::pow(static_cast<double>(n), -bbp_gamma);
        const double spike = (static_cast<double>(n) - 1.0) * rho + 1.0;
        const rmt::BbpReport report = rmt::bbp_classify(spike, q, t, field);
        const auto config = single_point(n, t, rho, rmt::Statistic::Lambda1S, bbp_reps,
                                          rmt::mix_seed(bbp_seed, k), bbp_workers);
        const rmt::ExperimentResult result = rmt::run_experiment(config);
        if (!result.errors.empty()) {
          const auto& e = result.errors.front();
          throw rmt::Error(e.kind, e.message);
        }
        const std::vector<double> lambda1 = values_of(result);
        auto ks_under = [&](const rmt::BbpReport& norm) {
          std::vector<double> z;
          z.reserve(lambda1.size());
          for (double l : lambda1) z.push_back((l - norm.center) / norm.scale);
          return rmt::ks_normal(z);
        };
        const double ks_super =
            report.regime == rmt::BbpRegime::Supercritical ? ks_under(report) : std::nan("");
        const double ks_sub = ks_under(rmt::bbp_subcritical_normalization(q, t));
        if (bbp_format == "csv") {
          body << n << ',' << t << ',' << rmt::csv::format(rho) << ',' << rmt::csv::format(spike)
               << ',' << rmt::to_string(report.regime) << ',' << rmt::csv::format(ks_super) << ','
               << rmt::csv::format(ks_sub) << '\n';
        } else {
          body << json{{"n", n},
                       {"t", t},
                       {"rho", rho},
                       {"spike", spike},
                       {"regime", std::string(rmt::to_string(report.regime))},
                       {"ks_normal_super", number_or_null(ks_super)},
                       {"ks_normal_sub", number_or_null(ks_sub)}}
                      .dump()
               << '\n';
        }
      }
      std::cout << body.str();
    } else if (clip_cmd->parsed()) {
      const rmt::ReturnsTable table = rmt::load_returns_table(clip_input);
      const rmt::ClipReport report =
          rmt::clip_eigenvalues_report(rmt::correlation(table.returns), table.returns.t());
      std::vector<std::size_t> identity(table.tickers.size());
      std::iota(identity.begin(), identity.end(), std::size_t{0});
      rmt::export_heatmap(report.cleaned, identity, table.tickers, clip_output);
      const rmt::Interval bulk = rmt::mp_support(report.fit);
      print_json({{"bulk_count", report.bulk_count},
                  {"bulk_value", report.bulk_value},
                  {"bulk_lower", bulk.lower},
                  {"bulk_upper", bulk.upper}});
    } else if (fs_cmd->parsed()) {
      const auto rows = rmt::sector_summary(rmt::load_returns_csv(fs_returns, fs_sectors));
      if (fs_out.empty()) {
        std::cout << "sector,n,t,n_over_t,lambda1_over_n\n";
        for (const auto& r : rows) {
          std::cout << r.sector << ',' << r.n << ',' << r.t << ',' << rmt::csv::format(r.n_over_t)
                    << ',' << rmt::csv::format(r.lambda1_over_n) << '\n';
        }
      } else {
        rmt::write_summary_csv(fs_out, rows);
      }
    } else if (fr_cmd->parsed()) {
      const rmt::RegressionResult fit = rmt::regress_files(fr_summary, fr_rhobar);
      print_json({{"slope", fit.slope},
                  {"intercept", fit.intercept},
                  {"r2", fit.r2},
                  {"adj_r2", fit.adj_r2},
                  {"n_points", fit.n_points}});
    } else if (fh_cmd->parsed()) {
      const rmt::SectorDataset ds = rmt::load_returns_csv(fh_returns, fh_sectors);
      std::vector<std::size_t> rows(ds.tickers.size());
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      if (!fh_sector.empty()) {
        rows = ds.rows_of(fh_sector);
        if (rows.empty()) {
          throw rmt::Error(rmt::ErrorKind::MissingSector, "no tickers in sector " + fh_sector);
        }
      }
      rmt::Matrix block(static_cast<Eigen::Index>(rows.size()), ds.returns.values().cols());
      std::vector<std::string> labels;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        block.row(static_cast<Eigen::Index>(r)) =
            ds.returns.values().row(static_cast<Eigen::Index>(rows[r]));
        labels.push_back(ds.tickers[rows[r]]);
      }
      const rmt::Matrix c = rmt::correlation(rmt::DataMatrix(std::move(block)));
      rmt::export_heatmap(c, rmt::cluster_order(c, labels), labels, fh_out);
    }
  } catch (const rmt::Error& e) {
    std::cerr << "error: " << rmt::to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << '\n';
    return kExitDomainError;
  }
  return 0;
}

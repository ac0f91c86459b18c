#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "rmt/harness.hpp"
#include "rmt/mp.hpp"
#include "rmt/theory.hpp"

using namespace rmt;
using rmt::testing::thrown_kind;

namespace {

ExperimentConfig tiny_config(Statistic statistic, std::size_t reps, std::size_t workers) {
  ExperimentConfig c;
  c.grid = {GridPoint{10, 25, 0.0, {}, {}, std::nullopt},
            GridPoint{20, 40, 0.5, {}, {}, std::nullopt},
            GridPoint{15, 30, 0.3, {}, {}, std::nullopt}};
  c.statistic = statistic;
  c.reps = reps;
  c.master_seed = 2024;
  c.workers = workers;
  return c;
}

}  // namespace

TEST_CASE("statistic names") {
  for (Statistic s : {Statistic::Lambda1COverN, Statistic::Lambda1S, Statistic::EsdKDistance,
                      Statistic::ScalingResidual, Statistic::CltNormalized}) {
    CHECK(parse_statistic(to_string(s)) == s);
  }
  CHECK(to_string(Statistic::Lambda1COverN) == "lambda1_C_over_N");
  CHECK(thrown_kind([] { parse_statistic("trace"); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_experiment_config(R"({
    "statistic": "esd_K_distance", "reps": 3, "master_seed": 18446744073709551615, "workers": 2,
    "models": {"two": {"k": 2, "loading_limit": [1.0, 0.5], "loading_decay": [0.0, 1.0],
                       "psi1": 1.0, "idio_dist": "rademacher"}},
    "grid": [{"n": 2, "t": 100, "rho": 0.3, "mu": [1.0, -1.0], "delta": [2.0, 0.5]},
             {"n": 50, "t": 120, "model": "two"}]})");
  CHECK(c.statistic == Statistic::EsdKDistance);
  CHECK(c.reps == 3);
  CHECK(c.master_seed == 18446744073709551615ull);
  CHECK(c.workers == 2);
  REQUIRE(c.grid.size() == 2);
  CHECK(c.grid[0].rho == 0.3);
  CHECK(c.grid[0].mu == std::vector<double>{1.0, -1.0});
  CHECK(c.grid[0].delta == std::vector<double>{2.0, 0.5});
  CHECK(c.grid[1].model == "two");
  const FactorModelSpec& m = c.models.at("two");
  CHECK(m.k == 2);
  CHECK(m.idio_dist == VariateKind::Rademacher);
  CHECK(m.factor_dist == VariateKind::Normal);
  CHECK(m.loadings.loading(2) == std::vector<double>{1.0, 1.0});
  CHECK(grid_rho(c, c.grid[1]) == doctest::Approx(1.25 / 2.25));
  CHECK(grid_rho(c, c.grid[0]) == 0.3);

  const ExperimentConfig d = parse_experiment_config(
      R"({"statistic": "lambda1_S", "grid": [{"n": 5, "t": 10, "rho": 0}]})");
  CHECK(d.reps == 1);
  CHECK(d.workers == 1);
  CHECK(d.master_seed == 0);
}

TEST_CASE("config errors") {
  const auto kind = [](const char* text) {
    return thrown_kind([&] { parse_experiment_config(text); });
  };
  CHECK(kind("{") == ErrorKind::ParseError);
  CHECK(kind("[]") == ErrorKind::ParseError);
  CHECK(kind(R"({"statistic": "lambda1_S"})") == ErrorKind::ParseError);
  CHECK(kind(R"({"grid": [{"n": 5, "t": 10, "rho": 0}]})") == ErrorKind::ParseError);
  CHECK(kind(R"({"statistic": "lambda1_S", "grid": [{"n": 5, "t": 10, "rho": 0}], "extra": 1})") ==
        ErrorKind::ParseError);
  CHECK(kind(R"({"statistic": "lambda1_S", "grid": [{"n": 5, "t": 10}]})") == ErrorKind::ParseError);
  CHECK(kind(R"({"statistic": "lambda1_S", "grid": [{"n": 5, "t": 10, "rho": 0, "model": "m"}]})") ==
        ErrorKind::ParseError);
  CHECK(kind(R"({"statistic": "lambda1_S", "reps": 0, "grid": [{"n": 5, "t": 10, "rho": 0}]})") ==
        ErrorKind::ParseError);
  CHECK(kind(R"({"statistic": "lambda1_S", "reps": "3", "grid": [{"n": 5, "t": 10, "rho": 0}]})") ==
        ErrorKind::ParseError);
  CHECK(kind(R"({"statistic": "mystery", "grid": [{"n": 5, "t": 10, "rho": 0}]})") ==
        ErrorKind::InvalidArgument);
  CHECK(kind(R"({"statistic": "lambda1_S", "grid": []})") == ErrorKind::InvalidArgument);
  CHECK(kind(R"({"statistic": "lambda1_S", "grid": [{"n": 3, "t": 10, "rho": 0.2, "mu": [1]}]})") ==
        ErrorKind::InvalidArgument);
  CHECK(kind(R"({"statistic": "lambda1_S", "grid": [{"n": 5, "t": 10, "model": "nope"}]})") ==
        ErrorKind::InvalidArgument);
  CHECK(thrown_kind([] { load_experiment_config("/nonexistent/config.json"); }) ==
        ErrorKind::IoError);
}

TEST_CASE("single tiny run") {
  ExperimentConfig c;
  c.grid = {GridPoint{10, 25, 0.0, {}, {}, std::nullopt}};
  c.statistic = Statistic::Lambda1COverN;
  const ExperimentResult r = run_experiment(c);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.errors.empty());
  CHECK(r.rows[0].value > 0.0);
  CHECK(r.rows[0].value <= 1.0);
  CHECK(r.rows[0].seed == mix_seed(0, 0, 0));
  CHECK(r.rows[0].n == 10);
  CHECK(r.rows[0].t == 25);
}

TEST_CASE("rows are ordered and seeded by (grid point, replication)") {
  const ExperimentResult r = run_experiment(tiny_config(Statistic::Lambda1S, 4, 3));
  REQUIRE(r.rows.size() == 12);
  for (std::size_t g = 0; g < 3; ++g) {
    for (std::size_t k = 0; k < 4; ++k) {
      const ResultRow& row = r.rows[g * 4 + k];
      CHECK(row.rep == k);
      CHECK(row.seed == mix_seed(2024, g, k));
      CHECK(row.value == evaluate_statistic(tiny_config(Statistic::Lambda1S, 4, 3), g, row.seed));
    }
  }
}

TEST_CASE("results do not depend on the worker count") {
  for (Statistic s : {Statistic::Lambda1COverN, Statistic::Lambda1S, Statistic::EsdKDistance,
                      Statistic::ScalingResidual, Statistic::CltNormalized}) {
    const ExperimentResult one = run_experiment(tiny_config(s, 6, 1));
    const ExperimentResult eight = run_experiment(tiny_config(s, 6, 8));
    CHECK(one.rows == eight.rows);
    CHECK(one.errors == eight.errors);
    const ExperimentResult again = run_experiment(tiny_config(s, 6, 8));
    CHECK(again.rows == eight.rows);
  }
}

TEST_CASE("failing tasks become error records") {
  // rho = 0 has no CLT normalization; the other grid points still run.
  const ExperimentResult r = run_experiment(tiny_config(Statistic::CltNormalized, 5, 4));
  CHECK(r.rows.size() == 10);
  REQUIRE(r.errors.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(r.errors[k].grid_index == 0);
    CHECK(r.errors[k].rep == k);
    CHECK(r.errors[k].kind == ErrorKind::RhoZero);
    CHECK(r.errors[k].seed == mix_seed(2024, 0, k));
  }
  CHECK(r.rows.size() + r.errors.size() == 3 * 5);

  ExperimentConfig factor = tiny_config(Statistic::CltNormalized, 2, 1);
  factor.models["one"] = equicorr_as_factor(0.4);
  factor.grid = {GridPoint{10, 20, 0.0, {}, {}, std::string("one")}};
  const ExperimentResult f = run_experiment(factor);
  CHECK(f.rows.empty());
  REQUIRE(f.errors.size() == 2);
  CHECK(f.errors[0].kind == ErrorKind::InvalidArgument);
}

TEST_CASE("factor-model grid points") {
  ExperimentConfig c;
  c.models["two"] = FactorModelSpec{};
  c.models["two"].k = 2;
  c.models["two"].loadings = LoadingRule::harmonic({1.0, 0.5}, {0.0, 1.0});
  c.models["two"].idio_dist = VariateKind::Rademacher;
  c.grid = {GridPoint{100, 250, 0.0, {}, {}, std::string("two")}};
  c.statistic = Statistic::Lambda1COverN;
  c.reps = 2;
  const ExperimentResult r = run_experiment(c);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].rho == doctest::Approx(1.25 / 2.25));
  CHECK(std::abs(r.rows[0].value - 1.25 / 2.25) < 0.1);
}

TEST_CASE("parallel_for visits each index once") {
  for (std::size_t workers : {1, 2, 8, 64}) {
    std::vector<int> hits(200, 0);
    parallel_for(hits.size(), workers, [&](std::size_t i) { ++hits[i]; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
  parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("record writers") {
  ExperimentResult r;
  r.rows = {{10, 25, 0.5, 0, Statistic::Lambda1S, 0.1, 42},
            {10, 25, 0.5, 1, Statistic::Lambda1S, 1.0 / 3.0, 18446744073709551615ull}};
  r.errors = {{1, 5, 9, 0.0, 2, 7, ErrorKind::RhoZero, "needs rho > 0"}};
  std::ostringstream csv;
  write_rows_csv(csv, r.rows);
  std::istringstream lines(csv.str());
  std::string header;
  std::string first;
  std::string second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(header == "n,t,rho,rep,statistic,value,seed");
  CHECK(first == "10,25,0.5,0,lambda1_S,0.1,42");
  CHECK(second.rfind("10,25,0.5,1,lambda1_S,", 0) == 0);
  const std::string value = second.substr(22, second.find(',', 22) - 22);
  CHECK(std::stod(value) == 1.0 / 3.0);
  CHECK(second.substr(second.rfind(',') + 1) == "18446744073709551615");

  std::ostringstream jsonl;
  write_rows_jsonl(jsonl, r);
  std::istringstream jl(jsonl.str());
  std::string line;
  std::vector<nlohmann::json> docs;
  while (std::getline(jl, line)) docs.push_back(nlohmann::json::parse(line));
  REQUIRE(docs.size() == 3);
  CHECK(docs[1]["value"].get<double>() == 1.0 / 3.0);
  CHECK(docs[1]["seed"].get<std::uint64_t>() == 18446744073709551615ull);
  CHECK(docs[0]["statistic"] == "lambda1_S");
  CHECK(docs[2]["error"] == "RhoZero");
  CHECK(docs[2]["grid_index"] == 1);
  CHECK(docs[2]["message"] == "needs rho > 0");
}

TEST_CASE("histogram") {
  const std::vector<double> same(100, 2.5);
  const Histogram one = histogram(same, 1, 2.0, 3.0);
  REQUIRE(one.bins.size() == 1);
  CHECK(one.bins[0].center == 2.5);
  CHECK(one.bins[0].density == doctest::Approx(1.0));
  CHECK(one.outside == 0);

  const Histogram miss = histogram(same, 4, 5.0, 6.0);
  CHECK(miss.outside == 100);
  for (const auto& b : miss.bins) CHECK(b.density == 0.0);

  const std::vector<double> edges{0.0, 0.5, 1.0, 1.5};
  const Histogram e = histogram(edges, 2, 0.0, 1.0);
  CHECK(e.outside == 1);
  CHECK(e.bins[0].density == doctest::Approx(0.5));
  CHECK(e.bins[1].density == doctest::Approx(1.0));
  double mass = 0.0;
  for (const auto& b : e.bins) mass += b.density * 0.5;
  CHECK(mass == doctest::Approx(0.75));

  CHECK(thrown_kind([&] { histogram(edges, 0, 0.0, 1.0); }) == ErrorKind::InvalidArgument);
  CHECK(thrown_kind([&] { histogram(edges, 3, 1.0, 1.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("bulk histogram follows the fitted MP density") {
  // A single 400 x 400 spectrum puts about 6.7 eigenvalues in each of 60 bins,
  // so one eigenvalue moves a bin by 0.12; the overlay pools replications.
  constexpr std::size_t reps = 20;
  std::vector<double> bulk;
  double lambda1_over_n = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const DataMatrix x = sample_equicorr({0.5, {}, {}}, 400, 1000, mix_seed(31, 0, r));
    const std::vector<double> eigs = eigenvalues_sym(correlation(x));
    lambda1_over_n += eigs.front() / 400.0 / static_cast<double>(reps);
    bulk.insert(bulk.end(), eigs.begin() + 1, eigs.end());
  }
  const MpParams fit = fitted_mp(400, 1000, lambda1_over_n);
  const Interval support = mp_support(fit);
  const Histogram h = histogram(bulk, 60, support.lower, support.upper);
  double worst = 0.0;
  for (const auto& b : h.bins) worst = std::max(worst, std::abs(b.density - mp_pdf(fit, b.center)));
  CHECK(worst <= 0.15);
}

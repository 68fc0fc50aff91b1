#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "varnet/csv.hpp"
#include "varnet/network.hpp"
#include "varnet/pipeline.hpp"
#include "varnet/simulate.hpp"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("varnet_pipe_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const std::string& body) {
  const auto path = dir / "run.cfg";
  varnet::write_text_file(path.string(), body);
  return path.string();
}

// Simulated return panel written as a price-like CSV by cumulating returns
// into a positive level series.
std::string write_price_csv(const fs::path& dir, const std::string& name,
                            std::uint64_t seed, int n = 400) {
  varnet::DgpSpec spec;
  spec.names = {"AAA", "BBB", "CCC"};
  spec.c = Eigen::VectorXd::Zero(3);
  Eigen::MatrixXd A1(3, 3);
  A1 << 0.3, 0.0, 0.0, 0.25, 0.3, 0.0, 0.0, 0.2, 0.25;
  spec.A = {A1};
  spec.sigma_u = Eigen::MatrixXd::Identity(3, 3);
  spec.n = n;
  spec.seed = seed;
  const auto returns = varnet::simulate_var(spec);

  std::string csv = "date";
  for (const auto& nm : returns.names) csv += "," + nm;
  csv += "\n";
  Eigen::VectorXd level = Eigen::VectorXd::Constant(3, 100.0);
  varnet::Date d{1999, 12, 31};  // anchor sorts before the first return date
  csv += varnet::to_string(d);
  for (int k = 0; k < 3; ++k) csv += "," + varnet::format_full(level(k));
  csv += "\n";
  for (Eigen::Index t = 0; t < returns.T(); ++t) {
    for (int k = 0; k < 3; ++k) {
      level(k) *= std::exp(returns.values(t, k) / 100.0);
    }
    csv += varnet::to_string(returns.dates[static_cast<std::size_t>(t)]);
    for (int k = 0; k < 3; ++k) csv += "," + varnet::format_full(level(k));
    csv += "\n";
  }
  const auto path = dir / name;
  varnet::write_text_file(path.string(), csv);
  return path.string();
}

std::vector<std::string> artifact_names() {
  return {"stats.csv",
          "stats_display.csv",
          "model.txt",
          "granger_pvalues.csv",
          "granger_pvalues_display.csv",
          "granger_edges.csv",
          "connectedness.csv",
          "connectedness_display.csv",
          "granger.dot",
          "granger.json",
          "fevd.dot",
          "fevd.json",
          "manifest.txt"};
}

}  // namespace

TEST_CASE("config validation collects every violation") {
  const auto dir = fresh_dir("cfg");

  SUBCASE("empty file misses the required keys") {
    const auto path = write_config(dir, "");
    const auto result = varnet::validate_config(path);
    REQUIRE_FALSE(result.errors.empty());
    const auto has = [&](const std::string& needle) {
      return std::any_of(result.errors.begin(), result.errors.end(),
                         [&](const std::string& e) {
                           return e.find(needle) != std::string::npos;
                         });
    };
    CHECK(has("input is required"));
    CHECK(has("outdir is required"));
  }
  SUBCASE("defaults survive a minimal config") {
    const auto path = write_config(dir,
                                   "input = a.csv\n"
                                   "outdir = out\n");
    const auto result = varnet::validate_config(path);
    CHECK(result.errors.empty());
    CHECK(result.config.horizon == 10);
    CHECK(result.config.lag == 0);
    CHECK(result.config.pmax == 10);
    CHECK(result.config.criterion == varnet::Criterion::kBic);
    CHECK(result.config.levels == std::vector<double>{0.05, 0.10});
    CHECK(result.config.thresholds == std::vector<double>{5.0, 15.0});
    CHECK(result.config.input_kind == "prices");
    CHECK(result.config.missing == varnet::MissingPolicy::kDropRow);
  }
  SUBCASE("full set of keys parses") {
    const auto path = write_config(dir,
                                   "# comment line\n"
                                   "input = a.csv\n"
                                   "input = b.csv\n"
                                   "input_kind = returns\n"
                                   "missing = ffill\n"
                                   "series = X:g1\n"
                                   "series = Y:YY:g2\n"
                                   "lag = 2\n"
                                   "criterion = hq\n"
                                   "pmax = 6\n"
                                   "horizon = 15\n"
                                   "levels = 0.01 0.05\n"
                                   "thresholds = 2 10\n"
                                   "outdir = out\n"
                                   "seed = 42\n");
    const auto result = varnet::validate_config(path);
    CHECK(result.errors.empty());
    CHECK(result.config.inputs == std::vector<std::string>{"a.csv", "b.csv"});
    CHECK(result.config.input_kind == "returns");
    CHECK(result.config.missing == varnet::MissingPolicy::kForwardFill);
    REQUIRE(result.config.series.size() == 2);
    CHECK(result.config.series[1].name == "YY");
    CHECK(result.config.lag == 2);
    CHECK(result.config.criterion == varnet::Criterion::kHq);
    CHECK(result.config.horizon == 15);
    CHECK(result.config.levels == std::vector<double>{0.01, 0.05});
    CHECK(result.config.thresholds == std::vector<double>{2.0, 10.0});
    CHECK(result.config.seed == 42);
  }
  SUBCASE("violations are reported together") {
    const auto path = write_config(dir,
                                   "input = a.csv\n"
                                   "outdir = out\n"
                                   "thresholds = 15 5\n"
                                   "horizon = 0\n"
                                   "criterion = sbc\n");
    const auto result = varnet::validate_config(path);
    CHECK(result.errors.size() >= 3);
    const auto has = [&](const std::string& needle) {
      return std::any_of(result.errors.begin(), result.errors.end(),
                         [&](const std::string& e) {
                           return e.find(needle) != std::string::npos;
                         });
    };
    CHECK(has("thresholds must be increasing"));
    CHECK(has("horizon"));
    CHECK(has("criterion"));
  }
  SUBCASE("unknown keys are flagged") {
    const auto path = write_config(dir,
                                   "input = a.csv\n"
                                   "outdir = out\n"
                                   "horizonn = 10\n");
    const auto result = varnet::validate_config(path);
    REQUIRE_FALSE(result.errors.empty());
    CHECK(result.errors[0].find("horizonn") != std::string::npos);
  }
  SUBCASE("missing file is an error, not a crash") {
    const auto result = varnet::validate_config((dir / "absent.cfg").string());
    CHECK_FALSE(result.errors.empty());
  }
}

TEST_CASE("end-to-end pipeline writes every artifact") {
  const auto dir = fresh_dir("run");
  const auto csv = write_price_csv(dir, "prices.csv", 90210);
  const auto outdir = dir / "out";

  varnet::RunConfig config;
  config.inputs = {csv};
  config.outdir = outdir.string();
  config.lag = 1;

  std::ostringstream err;
  const int rc = varnet::run_pipeline(config, err);
  INFO(err.str());
  REQUIRE(rc == 0);

  for (const auto& name : artifact_names()) {
    INFO(name);
    CHECK(fs::exists(outdir / name));
  }

  // Spot-check artifact contents parse back.
  const auto pvals = varnet::read_text_file((outdir / "granger_pvalues.csv").string());
  CHECK(pvals.find("Causality From") != std::string::npos);
  CHECK(pvals.find("AAA") != std::string::npos);

  const auto graph = varnet::network_from_json(
      varnet::read_text_file((outdir / "granger.json").string()));
  CHECK(graph.kind == "granger");
  CHECK(graph.nodes.size() == 3);

  const auto fevd_graph = varnet::network_from_json(
      varnet::read_text_file((outdir / "fevd.json").string()));
  CHECK(fevd_graph.kind == "fevd");

  const auto manifest = varnet::read_text_file((outdir / "manifest.txt").string());
  CHECK(manifest.find("sha256") != std::string::npos);
  CHECK(manifest.find("prices.csv") != std::string::npos);

  const auto model = varnet::load_model((outdir / "model.txt").string());
  CHECK(model.p == 1);
  CHECK(model.names == std::vector<std::string>{"AAA", "BBB", "CCC"});

  SUBCASE("reruns are byte-identical") {
    std::map<std::string, std::string> before;
    for (const auto& name : artifact_names()) {
      before[name] = varnet::read_text_file((outdir / name).string());
    }
    std::ostringstream err2;
    REQUIRE(varnet::run_pipeline(config, err2) == 0);
    for (const auto& name : artifact_names()) {
      INFO(name);
      CHECK(varnet::read_text_file((outdir / name).string()) == before[name]);
    }
  }
}

TEST_CASE("pipeline failures exit with the stage code and clean up") {
  const auto dir = fresh_dir("fail");

  SUBCASE("disjoint inputs fail in ingest") {
    const auto a = write_price_csv(dir, "a.csv", 1);
    // A second panel far in the future shares no dates with the first. The
    // helper always starts at the fixed anchor, so rewrite its dates.
    varnet::DgpSpec spec;
    spec.names = {"ZZZ"};
    spec.c = Eigen::VectorXd::Zero(1);
    spec.A = {Eigen::MatrixXd::Constant(1, 1, 0.2)};
    spec.sigma_u = Eigen::MatrixXd::Identity(1, 1);
    spec.n = 50;
    spec.seed = 2;
    const auto panel = varnet::simulate_var(spec);
    std::string csv = "date,ZZZ\n";
    varnet::Date d{2031, 1, 1};
    for (Eigen::Index t = 0; t < panel.T(); ++t) {
      csv += varnet::to_string(d) + "," +
             varnet::format_full(100.0 + panel.values(t, 0)) + "\n";
      d = varnet::next_day(d);
    }
    const auto b = (dir / "b.csv").string();
    varnet::write_text_file(b, csv);

    varnet::RunConfig config;
    config.inputs = {a, b};
    config.outdir = (dir / "out").string();
    std::ostringstream err;
    CHECK(varnet::run_pipeline(config, err) == 20);
    CHECK(err.str().find("ingest") != std::string::npos);
    CHECK(err.str().find("empty date intersection") != std::string::npos);
  }
  SUBCASE("an unreachable input fails in ingest") {
    varnet::RunConfig config;
    config.inputs = {(dir / "nope.csv").string()};
    config.outdir = (dir / "out").string();
    std::ostringstream err;
    CHECK(varnet::run_pipeline(config, err) == 20);
  }
  SUBCASE("an oversized lag fails in fit and removes partial outputs") {
    const auto csv = write_price_csv(dir, "short.csv", 3, 30);
    varnet::RunConfig config;
    config.inputs = {csv};
    config.outdir = (dir / "out").string();
    config.lag = 9;  // 29 return rows cannot support VAR(9) in 3 variables
    std::ostringstream err;
    CHECK(varnet::run_pipeline(config, err) == 30);
    CHECK(err.str().find("fit") != std::string::npos);
    CHECK_FALSE(fs::exists(fs::path(config.outdir) / "stats.csv"));
    CHECK_FALSE(fs::exists(fs::path(config.outdir) / "model.txt"));
  }
}

TEST_CASE("series specs route columns across inputs") {
  const auto dir = fresh_dir("route");
  const auto csv = write_price_csv(dir, "p.csv", 5);

  varnet::RunConfig config;
  config.inputs = {csv};
  config.series = {varnet::parse_column_spec("AAA:g1"),
                   varnet::parse_column_spec("CCC:g2")};
  config.input_kind = "prices";

  const auto panel = varnet::load_inputs(config);
  CHECK(panel.names == std::vector<std::string>{"AAA", "CCC"});
  CHECK(panel.partition.label_of("AAA") == "g1");
  CHECK(panel.partition.label_of("CCC") == "g2");
  CHECK(panel.T() == 400);  // one differencing step from 401 price rows

  varnet::RunConfig missing = config;
  missing.series = {varnet::parse_column_spec("QQQ:g1")};
  CHECK_THROWS_AS(varnet::load_inputs(missing), std::invalid_argument);
}

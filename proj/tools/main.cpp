#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "varnet/csv.hpp"
#include "varnet/diagnostics.hpp"
#include "varnet/fevd.hpp"
#include "varnet/granger.hpp"
#include "varnet/network.hpp"
#include "varnet/pipeline.hpp"
#include "varnet/report.hpp"
#include "varnet/simulate.hpp"
#include "varnet/var.hpp"
#include "varnet/version.hpp"

namespace {

struct IngestArgs {
  std::vector<std::string> inputs;
  std::string input_kind = "prices";
  std::string missing = "drop";
  std::vector<std::string> series;
};

void add_ingest_flags(CLI::App* cmd, IngestArgs& args) {
  cmd->add_option("--input", args.inputs, "input CSV (repeatable)")
      ->required();
  cmd->add_option("--input-kind", args.input_kind,
                  "whether inputs hold price levels or pre-computed returns")
      ->check(CLI::IsMember({"prices", "returns"}));
  cmd->add_option("--missing", args.missing, "missing-cell policy")
      ->check(CLI::IsMember({"drop", "ffill"}));
  cmd->add_option("--series", args.series,
                  "COL, COL:GROUP or COL:NAME:GROUP column mapping (repeatable)");
}

varnet::RunConfig ingest_config(const IngestArgs& args) {
  varnet::RunConfig config;
  config.inputs = args.inputs;
  config.input_kind = args.input_kind;
  config.missing = args.missing == "ffill" ? varnet::MissingPolicy::kForwardFill
                                           : varnet::MissingPolicy::kDropRow;
  for (const auto& s : args.series) {
    config.series.push_back(varnet::parse_column_spec(s));
  }
  return config;
}

void write_or_print(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
  } else {
    varnet::write_text_file(path, content);
  }
}

varnet::GroupPartition partition_with_overrides(
    const std::vector<std::string>& names,
    const std::vector<std::string>& overrides) {
  varnet::GroupPartition partition = varnet::single_group(names);
  for (const auto& text : overrides) {
    const auto colon = text.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
      throw std::invalid_argument("bad --group '" + text +
                                  "' (expected NAME:LABEL)");
    }
    const std::string name = text.substr(0, colon);
    if (partition.group_of.find(name) == partition.group_of.end()) {
      throw std::invalid_argument("--group names unknown variable " + name);
    }
    partition.group_of[name] = text.substr(colon + 1);
  }
  return partition;
}

std::string coefficients_csv(const varnet::VarModel& model) {
  std::string out = "term";
  for (const auto& n : model.names) out += "," + n;
  out += "\n";
  const auto row = [&out](const std::string& label, const auto& values) {
    out += label;
    for (Eigen::Index j = 0; j < values.size(); ++j) {
      out += "," + varnet::format_full(values(j));
    }
    out += "\n";
  };
  row("c", model.c.transpose());
  for (int l = 1; l <= model.p; ++l) {
    const auto& a = model.A[static_cast<std::size_t>(l - 1)];
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      row("A" + std::to_string(l) + "." + model.names[static_cast<std::size_t>(i)],
          a.row(i));
    }
  }
  for (Eigen::Index i = 0; i < model.sigma_u.rows(); ++i) {
    row("sigma_u." + model.names[static_cast<std::size_t>(i)],
        model.sigma_u.row(i));
  }
  return out;
}

void warn_failures(const varnet::PValueMatrix& pm) {
  for (const auto& f : pm.failures) {
    std::cerr << "warning: test " << pm.names[static_cast<std::size_t>(f.source)]
              << " -> " << pm.names[static_cast<std::size_t>(f.target)]
              << " failed: " << f.reason << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Connectedness of a return panel: VAR estimation, Granger-causality "
      "networks and generalized variance-decomposition spillover tables"};
  app.require_subcommand(1);
  app.set_version_flag("--version", varnet::kVersion);
  int exit_code = 0;

  // stats
  auto* stats_cmd = app.add_subcommand(
      "stats", "Per-series summary statistics with normality and unit-root tests");
  auto stats_ingest = std::make_shared<IngestArgs>();
  auto stats_out = std::make_shared<std::string>("-");
  auto stats_decimals = std::make_shared<int>(-1);
  add_ingest_flags(stats_cmd, *stats_ingest);
  stats_cmd->add_option("--out", *stats_out, "output file, - for stdout");
  stats_cmd->add_option("--decimals", *stats_decimals,
                        "fixed display decimals (full precision if omitted)");
  stats_cmd->callback([=]() {
    const varnet::ReturnPanel panel = varnet::load_inputs(ingest_config(*stats_ingest));
    const auto stats = varnet::summary_stats(panel);
    write_or_print(*stats_out, varnet::stats_csv(panel.names, stats, *stats_decimals));
  });

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Estimate the VAR and serialize the model");
  auto fit_ingest = std::make_shared<IngestArgs>();
  auto fit_lag = std::make_shared<int>(0);
  auto fit_select = std::make_shared<bool>(false);
  auto fit_criterion = std::make_shared<std::string>("bic");
  auto fit_pmax = std::make_shared<int>(10);
  auto fit_model_out = std::make_shared<std::string>("model.txt");
  auto fit_out = std::make_shared<std::string>("-");
  add_ingest_flags(fit_cmd, *fit_ingest);
  auto* lag_opt = fit_cmd->add_option("--lag", *fit_lag, "fixed lag order p (>= 1)");
  auto* select_opt =
      fit_cmd->add_flag("--select-lag", *fit_select, "pick p by information criterion");
  lag_opt->excludes(select_opt);
  fit_cmd->add_option("--criterion", *fit_criterion, "criterion for --select-lag")
      ->check(CLI::IsMember({"aic", "bic", "hq"}));
  fit_cmd->add_option("--pmax", *fit_pmax, "largest lag searched by --select-lag");
  fit_cmd->add_option("--model-out", *fit_model_out, "model file to write");
  fit_cmd->add_option("--out", *fit_out, "coefficient CSV, - for stdout");
  fit_cmd->callback([=]() {
    if (*fit_lag < 1 && !*fit_select) {
      throw std::invalid_argument("give --lag P or --select-lag");
    }
    const varnet::ReturnPanel panel = varnet::load_inputs(ingest_config(*fit_ingest));
    const int p = *fit_select
                      ? varnet::select_lag(panel, *fit_pmax,
                                           varnet::parse_criterion(*fit_criterion))
                      : *fit_lag;
    const varnet::VarModel model = varnet::fit_var(panel, p);
    varnet::save_model(model, *fit_model_out);
    write_or_print(*fit_out, coefficients_csv(model));
    const auto stab = varnet::is_stable(model);
    std::cerr << "fitted VAR(" << p << ") on " << model.t_effective
              << " observations, max companion modulus " << stab.max_modulus
              << (stab.stable ? "" : " (UNSTABLE)") << "\n";
  });

  // granger
  auto* granger_cmd = app.add_subcommand(
      "granger", "Pairwise noncausality Wald tests on a fitted model");
  auto granger_model = std::make_shared<std::string>();
  auto granger_levels = std::make_shared<std::vector<double>>(std::vector<double>{0.05, 0.10});
  auto granger_robust = std::make_shared<bool>(false);
  auto granger_out_p = std::make_shared<std::string>("-");
  auto granger_out_edges = std::make_shared<std::string>();
  auto granger_decimals = std::make_shared<int>(-1);
  granger_cmd->add_option("--model", *granger_model, "model file from fit")->required();
  granger_cmd->add_option("--levels", *granger_levels,
                          "significance bands, strictly increasing");
  granger_cmd->add_flag("--robust", *granger_robust,
                        "HC0 covariance (needs a freshly fitted model)");
  granger_cmd->add_option("--out-pvalues", *granger_out_p, "p-value CSV, - for stdout");
  granger_cmd->add_option("--out-edges", *granger_out_edges, "edge list CSV");
  granger_cmd->add_option("--decimals", *granger_decimals,
                          "fixed display decimals for the p-value CSV");
  granger_cmd->callback([=]() {
    const varnet::VarModel model = varnet::load_model(*granger_model);
    const varnet::PValueMatrix pm = varnet::pvalue_matrix(model, *granger_robust);
    warn_failures(pm);
    write_or_print(*granger_out_p, varnet::pvalues_csv(pm, *granger_decimals));
    if (!granger_out_edges->empty()) {
      const auto graph = varnet::causal_network(pm, *granger_levels);
      varnet::write_text_file(*granger_out_edges, varnet::edges_csv(graph));
    }
  });

  // fevd
  auto* fevd_cmd = app.add_subcommand(
      "fevd", "Generalized variance-decomposition connectedness table");
  auto fevd_model = std::make_shared<std::string>();
  auto fevd_h = std::make_shared<int>(10);
  auto fevd_groups = std::make_shared<std::vector<std::string>>();
  auto fevd_out = std::make_shared<std::string>("-");
  auto fevd_decimals = std::make_shared<int>(-1);
  fevd_cmd->add_option("--model", *fevd_model, "model file from fit")->required();
  fevd_cmd->add_option("--horizon", *fevd_h, "forecast horizon");
  fevd_cmd->add_option("--group", *fevd_groups,
                       "NAME:LABEL group override (repeatable; default one group)");
  fevd_cmd->add_option("--out", *fevd_out, "connectedness CSV, - for stdout");
  fevd_cmd->add_option("--decimals", *fevd_decimals, "fixed display decimals");
  fevd_cmd->callback([=]() {
    const varnet::VarModel model = varnet::load_model(*fevd_model);
    const auto partition = partition_with_overrides(model.names, *fevd_groups);
    const auto table = varnet::connectedness_table(
        varnet::sgvd(varnet::gvd(model, *fevd_h)), partition);
    write_or_print(*fevd_out, varnet::connectedness_csv(table, *fevd_decimals));
  });

  // network
  auto* network_cmd = app.add_subcommand(
      "network", "Export a causal or spillover network as DOT and JSON");
  auto net_kind = std::make_shared<std::string>();
  auto net_model = std::make_shared<std::string>();
  auto net_levels = std::make_shared<std::vector<double>>(std::vector<double>{0.05, 0.10});
  auto net_h = std::make_shared<int>(10);
  auto net_thresholds = std::make_shared<std::vector<double>>(std::vector<double>{5.0, 15.0});
  auto net_groups = std::make_shared<std::vector<std::string>>();
  auto net_out_dot = std::make_shared<std::string>();
  auto net_out_json = std::make_shared<std::string>();
  network_cmd->add_option("--kind", *net_kind, "granger or fevd")
      ->required()
      ->check(CLI::IsMember({"granger", "fevd"}));
  network_cmd->add_option("--model", *net_model, "model file from fit")->required();
  network_cmd->add_option("--levels", *net_levels, "granger significance bands");
  network_cmd->add_option("--horizon", *net_h, "fevd forecast horizon");
  network_cmd->add_option("--thresholds", *net_thresholds, "fevd percent thresholds");
  network_cmd->add_option("--group", *net_groups, "NAME:LABEL group override");
  network_cmd->add_option("--out-dot", *net_out_dot, "DOT file to write");
  network_cmd->add_option("--out-json", *net_out_json, "JSON file to write");
  network_cmd->callback([=]() {
    if (net_out_dot->empty() && net_out_json->empty()) {
      throw std::invalid_argument("give --out-dot and/or --out-json");
    }
    const varnet::VarModel model = varnet::load_model(*net_model);
    const auto partition = partition_with_overrides(model.names, *net_groups);
    varnet::NetworkGraph graph;
    if (*net_kind == "granger") {
      const auto pm = varnet::pvalue_matrix(model);
      warn_failures(pm);
      graph = varnet::causal_network(pm, partition, *net_levels);
    } else {
      const auto table = varnet::connectedness_table(
          varnet::sgvd(varnet::gvd(model, *net_h)), partition);
      graph = varnet::threshold_network(table, *net_thresholds);
    }
    if (!net_out_dot->empty()) {
      varnet::write_text_file(*net_out_dot, varnet::to_dot(graph));
    }
    if (!net_out_json->empty()) {
      varnet::write_text_file(*net_out_json, varnet::to_json(graph));
    }
  });

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Draw a synthetic panel from a VAR process");
  auto sim_spec = std::make_shared<std::string>();
  auto sim_out = std::make_shared<std::string>();
  sim_cmd->add_option("--spec", *sim_spec, "process description file")->required();
  sim_cmd->add_option("--out", *sim_out, "panel CSV to write")->required();
  sim_cmd->callback([=]() {
    const varnet::DgpSpec spec = varnet::load_dgp_spec(*sim_spec);
    varnet::write_return_panel_csv(*sim_out, varnet::simulate_var(spec));
  });

  // mc
  auto* mc_cmd = app.add_subcommand(
      "mc", "Monte Carlo rejection rate of a test under a known process");
  auto mc_spec = std::make_shared<std::string>();
  auto mc_test = std::make_shared<std::string>();
  auto mc_level = std::make_shared<double>(0.05);
  auto mc_reps = std::make_shared<long>(500);
  auto mc_out = std::make_shared<std::string>("-");
  mc_cmd->add_option("--spec", *mc_spec, "process description file")->required();
  mc_cmd->add_option("--test", *mc_test,
                     "granger:SOURCE:TARGET, jb:VAR or adf:VAR")->required();
  mc_cmd->add_option("--level", *mc_level, "nominal significance level");
  mc_cmd->add_option("--reps", *mc_reps, "replications (>= 100)");
  mc_cmd->add_option("--out", *mc_out, "one-row CSV summary, - for stdout");
  mc_cmd->callback([=]() {
    const varnet::DgpSpec spec = varnet::load_dgp_spec(*mc_spec);
    const auto r = varnet::mc_rejection_rate(spec, *mc_test, *mc_level, *mc_reps);
    std::string csv = "test,level,reps,exclusions,rejections,rate\n";
    csv += *mc_test + "," + varnet::format_full(*mc_level) + "," +
           std::to_string(r.reps) + "," + std::to_string(r.exclusions) + "," +
           std::to_string(r.rejections) + "," + varnet::format_full(r.rate) + "\n";
    write_or_print(*mc_out, csv);
  });

  // run
  auto* run_cmd = app.add_subcommand(
      "run", "Full pipeline from a config file: ingest, stats, fit, tests, tables, networks");
  auto run_config_path = std::make_shared<std::string>();
  run_cmd->add_option("--config", *run_config_path, "key=value config file")->required();
  run_cmd->callback([=, &exit_code]() {
    const varnet::ConfigResult res = varnet::validate_config(*run_config_path);
    if (!res.errors.empty()) {
      for (const auto& e : res.errors) std::cerr << "config: " << e << "\n";
      exit_code = 10;
      return;
    }
    exit_code = varnet::run_pipeline(res.config, std::cerr);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}

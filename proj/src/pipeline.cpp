#include "varnet/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "varnet/diagnostics.hpp"
#include "varnet/fevd.hpp"
#include "varnet/granger.hpp"
#include "varnet/network.hpp"
#include "varnet/report.hpp"
#include "varnet/version.hpp"

namespace varnet {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_int(const std::string& s, long long& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto r = std::from_chars(first, last, out);
  return r.ec == std::errc() && r.ptr == last;
}

struct LevelsParse {
  std::vector<double> values;
  bool ok = false;
};

LevelsParse parse_number_list(const std::string& value) {
  LevelsParse out;
  for (const auto& tok : split_ws(value)) {
    const auto v = parse_double(tok);
    if (!v) return out;
    out.values.push_back(*v);
  }
  out.ok = !out.values.empty();
  return out;
}

// First line of a CSV file, for routing global series specs to the input
// that carries the column.
std::vector<std::string> header_columns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("'" + path + "': empty file");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xef\xbb\xbf") == 0) {
    line.erase(0, 3);
  }
  auto cols = split_csv_line(line);
  for (auto& c : cols) c = trim(c);
  return cols;
}

}  // namespace

ReturnPanel load_inputs(const RunConfig& config) {
  // Route each series spec to the unique input holding its column.
  std::vector<PanelSchema> schemas(config.inputs.size());
  for (auto& s : schemas) s.missing = config.missing;
  if (!config.series.empty()) {
    std::vector<std::vector<std::string>> headers;
    headers.reserve(config.inputs.size());
    for (const auto& path : config.inputs) headers.push_back(header_columns(path));
    for (const auto& spec : config.series) {
      int hits = 0;
      for (std::size_t f = 0; f < config.inputs.size(); ++f) {
        const auto& h = headers[f];
        if (std::find(h.begin() + 1, h.end(), spec.csv_column) != h.end()) {
          schemas[f].columns.push_back(spec);
          ++hits;
        }
      }
      if (hits == 0) {
        throw std::invalid_argument("series column '" + spec.csv_column +
                                    "' not found in any input");
      }
      if (hits > 1) {
        throw std::invalid_argument("series column '" + spec.csv_column +
                                    "' appears in multiple inputs");
      }
    }
  }

  if (config.input_kind == "prices") {
    std::vector<PricePanel> panels;
    GroupPartition partition;
    for (std::size_t f = 0; f < config.inputs.size(); ++f) {
      panels.push_back(load_price_panel(config.inputs[f], schemas[f]));
      const GroupPartition part =
          partition_from_schema(schemas[f], panels.back().names);
      for (const auto& [name, group] : part.group_of) {
        partition.group_of[name] = group;
      }
    }
    const PricePanel merged = align(panels);
    return log_returns(merged, partition);
  }

  std::vector<ReturnPanel> panels;
  for (std::size_t f = 0; f < config.inputs.size(); ++f) {
    panels.push_back(load_return_panel(config.inputs[f], schemas[f]));
  }
  if (panels.size() == 1) return panels[0];
  std::vector<detail::Table> tables;
  GroupPartition partition;
  for (auto& p : panels) {
    for (const auto& [name, group] : p.partition.group_of) {
      partition.group_of[name] = group;
    }
    tables.push_back({std::move(p.dates), std::move(p.names), std::move(p.values)});
  }
  detail::Table merged = detail::align_tables(tables);
  ReturnPanel out{std::move(merged.dates), std::move(merged.names),
                  std::move(merged.values), std::move(partition)};
  out.validate();
  return out;
}

namespace {

std::string manifest_text(const RunConfig& config) {
  std::string out = "varnet manifest v1\n";
  out += std::string("version ") + kVersion + "\n";
  out += "config\n";
  for (const auto& in : config.inputs) out += "  input=" + in + "\n";
  out += "  input_kind=" + config.input_kind + "\n";
  out += std::string("  missing=") +
         (config.missing == MissingPolicy::kDropRow ? "drop" : "ffill") + "\n";
  for (const auto& s : config.series) {
    out += "  series=" + s.csv_column + ":" + s.name + ":" + s.group + "\n";
  }
  if (config.lag > 0) {
    out += "  lag=" + std::to_string(config.lag) + "\n";
  } else {
    out += "  lag=auto\n";
    out += "  criterion=" + criterion_name(config.criterion) + "\n";
    out += "  pmax=" + std::to_string(config.pmax) + "\n";
  }
  out += "  horizon=" + std::to_string(config.horizon) + "\n";
  out += "  levels=";
  for (std::size_t i = 0; i < config.levels.size(); ++i) {
    out += (i ? " " : "") + format_full(config.levels[i]);
  }
  out += "\n  thresholds=";
  for (std::size_t i = 0; i < config.thresholds.size(); ++i) {
    out += (i ? " " : "") + format_full(config.thresholds[i]);
  }
  out += "\n  outdir=" + config.outdir + "\n";
  out += "  seed=" + std::to_string(config.seed) + "\n";
  out += "inputs\n";
  for (const auto& in : config.inputs) {
    out += in + " sha256 " + sha256_hex_file(in) + "\n";
  }
  return out;
}

}  // namespace

ConfigResult validate_config(const std::string& path) {
  ConfigResult result;
  RunConfig& c = result.config;
  auto& errors = result.errors;

  std::ifstream in(path);
  if (!in) {
    errors.push_back("cannot open '" + path + "'");
    return result;
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected key=value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "input") {
      if (value.empty()) {
        errors.push_back("input needs a file path");
      } else {
        c.inputs.push_back(value);
      }
    } else if (key == "input_kind") {
      if (value != "prices" && value != "returns") {
        errors.push_back("input_kind must be prices or returns");
      } else {
        c.input_kind = value;
      }
    } else if (key == "missing") {
      if (value == "drop") {
        c.missing = MissingPolicy::kDropRow;
      } else if (value == "ffill") {
        c.missing = MissingPolicy::kForwardFill;
      } else {
        errors.push_back("missing must be drop or ffill");
      }
    } else if (key == "series") {
      try {
        c.series.push_back(parse_column_spec(value));
      } catch (const std::exception& e) {
        errors.push_back(e.what());
      }
    } else if (key == "lag") {
      long long v = 0;
      if (value == "auto") {
        c.lag = 0;
      } else if (parse_int(value, v) && v >= 1) {
        c.lag = static_cast<int>(v);
      } else {
        errors.push_back("lag must be auto or a positive integer");
      }
    } else if (key == "criterion") {
      try {
        c.criterion = parse_criterion(value);
      } catch (const std::exception& e) {
        errors.push_back(e.what());
      }
    } else if (key == "pmax") {
      long long v = 0;
      if (parse_int(value, v) && v >= 1) {
        c.pmax = static_cast<int>(v);
      } else {
        errors.push_back("pmax must be a positive integer");
      }
    } else if (key == "horizon") {
      long long v = 0;
      if (parse_int(value, v) && v >= 1) {
        c.horizon = static_cast<int>(v);
      } else {
        errors.push_back("horizon must be >= 1");
      }
    } else if (key == "levels") {
      const auto parsed = parse_number_list(value);
      bool ok = parsed.ok;
      for (std::size_t i = 0; ok && i < parsed.values.size(); ++i) {
        ok = parsed.values[i] > 0.0 && parsed.values[i] < 1.0 &&
             (i == 0 || parsed.values[i] > parsed.values[i - 1]);
      }
      if (ok) {
        c.levels = parsed.values;
      } else {
        errors.push_back("levels must be strictly increasing in (0,1)");
      }
    } else if (key == "thresholds") {
      const auto parsed = parse_number_list(value);
      bool ok = parsed.ok;
      for (std::size_t i = 0; ok && i < parsed.values.size(); ++i) {
        ok = parsed.values[i] > 0.0 &&
             (i == 0 || parsed.values[i] > parsed.values[i - 1]);
      }
      if (ok) {
        c.thresholds = parsed.values;
      } else {
        errors.push_back("thresholds must be increasing");
      }
    } else if (key == "outdir") {
      c.outdir = value;
    } else if (key == "seed") {
      unsigned long long v = 0;
      const char* first = value.data();
      const char* last = value.data() + value.size();
      const auto r = std::from_chars(first, last, v);
      if (r.ec == std::errc() && r.ptr == last) {
        c.seed = v;
      } else {
        errors.push_back("seed must be a nonnegative integer");
      }
    } else {
      errors.push_back("unknown key '" + key + "'");
    }
  }
  if (c.inputs.empty()) errors.push_back("input is required");
  if (c.outdir.empty()) errors.push_back("outdir is required");
  return result;
}

int run_pipeline(const RunConfig& config, std::ostream& err) {
  namespace fs = std::filesystem;
  std::vector<std::string> written;
  const auto emit = [&](const std::string& name, const std::string& content) {
    const std::string path = (fs::path(config.outdir) / name).string();
    write_text_file(path, content);
    written.push_back(path);
  };
  const auto cleanup = [&written]() {
    for (const auto& p : written) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  };

  std::string stage = "config";
  try {
    if (config.inputs.empty() || config.outdir.empty()) {
      throw std::invalid_argument("input and outdir are required");
    }
    if (config.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    std::error_code ec;
    fs::create_directories(config.outdir, ec);
    if (ec) {
      throw std::invalid_argument("cannot create output directory '" +
                                  config.outdir + "'");
    }

    stage = "ingest";
    const ReturnPanel panel = load_inputs(config);
    const auto stats = summary_stats(panel);
    emit("stats.csv", stats_csv(panel.names, stats));
    emit("stats_display.csv", stats_csv(panel.names, stats, 2));

    stage = "fit";
    const int p = config.lag > 0
                      ? config.lag
                      : select_lag(panel, config.pmax, config.criterion);
    const VarModel model = fit_var(panel, p);
    {
      const std::string path = (fs::path(config.outdir) / "model.txt").string();
      save_model(model, path);
      written.push_back(path);
    }

    stage = "granger";
    const PValueMatrix pm = pvalue_matrix(model);
    emit("granger_pvalues.csv", pvalues_csv(pm));
    emit("granger_pvalues_display.csv", pvalues_csv(pm, 3));
    const NetworkGraph causal = causal_network(pm, panel.partition, config.levels);
    emit("granger_edges.csv", edges_csv(causal));

    stage = "fevd";
    const ConnectednessTable table =
        connectedness_table(sgvd(gvd(model, config.horizon)), panel.partition);
    emit("connectedness.csv", connectedness_csv(table));
    emit("connectedness_display.csv", connectedness_csv(table, 2));

    stage = "export";
    const NetworkGraph spill = threshold_network(table, config.thresholds);
    emit("granger.dot", to_dot(causal));
    emit("granger.json", to_json(causal));
    emit("fevd.dot", to_dot(spill));
    emit("fevd.json", to_json(spill));
    emit("manifest.txt", manifest_text(config));
    return 0;
  } catch (const std::exception& e) {
    err << stage << ": " << e.what() << "\n";
    cleanup();
    if (stage == "config") return 10;
    if (stage == "ingest") return 20;
    if (stage == "fit") return 30;
    if (stage == "granger") return 40;
    if (stage == "fevd") return 50;
    return 60;
  }
}

}  // namespace varnet

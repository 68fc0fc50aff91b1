#include "varnet/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace varnet {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct RawRow {
  Date date;
  std::vector<std::optional<double>> cells;  // one per mapped column
};

// Parses the file into date-keyed rows of optional cells; applies the
// missing-data policy; returns a detail::Table sorted by date.
detail::Table load_table(const std::string& path, const PanelSchema& schema,
                         GroupPartition* partition_out) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("'" + path + "': empty file");
  }
  // Drop a UTF-8 BOM if present.
  if (line.size() >= 3 && line.compare(0, 3, "\xef\xbb\xbf") == 0) {
    line.erase(0, 3);
  }
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  if (header.empty() || header[0] != "date") {
    throw std::invalid_argument("'" + path + "': first column must be named 'date'");
  }

  // Resolve the schema against the header.
  std::vector<ColumnSpec> specs = schema.columns;
  if (specs.empty()) {
    for (std::size_t i = 1; i < header.size(); ++i) {
      specs.push_back({header[i], header[i], "all"});
    }
  }
  std::vector<std::size_t> col_index;
  std::vector<std::string> names;
  for (const auto& spec : specs) {
    auto it = std::find(header.begin() + 1, header.end(), spec.csv_column);
    if (it == header.end()) {
      throw std::invalid_argument("'" + path + "': no column '" + spec.csv_column + "'");
    }
    col_index.push_back(static_cast<std::size_t>(it - header.begin()));
    names.push_back(spec.name.empty() ? spec.csv_column : spec.name);
  }
  detail::check_names(names);
  if (partition_out) {
    for (std::size_t i = 0; i < specs.size(); ++i) {
      partition_out->group_of[names[i]] =
          specs[i].group.empty() ? "all" : specs[i].group;
    }
  }

  std::vector<RawRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.empty()) continue;
    auto date = parse_date(trim(cells[0]));
    if (!date) {
      throw std::invalid_argument("'" + path + "' line " + std::to_string(line_no) +
                                  ": bad date '" + trim(cells[0]) + "'");
    }
    RawRow row;
    row.date = *date;
    for (std::size_t i = 0; i < col_index.size(); ++i) {
      std::optional<double> v;
      if (col_index[i] < cells.size()) v = parse_double(trim(cells[col_index[i]]));
      row.cells.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("'" + path + "': no data rows");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const RawRow& a, const RawRow& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].date == rows[i - 1].date) {
      throw std::invalid_argument("'" + path + "': duplicate dates " +
                                  varnet::to_string(rows[i].date));
    }
  }

  // Missing-data policy.
  std::vector<RawRow> kept;
  std::vector<std::optional<double>> last(col_index.size());
  for (auto& row : rows) {
    bool complete = true;
    for (std::size_t i = 0; i < row.cells.size(); ++i) {
      if (row.cells[i]) continue;
      if (schema.missing == MissingPolicy::kForwardFill && last[i]) {
        row.cells[i] = last[i];
      } else {
        complete = false;
      }
    }
    if (!complete) continue;
    for (std::size_t i = 0; i < row.cells.size(); ++i) last[i] = row.cells[i];
    kept.push_back(row);
  }
  if (kept.empty()) {
    throw std::invalid_argument("'" + path + "': no parseable rows");
  }

  detail::Table out;
  out.names = names;
  out.dates.reserve(kept.size());
  out.values.resize(static_cast<Eigen::Index>(kept.size()),
                    static_cast<Eigen::Index>(names.size()));
  for (std::size_t r = 0; r < kept.size(); ++r) {
    out.dates.push_back(kept[r].date);
    for (std::size_t c = 0; c < names.size(); ++c) {
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          *kept[r].cells[c];
    }
  }
  return out;
}

}  // namespace

ColumnSpec parse_column_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  for (auto& p : parts) p = trim(p);
  if (parts.size() == 1 && !parts[0].empty()) return {parts[0], parts[0], "all"};
  if (parts.size() == 2 && !parts[0].empty() && !parts[1].empty()) {
    return {parts[0], parts[0], parts[1]};
  }
  if (parts.size() == 3 && !parts[0].empty() && !parts[1].empty() && !parts[2].empty()) {
    return {parts[0], parts[1], parts[2]};
  }
  throw std::invalid_argument("bad series spec '" + text +
                              "' (want COL, COL:GROUP or COL:NAME:GROUP)");
}

PricePanel load_price_panel(const std::string& path, const PanelSchema& schema) {
  detail::Table t = load_table(path, schema, nullptr);
  PricePanel panel{std::move(t.dates), std::move(t.names), std::move(t.values)};
  panel.validate();  // rejects non-positive prices
  return panel;
}

ReturnPanel load_return_panel(const std::string& path, const PanelSchema& schema) {
  GroupPartition partition;
  detail::Table t = load_table(path, schema, &partition);
  ReturnPanel panel{std::move(t.dates), std::move(t.names), std::move(t.values),
                    std::move(partition)};
  panel.validate();
  return panel;
}

GroupPartition partition_from_schema(const PanelSchema& schema,
                                     const std::vector<std::string>& names) {
  GroupPartition partition;
  for (const auto& spec : schema.columns) {
    const std::string& name = spec.name.empty() ? spec.csv_column : spec.name;
    partition.group_of[name] = spec.group.empty() ? "all" : spec.group;
  }
  for (const auto& n : names) {
    if (partition.group_of.find(n) == partition.group_of.end()) {
      partition.group_of[n] = "all";
    }
  }
  return partition;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string format_full(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_full failed");
  return std::string(buf, ptr);
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::optional<double> parse_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

void write_return_panel_csv(const std::string& path, const ReturnPanel& panel) {
  std::string out = "date";
  for (const auto& n : panel.names) out += "," + n;
  out += "\n";
  for (Eigen::Index t = 0; t < panel.T(); ++t) {
    out += varnet::to_string(panel.dates[static_cast<std::size_t>(t)]);
    for (Eigen::Index k = 0; k < panel.K(); ++k) {
      out += "," + format_full(panel.values(t, k));
    }
    out += "\n";
  }
  write_text_file(path, out);
}

}  // namespace varnet

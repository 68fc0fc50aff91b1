#pragma once

#include <optional>
#include <string>
#include <vector>

#include "varnet/panel.hpp"

namespace varnet {

// What to do with a row whose mapped cells are missing or unparseable.
enum class MissingPolicy {
  kDropRow,      // listwise deletion (default)
  kForwardFill,  // carry the previous kept value; leading gaps drop the row
};

// Maps one CSV column to a variable name and group label.
struct ColumnSpec {
  std::string csv_column;
  std::string name;   // variable identifier; defaults to csv_column
  std::string group;  // group label; defaults to "all"
};

// Column-mapping config for a panel file. An empty `columns` list selects
// every non-date column, named after its header, in group "all".
struct PanelSchema {
  std::vector<ColumnSpec> columns;
  MissingPolicy missing = MissingPolicy::kDropRow;
};

// Parses "COL", "COL:GROUP" or "COL:NAME:GROUP".
ColumnSpec parse_column_spec(const std::string& text);

// Loads a price panel from CSV: UTF-8, header row, comma separators, "."
// decimal mark, ISO-8601 dates in a first column named "date". Rows are
// sorted by date; duplicate dates are an error.
PricePanel load_price_panel(const std::string& path, const PanelSchema& schema);

// Same file format, values taken as pre-computed returns (no positivity
// requirement). The schema's groups become the panel partition.
ReturnPanel load_return_panel(const std::string& path, const PanelSchema& schema);

GroupPartition partition_from_schema(const PanelSchema& schema,
                                     const std::vector<std::string>& names);

// Minimal CSV helpers shared by loaders and report writers. No quoting:
// fields must not contain commas or newlines.
std::vector<std::string> split_csv_line(const std::string& line);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Locale-independent float formatting: shortest round-trip representation.
std::string format_full(double v);
// Fixed decimals for display files.
std::string format_fixed(double v, int decimals);
// Full-cell strict parse; nullopt on failure.
std::optional<double> parse_double(const std::string& text);

// Writes a ReturnPanel in the panel CSV layout (date column + one column
// per variable, full-precision values).
void write_return_panel_csv(const std::string& path, const ReturnPanel& panel);

}  // namespace varnet

#include "varnet/panel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace varnet {

const std::string& GroupPartition::label_of(const std::string& name) const {
  auto it = group_of.find(name);
  if (it == group_of.end()) {
    throw std::invalid_argument("no group label for variable '" + name + "'");
  }
  return it->second;
}

void GroupPartition::validate_covers(
    const std::vector<std::string>& names) const {
  for (const auto& n : names) {
    if (group_of.find(n) == group_of.end()) {
      throw std::invalid_argument("partition missing variable '" + n + "'");
    }
  }
  if (!names.empty() && group_of.empty()) {
    throw std::invalid_argument("partition is empty");
  }
}

std::vector<std::string> GroupPartition::labels_in_order(
    const std::vector<std::string>& names) const {
  std::vector<std::string> labels;
  for (const auto& n : names) {
    const auto& g = label_of(n);
    if (std::find(labels.begin(), labels.end(), g) == labels.end()) {
      labels.push_back(g);
    }
  }
  return labels;
}

GroupPartition single_group(const std::vector<std::string>& names,
                            const std::string& label) {
  GroupPartition p;
  for (const auto& n : names) p.group_of[n] = label;
  return p;
}

namespace detail {

void check_names(const std::vector<std::string>& names) {
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw std::invalid_argument("empty variable name");
    if (n.find_first_of(", \t") != std::string::npos) {
      throw std::invalid_argument("variable name '" + n +
                                  "' contains a comma or whitespace");
    }
    if (!seen.insert(n).second) {
      throw std::invalid_argument("duplicate variable name '" + n + "'");
    }
  }
}

Table align_tables(const std::vector<Table>& tables) {
  if (tables.empty()) throw std::invalid_argument("align: no panels given");

  std::vector<std::string> all_names;
  for (const auto& t : tables) {
    all_names.insert(all_names.end(), t.names.begin(), t.names.end());
  }
  check_names(all_names);  // rejects overlap across panels

  // Dates are strictly increasing per panel, so set_intersection applies.
  std::vector<Date> common = tables.front().dates;
  for (std::size_t i = 1; i < tables.size(); ++i) {
    std::vector<Date> next;
    std::set_intersection(common.begin(), common.end(),
                          tables[i].dates.begin(), tables[i].dates.end(),
                          std::back_inserter(next));
    common = std::move(next);
  }
  if (common.empty()) throw std::invalid_argument("align: empty date intersection");

  Table out;
  out.dates = common;
  out.names = all_names;
  out.values.resize(static_cast<Eigen::Index>(common.size()),
                    static_cast<Eigen::Index>(all_names.size()));
  Eigen::Index col = 0;
  for (const auto& t : tables) {
    // Walk the sorted date vectors in lockstep.
    std::size_t src = 0;
    for (std::size_t row = 0; row < common.size(); ++row) {
      while (t.dates[src] < common[row]) ++src;
      out.values.block(static_cast<Eigen::Index>(row), col, 1, t.values.cols()) =
          t.values.row(static_cast<Eigen::Index>(src));
    }
    col += t.values.cols();
  }
  return out;
}

}  // namespace detail

void PricePanel::validate() const {
  detail::check_names(names);
  if (values.cols() != static_cast<Eigen::Index>(names.size())) {
    throw std::invalid_argument("column count does not match names");
  }
  if (values.rows() != static_cast<Eigen::Index>(dates.size())) {
    throw std::invalid_argument("row count does not match dates");
  }
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (!(dates[i - 1] < dates[i])) {
      throw std::invalid_argument("duplicate dates or dates out of order: " +
                                  varnet::to_string(dates[i]));
    }
  }
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      const double v = values(r, c);
      if (!std::isfinite(v) || v <= 0.0) {
        throw std::invalid_argument("non-positive or non-finite price in '" +
                                    names[static_cast<std::size_t>(c)] +
                                    "' at " + varnet::to_string(dates[static_cast<std::size_t>(r)]));
      }
    }
  }
}

void ReturnPanel::validate() const {
  detail::check_names(names);
  if (values.cols() != static_cast<Eigen::Index>(names.size())) {
    throw std::invalid_argument("column count does not match names");
  }
  if (values.rows() != static_cast<Eigen::Index>(dates.size())) {
    throw std::invalid_argument("row count does not match dates");
  }
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (!(dates[i - 1] < dates[i])) {
      throw std::invalid_argument("duplicate dates or dates out of order: " +
                                  varnet::to_string(dates[i]));
    }
  }
  if (!values.allFinite()) {
    throw std::invalid_argument("non-finite return value");
  }
  partition.validate_covers(names);
}

PricePanel align(const std::vector<PricePanel>& panels) {
  std::vector<detail::Table> tables;
  tables.reserve(panels.size());
  for (const auto& p : panels) {
    p.validate();
    tables.push_back({p.dates, p.names, p.values});
  }
  detail::Table merged = detail::align_tables(tables);
  PricePanel out{std::move(merged.dates), std::move(merged.names),
                 std::move(merged.values)};
  out.validate();
  return out;
}

ReturnPanel log_returns(const PricePanel& panel, const GroupPartition& partition) {
  panel.validate();
  if (panel.T() < 2) {
    throw std::invalid_argument("log_returns: need at least 2 observations");
  }
  const Eigen::Index T = panel.T();
  const Eigen::Index K = panel.K();
  ReturnPanel out;
  out.names = panel.names;
  out.partition = partition;
  out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
  out.values.resize(T - 1, K);
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index k = 0; k < K; ++k) {
      out.values(t - 1, k) = 100.0 * std::log(panel.values(t, k) / panel.values(t - 1, k));
    }
  }
  out.validate();
  return out;
}

Eigen::MatrixXd growth_index(const PricePanel& panel) {
  panel.validate();
  const Eigen::Index T = panel.T();
  const Eigen::Index K = panel.K();
  Eigen::MatrixXd g(T, K);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (Eigen::Index k = 0; k < K; ++k) {
      g(t, k) = std::log(panel.values(t, k) / panel.values(0, k));
    }
  }
  return g;
}

}  // namespace varnet

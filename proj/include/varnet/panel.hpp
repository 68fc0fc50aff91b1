#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "varnet/date.hpp"

namespace varnet {

// Assignment of every panel variable to a group label (e.g. the split that
// drives the group margins of the connectedness table).
struct GroupPartition {
  std::map<std::string, std::string> group_of;

  const std::string& label_of(const std::string& name) const;

  // Throws unless every name has exactly one label.
  void validate_covers(const std::vector<std::string>& names) const;

  // Distinct labels ordered by first appearance in `names`.
  std::vector<std::string> labels_in_order(
      const std::vector<std::string>& names) const;
};

// Uniform partition assigning every name the same label.
GroupPartition single_group(const std::vector<std::string>& names,
                            const std::string& label = "all");

// Date-aligned panel of positive price/index levels, one column per variable.
struct PricePanel {
  std::vector<Date> dates;         // strictly increasing
  std::vector<std::string> names;  // unique, nonempty
  Eigen::MatrixXd values;          // T x K, finite, > 0

  Eigen::Index T() const { return values.rows(); }
  Eigen::Index K() const { return values.cols(); }

  // Enforces the type invariants; throws std::invalid_argument.
  void validate() const;
};

// Panel of percent returns (or any real-valued aligned series).
struct ReturnPanel {
  std::vector<Date> dates;
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // finite
  GroupPartition partition;

  Eigen::Index T() const { return values.rows(); }
  Eigen::Index K() const { return values.cols(); }

  void validate() const;
};

namespace detail {

// Shared date/name/value triple behind PricePanel and ReturnPanel alignment.
struct Table {
  std::vector<Date> dates;
  std::vector<std::string> names;
  Eigen::MatrixXd values;
};

// Intersection of date sets, columns concatenated in input order. Throws on
// empty input, overlapping names, or empty date intersection.
Table align_tables(const std::vector<Table>& tables);

void check_names(const std::vector<std::string>& names);

}  // namespace detail

// Merge panels onto the common date set.
PricePanel align(const std::vector<PricePanel>& panels);

// Percent log-returns r_t[k] = 100 * ln(P_t[k] / P_{t-1}[k]); T-1 rows,
// dated by the later observation.
ReturnPanel log_returns(const PricePanel& panel, const GroupPartition& partition);

// Log growth relative to the first observation: g_t[k] = ln(P_t[k] / P_0[k]).
Eigen::MatrixXd growth_index(const PricePanel& panel);

}  // namespace varnet

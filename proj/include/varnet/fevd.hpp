#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "varnet/panel.hpp"
#include "varnet/var.hpp"

namespace varnet {

// Generalized forecast-error variance decomposition at horizon h.
// Row i = receiving variable, column j = shock source.
struct GvdMatrix {
  std::vector<std::string> names;
  int h = 0;
  Eigen::MatrixXd values;  // K x K, entries >= 0
};

// Percent-scaled decomposition with group margins. from_group(i, g) sums
// row i over columns j != i in group g; to_group(g, j) sums column j over
// rows i != j in group g. Groups are ordered by first appearance in names.
struct ConnectednessTable {
  std::vector<std::string> names;
  std::vector<std::string> group_labels;
  Eigen::MatrixXd sgvd;        // K x K, rows sum to 100
  Eigen::MatrixXd from_group;  // K x G
  Eigen::MatrixXd to_group;    // G x K
  GroupPartition partition;
  int h = 0;
};

// GVD_{i,j} = sigma_jj^{-1} sum_{l<h} (e_i' Theta_l Sigma_u e_j)^2 / Var_i(h).
GvdMatrix gvd(const VarModel& model, int h);

// Row standardization to percent: 100 * g(i,j) / sum_k g(i,k).
GvdMatrix sgvd(const GvdMatrix& g);

ConnectednessTable connectedness_table(const GvdMatrix& s,
                                       const GroupPartition& partition);

// Monte Carlo check of Var(h): per-variable empirical variance of the h-step
// value around the deterministic forecast, nsims continuation paths with
// shocks drawn from N(0, Sigma_u). Deterministic for a given seed regardless
// of any internal chunking.
Eigen::VectorXd empirical_fev_oracle(const VarModel& model, int h,
                                     std::int64_t nsims, std::uint64_t seed);

}  // namespace varnet

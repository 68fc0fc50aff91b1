#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "varnet/panel.hpp"

namespace varnet {

enum class ShockDist { kGaussian, kScaledT };

// Fully specified VAR data-generating process.
struct DgpSpec {
  std::vector<std::string> names;
  Eigen::VectorXd c;
  std::vector<Eigen::MatrixXd> A;
  Eigen::MatrixXd sigma_u;  // symmetric positive definite
  ShockDist dist = ShockDist::kGaussian;
  double nu = 0.0;  // scaled-t degrees of freedom, > 2 (unit-variance shocks)
  Eigen::Index n = 0;
  Eigen::Index burn_in = 1000;
  std::uint64_t seed = 0;

  Eigen::Index K() const { return c.size(); }
  int p() const { return static_cast<int>(A.size()); }
  void validate() const;  // stability and positive definiteness included
};

// Iterates the recursion from the zero state, discards burn_in draws, and
// returns n observations dated daily from 2000-01-01. Deterministic in seed.
ReturnPanel simulate_var(const DgpSpec& spec);

// Test descriptor grammar:  granger:SOURCE:TARGET | jb:VAR | adf:VAR.
struct TestDescriptor {
  std::string kind;    // granger, jb, adf
  std::string source;  // granger only
  std::string target;  // granger: target; jb/adf: the variable
};

TestDescriptor parse_test_descriptor(const std::string& text);

struct McResult {
  double rate = 0.0;    // rejections / (reps - exclusions)
  long rejections = 0;
  long exclusions = 0;  // replications whose test raised an error
  long reps = 0;
};

// Rejection frequency of the named test at the given level over reps
// replications; replication r uses the seed derived from (spec.seed, r), so
// results do not depend on execution order.
McResult mc_rejection_rate(const DgpSpec& spec, const std::string& test,
                           double level, long reps);

// Plain-text DGP description (one "key values..." per line, matrix rows
// separated by ';', '#' comments). See the README for the grammar.
DgpSpec load_dgp_spec(const std::string& path);

}  // namespace varnet

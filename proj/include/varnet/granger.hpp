#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "varnet/network.hpp"
#include "varnet/var.hpp"

namespace varnet {

struct WaldResult {
  std::string source;
  std::string target;
  double stat = 0.0;
  int df = 0;  // = p
  double pvalue = 1.0;
};

// p-values of "column j Granger-causes row i". Diagonal is NaN; cells whose
// test failed are NaN too and listed in failures.
struct PValueMatrix {
  std::vector<std::string> names;
  Eigen::MatrixXd p;

  struct Failure {
    int target = 0;  // row i
    int source = 0;  // column j
    std::string reason;
  };
  std::vector<Failure> failures;
};

// Wald test of A_{ij,l} = 0 for l = 1..p (source j, target i). The classical
// covariance sigma_ii (Z'Z)^{-1} is used unless robust is set, which switches
// to the HC0 sandwich and requires the model's stored estimation data.
WaldResult wald_noncausality(const VarModel& model, const std::string& source,
                             const std::string& target, bool robust = false);

PValueMatrix pvalue_matrix(const VarModel& model, bool robust = false);

// Directed edge j -> i for every pvalue(i,j) <= max(levels); the band is the
// smallest level passed ("5%" before "10%" under the defaults). Boundary rule
// is <=.
NetworkGraph causal_network(const PValueMatrix& pm,
                            const GroupPartition& partition,
                            const std::vector<double>& levels = {0.05, 0.10});
NetworkGraph causal_network(const PValueMatrix& pm,
                            const std::vector<double>& levels = {0.05, 0.10});

}  // namespace varnet

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <doctest.h>

#include "varnet/granger.hpp"
#include "varnet/math.hpp"
#include "varnet/simulate.hpp"
#include "varnet/var.hpp"

using varnet::VarModel;

namespace {

varnet::ReturnPanel simulated_panel(const std::vector<Eigen::MatrixXd>& A,
                                    const Eigen::MatrixXd& sigma, int n,
                                    std::uint64_t seed) {
  varnet::DgpSpec spec;
  const Eigen::Index K = sigma.rows();
  for (Eigen::Index k = 0; k < K; ++k) spec.names.push_back("v" + std::to_string(k + 1));
  spec.c = Eigen::VectorXd::Zero(K);
  spec.A = A;
  spec.sigma_u = sigma;
  spec.n = n;
  spec.seed = seed;
  return varnet::simulate_var(spec);
}

// VAR(1) model with prescribed coefficients and an identity regressor moment
// matrix, so Wald statistics have a closed form.
VarModel synthetic_model(const Eigen::MatrixXd& A1, const Eigen::MatrixXd& sigma) {
  const Eigen::Index K = A1.rows();
  std::vector<std::string> names;
  for (Eigen::Index k = 0; k < K; ++k) names.push_back("v" + std::to_string(k + 1));
  VarModel model = varnet::population_model(names, Eigen::VectorXd::Zero(K), {A1},
                                            sigma);
  model.xtx_inv = Eigen::MatrixXd::Identity(K + 1, K + 1);
  model.t_effective = 100;
  return model;
}

}  // namespace

TEST_CASE("Wald statistic has its closed form under an identity moment matrix") {
  Eigen::MatrixXd A1(2, 2);
  A1 << 0.5, 0.25, 0.0, 0.4;
  Eigen::MatrixXd sigma(2, 2);
  sigma << 2.0, 0.0, 0.0, 0.5;
  const auto model = synthetic_model(A1, sigma);

  // Restriction A1(i,j) = 0 with V = sigma_ii * xtx_inv_jj = sigma_ii gives
  // stat = A1(i,j)^2 / sigma_ii.
  const auto r12 = varnet::wald_noncausality(model, "v2", "v1");
  CHECK(r12.df == 1);
  CHECK(r12.stat == doctest::Approx(0.25 * 0.25 / 2.0).epsilon(1e-12));
  CHECK(r12.pvalue ==
        doctest::Approx(varnet::chi2_sf(0.03125, 1)).epsilon(1e-12));
  CHECK(r12.source == "v2");
  CHECK(r12.target == "v1");

  const auto r21 = varnet::wald_noncausality(model, "v1", "v2");
  CHECK(r21.stat == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(r21.pvalue == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(varnet::wald_noncausality(model, "v1", "v1"),
                  std::invalid_argument);
  CHECK_THROWS_AS(varnet::wald_noncausality(model, "zz", "v1"),
                  std::invalid_argument);
}

TEST_CASE("p-value matrix orientation and shape") {
  Eigen::MatrixXd A1(2, 2);
  A1 << 0.5, 0.25, 0.0, 0.4;
  Eigen::MatrixXd sigma(2, 2);
  sigma << 2.0, 0.0, 0.0, 0.5;
  const auto model = synthetic_model(A1, sigma);

  const auto pm = varnet::pvalue_matrix(model);
  REQUIRE(pm.names == model.names);
  REQUIRE(pm.p.rows() == 2);
  CHECK(std::isnan(pm.p(0, 0)));
  CHECK(std::isnan(pm.p(1, 1)));
  // Cell (row target, column source).
  CHECK(pm.p(0, 1) == doctest::Approx(varnet::chi2_sf(0.03125, 1)).epsilon(1e-12));
  CHECK(pm.p(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pm.failures.empty());
}

TEST_CASE("Wald test is invariant to rescaling the data") {
  Eigen::MatrixXd A1(3, 3);
  A1 << 0.4, 0.15, 0.0, 0.1, 0.3, 0.05, 0.0, 0.2, 0.35;
  Eigen::MatrixXd sigma(3, 3);
  sigma << 1.0, 0.2, 0.1, 0.2, 0.8, 0.1, 0.1, 0.1, 1.2;
  const auto panel = simulated_panel({A1}, sigma, 800, 314);

  varnet::ReturnPanel scaled = panel;
  scaled.values *= 3.7;

  const auto base = varnet::pvalue_matrix(varnet::fit_var(panel, 1));
  const auto resc = varnet::pvalue_matrix(varnet::fit_var(scaled, 1));
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      if (i == j) continue;
      CHECK(resc.p(i, j) == doctest::Approx(base.p(i, j)).epsilon(1e-8));
    }
  }
}

TEST_CASE("robust and classical tests agree in direction on clean data") {
  Eigen::MatrixXd A1(2, 2);
  A1 << 0.3, 0.0, 0.4, 0.3;  // v1 drives v2, not conversely
  const auto panel = simulated_panel({A1}, Eigen::MatrixXd::Identity(2, 2), 2000, 58);
  const auto model = varnet::fit_var(panel, 1);

  const auto classical = varnet::wald_noncausality(model, "v1", "v2", false);
  const auto robust = varnet::wald_noncausality(model, "v1", "v2", true);
  CHECK(classical.pvalue < 1e-6);
  CHECK(robust.pvalue < 1e-6);

  const auto null_classical = varnet::wald_noncausality(model, "v2", "v1", false);
  const auto null_robust = varnet::wald_noncausality(model, "v2", "v1", true);
  CHECK(null_classical.pvalue > 0.001);
  CHECK(null_robust.pvalue > 0.001);

  // Robust needs the stored design and residuals; a reloaded model has neither.
  VarModel stripped = model;
  stripped.residuals.resize(0, 0);
  stripped.design.resize(0, 0);
  CHECK_THROWS_AS(varnet::wald_noncausality(stripped, "v1", "v2", true),
                  std::invalid_argument);
  CHECK_NOTHROW(varnet::wald_noncausality(stripped, "v1", "v2", false));
}

TEST_CASE("white noise yields well-spread p-values") {
  const auto panel = simulated_panel({Eigen::MatrixXd::Zero(3, 3)},
                                     Eigen::MatrixXd::Identity(3, 3), 1000, 4711);
  const auto pm = varnet::pvalue_matrix(varnet::fit_var(panel, 1));
  double min_p = 1.0;
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      if (i == j) continue;
      CHECK(pm.p(i, j) > 0.0);
      CHECK(pm.p(i, j) <= 1.0);
      min_p = std::min(min_p, pm.p(i, j));
    }
  }
  CHECK(min_p > 0.001);  // no spurious ultra-small p at this fixed seed
}

TEST_CASE("larger panels fill every off-diagonal cell") {
  const int K = 13;
  Eigen::MatrixXd A1 = Eigen::MatrixXd::Identity(K, K) * 0.2;
  const auto panel =
      simulated_panel({A1}, Eigen::MatrixXd::Identity(K, K), 900, 1234);
  const auto pm = varnet::pvalue_matrix(varnet::fit_var(panel, 1));
  int populated = 0;
  for (Eigen::Index i = 0; i < K; ++i) {
    for (Eigen::Index j = 0; j < K; ++j) {
      if (i != j && !std::isnan(pm.p(i, j))) ++populated;
    }
  }
  CHECK(populated == K * (K - 1));
  CHECK(pm.failures.empty());
}

TEST_CASE("causal network thresholds and bands") {
  varnet::PValueMatrix pm;
  pm.names = {"a", "b", "c"};
  pm.p.resize(3, 3);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  pm.p << nan, 0.03, 0.50, 0.05, nan, 0.07, 0.20, 0.101, nan;

  const auto g = varnet::causal_network(pm);
  CHECK(g.kind == "granger");
  REQUIRE(g.nodes.size() == 3);

  // Expected: b->a at 0.03 (5%), a->b at exactly 0.05 (5% boundary),
  // c->b at 0.07 (10%), b->c at 0.101 excluded.
  REQUIRE(g.edges.size() == 3);
  auto find_edge = [&](const std::string& s, const std::string& t) {
    auto it = std::find_if(g.edges.begin(), g.edges.end(), [&](const auto& e) {
      return e.source == s && e.target == t;
    });
    REQUIRE(it != g.edges.end());
    return *it;
  };
  CHECK(find_edge("b", "a").band == "5%");
  CHECK(find_edge("a", "b").band == "5%");  // boundary is inclusive
  CHECK(find_edge("c", "b").band == "10%");
  CHECK(find_edge("b", "a").weight == 0.03);

  SUBCASE("NaN cells never edge") {
    varnet::PValueMatrix all_nan;
    all_nan.names = {"a", "b"};
    all_nan.p = Eigen::MatrixXd::Constant(2, 2, nan);
    CHECK(varnet::causal_network(all_nan).edges.empty());
  }
  SUBCASE("weak evidence gives an empty edge set") {
    varnet::PValueMatrix weak;
    weak.names = {"a", "b"};
    weak.p.resize(2, 2);
    weak.p << nan, 0.5, 0.5, nan;
    CHECK(varnet::causal_network(weak).edges.empty());
  }
  SUBCASE("tighter levels select a subset") {
    const auto strict = varnet::causal_network(pm, {0.05});
    const auto loose = varnet::causal_network(pm, {0.05, 0.10});
    std::set<std::pair<std::string, std::string>> strict_set, loose_set;
    for (const auto& e : strict.edges) strict_set.insert({e.source, e.target});
    for (const auto& e : loose.edges) loose_set.insert({e.source, e.target});
    CHECK(std::includes(loose_set.begin(), loose_set.end(), strict_set.begin(),
                        strict_set.end()));
    CHECK(strict.edges.size() == 2);
  }
  SUBCASE("level validation") {
    CHECK_THROWS_WITH_AS(varnet::causal_network(pm, {0.10, 0.05}),
                         doctest::Contains("strictly increasing"),
                         std::invalid_argument);
    CHECK_THROWS_AS(varnet::causal_network(pm, std::vector<double>{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(varnet::causal_network(pm, {0.05, 1.5}), std::invalid_argument);
  }
  SUBCASE("partition labels flow into the nodes") {
    varnet::GroupPartition part;
    part.group_of = {{"a", "g1"}, {"b", "g2"}, {"c", "g1"}};
    const auto labeled = varnet::causal_network(pm, part);
    for (const auto& node : labeled.nodes) {
      CHECK(node.group == part.label_of(node.name));
    }
  }
}

TEST_CASE("singular restriction covariance is reported per cell") {
  // Zero sigma_ii makes the restricted covariance block singular for every
  // test targeting that variable.
  Eigen::MatrixXd A1(2, 2);
  A1 << 0.5, 0.25, 0.0, 0.4;
  Eigen::MatrixXd sigma(2, 2);
  sigma << 0.0, 0.0, 0.0, 0.5;
  const auto model = synthetic_model(A1, sigma);

  CHECK_THROWS_WITH_AS(varnet::wald_noncausality(model, "v2", "v1"),
                       doctest::Contains("singular restricted covariance block"),
                       std::invalid_argument);

  const auto pm = varnet::pvalue_matrix(model);
  CHECK(std::isnan(pm.p(0, 1)));
  CHECK_FALSE(std::isnan(pm.p(1, 0)));
  REQUIRE(pm.failures.size() == 1);
  CHECK(pm.failures[0].target == 0);
  CHECK(pm.failures[0].source == 1);
  CHECK(pm.failures[0].reason.find("singular") != std::string::npos);
}

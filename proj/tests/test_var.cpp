#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "varnet/csv.hpp"
#include "varnet/simulate.hpp"
#include "varnet/var.hpp"

using varnet::VarModel;

namespace {

varnet::ReturnPanel panel_from_values(const Eigen::MatrixXd& values) {
  varnet::ReturnPanel panel;
  panel.values = values;
  for (Eigen::Index k = 0; k < values.cols(); ++k) {
    panel.names.push_back("v" + std::to_string(k + 1));
  }
  varnet::Date d{2000, 1, 1};
  for (Eigen::Index t = 0; t < values.rows(); ++t) {
    panel.dates.push_back(d);
    d = varnet::next_day(d);
  }
  panel.partition = varnet::single_group(panel.names);
  return panel;
}

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

}  // namespace

TEST_CASE("exact deterministic recurrence is recovered with zero residuals") {
  Eigen::MatrixXd values(60, 1);
  values(0, 0) = 1.0;
  for (int t = 1; t < 60; ++t) values(t, 0) = 0.5 * values(t - 1, 0) + 0.01;
  const auto model = varnet::fit_var(panel_from_values(values), 1);
  CHECK(model.p == 1);
  CHECK(model.A[0](0, 0) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(model.c(0) == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(model.sigma_u(0, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(model.t_effective == 59);
  CHECK(model.residuals.rows() == 59);
  CHECK(model.design.cols() == 2);
}

TEST_CASE("fit rejects bad inputs") {
  Eigen::MatrixXd small = Eigen::MatrixXd::Random(8, 2);
  CHECK_THROWS_WITH_AS(varnet::fit_var(panel_from_values(small), 0),
                       doctest::Contains("lag order must be >= 1"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(varnet::fit_var(panel_from_values(small), 4),
                       doctest::Contains("insufficient observations"),
                       std::invalid_argument);

  // Two identical columns make the regressor moment matrix singular.
  Eigen::MatrixXd dup(100, 2);
  dup.col(0) = Eigen::VectorXd::LinSpaced(100, 0.0, 1.0).array().sin();
  dup.col(1) = dup.col(0);
  CHECK_THROWS_WITH_AS(varnet::fit_var(panel_from_values(dup), 1),
                       doctest::Contains("singular regressor moment matrix"),
                       std::invalid_argument);
}

TEST_CASE("light consistency on a simulated VAR(1)") {
  Eigen::MatrixXd A1(2, 2);
  A1 << 0.5, 0.1, 0.0, 0.3;
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 0.3, 0.3, 1.0;
  const auto panel = simulated_panel({A1}, sigma, 5000, 2024);
  const auto model = varnet::fit_var(panel, 1);

  CHECK((model.A[0] - A1).cwiseAbs().maxCoeff() < 0.05);
  CHECK((model.sigma_u - sigma).cwiseAbs().maxCoeff() < 0.08);
  CHECK(model.c.cwiseAbs().maxCoeff() < 0.05);

  // Residuals are orthogonal to the regressors by construction.
  for (Eigen::Index k = 0; k < 2; ++k) {
    CHECK(std::abs(model.residuals.col(k).mean()) < 1e-8);
  }
  // Observation identity: y_t = B'z_t + u_t reconstructed from stored pieces.
  Eigen::MatrixXd fitted(model.t_effective, 2);
  for (Eigen::Index t = 0; t < model.t_effective; ++t) {
    Eigen::VectorXd y = model.c;
    y += model.A[0] * model.design.row(t).segment(1, 2).transpose();
    fitted.row(t) = y.transpose();
  }
  const Eigen::MatrixXd rebuilt = fitted + model.residuals;
  const Eigen::MatrixXd observed = panel.values.bottomRows(model.t_effective);
  CHECK((rebuilt - observed).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("criterion parsing") {
  CHECK(varnet::parse_criterion("aic") == varnet::Criterion::kAic);
  CHECK(varnet::parse_criterion("bic") == varnet::Criterion::kBic);
  CHECK(varnet::parse_criterion("hq") == varnet::Criterion::kHq);
  CHECK_THROWS_AS(varnet::parse_criterion("sic"), std::invalid_argument);
  CHECK(varnet::criterion_name(varnet::Criterion::kBic) == "bic");
}

TEST_CASE("lag selection prefers the generating order") {
  Eigen::MatrixXd A1(2, 2);
  A1 << 0.6, 0.2, 0.1, 0.5;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);
  const auto strong = simulated_panel({A1}, sigma, 3000, 99);
  CHECK(varnet::select_lag(strong, 1, varnet::Criterion::kBic) == 1);
  CHECK(varnet::select_lag(strong, 6, varnet::Criterion::kBic) == 1);
  CHECK(varnet::select_lag(strong, 6, varnet::Criterion::kHq) == 1);

  const auto noise = simulated_panel({Eigen::MatrixXd::Zero(2, 2)}, sigma, 3000, 7);
  CHECK(varnet::select_lag(noise, 6, varnet::Criterion::kBic) == 1);

  CHECK_THROWS_AS(varnet::select_lag(strong, 0, varnet::Criterion::kBic),
                  std::invalid_argument);
}

TEST_CASE("moving-average coefficients") {
  Eigen::MatrixXd A1(2, 2);
  A1 << 0.5, 0.2, 0.0, 0.4;
  auto model = varnet::population_model(
      {"a", "b"}, Eigen::VectorXd::Zero(2), {A1},
      Eigen::MatrixXd::Identity(2, 2));

  SUBCASE("VAR(1) gives matrix powers") {
    const auto theta = varnet::ma_coefficients(model, 5);
    REQUIRE(theta.size() == 5);
    CHECK(theta[0] == Eigen::MatrixXd::Identity(2, 2));
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(2, 2);
    for (int l = 1; l < 5; ++l) {
      power = power * A1;
      CHECK((theta[static_cast<std::size_t>(l)] - power).cwiseAbs().maxCoeff() <
            1e-12);
    }
  }
  SUBCASE("white noise truncates immediately") {
    auto wn = varnet::population_model({"a", "b"}, Eigen::VectorXd::Zero(2),
                                       {Eigen::MatrixXd::Zero(2, 2)},
                                       Eigen::MatrixXd::Identity(2, 2));
    const auto theta = varnet::ma_coefficients(wn, 3);
    CHECK(theta[1].cwiseAbs().maxCoeff() == 0.0);
    CHECK(theta[2].cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("VAR(2) recursion term") {
    Eigen::MatrixXd A2(2, 2);
    A2 << 0.1, 0.0, 0.05, 0.1;
    auto two = varnet::population_model({"a", "b"}, Eigen::VectorXd::Zero(2),
                                        {A1, A2},
                                        Eigen::MatrixXd::Identity(2, 2));
    const auto theta = varnet::ma_coefficients(two, 3);
    // Theta_2 = Theta_1 A_1 + Theta_0 A_2 = A_1^2 + A_2.
    const Eigen::MatrixXd expected = A1 * A1 + A2;
    CHECK((theta[2] - expected).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("forecast error variance accumulates MA terms") {
  Eigen::MatrixXd A1(2, 2);
  A1 << 0.9, 0.0, 0.3, 0.6;
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 0.4, 0.4, 2.0;
  auto model = varnet::population_model({"a", "b"}, Eigen::VectorXd::Zero(2),
                                        {A1}, sigma);

  const Eigen::MatrixXd v1 = varnet::forecast_error_variance(model, 1);
  CHECK((v1 - sigma).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::MatrixXd v2 = varnet::forecast_error_variance(model, 2);
  const Eigen::MatrixXd expected2 = sigma + A1 * sigma * A1.transpose();
  CHECK((v2 - expected2).cwiseAbs().maxCoeff() < 1e-12);

  // Monotone in h on the diagonal, symmetric and positive definite.
  Eigen::MatrixXd prev = v1;
  for (int h = 2; h <= 12; ++h) {
    const Eigen::MatrixXd vh = varnet::forecast_error_variance(model, h);
    CHECK((vh - vh.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    for (Eigen::Index i = 0; i < 2; ++i) CHECK(vh(i, i) >= prev(i, i) - 1e-12);
    Eigen::LLT<Eigen::MatrixXd> llt(vh);
    CHECK(llt.info() == Eigen::Success);
    prev = vh;
  }

  // A stable model's forecast variance converges.
  const Eigen::MatrixXd v199 = varnet::forecast_error_variance(model, 199);
  const Eigen::MatrixXd v200 = varnet::forecast_error_variance(model, 200);
  CHECK((v200 - v199).cwiseAbs().maxCoeff() < 1e-6 * v200.norm());
}

TEST_CASE("stability via the companion spectrum") {
  const Eigen::VectorXd zero2 = Eigen::VectorXd::Zero(2);
  const Eigen::MatrixXd eye2 = Eigen::MatrixXd::Identity(2, 2);

  auto wn = varnet::population_model({"a", "b"}, zero2,
                                     {Eigen::MatrixXd::Zero(2, 2)}, eye2);
  auto s = varnet::is_stable(wn);
  CHECK(s.stable);
  CHECK(s.max_modulus == doctest::Approx(0.0));

  Eigen::MatrixXd tri(2, 2);
  tri << 0.9, 0.5, 0.0, 0.9;  // nondiagonalizable scale, modulus still 0.9
  auto m = varnet::population_model({"a", "b"}, zero2, {tri}, eye2);
  s = varnet::is_stable(m);
  CHECK(s.stable);
  CHECK(s.max_modulus == doctest::Approx(0.9).epsilon(1e-10));

  Eigen::MatrixXd unit(2, 2);
  unit << 1.0, 0.0, 0.0, 0.2;
  auto u = varnet::population_model({"a", "b"}, zero2, {unit}, eye2);
  s = varnet::is_stable(u);
  CHECK_FALSE(s.stable);
  CHECK(s.max_modulus == doctest::Approx(1.0).epsilon(1e-10));

  // VAR(2): companion eigenvalues solve z^2 = a1 z + a2 for scalars.
  Eigen::MatrixXd a1 = Eigen::MatrixXd::Constant(1, 1, 0.5);
  Eigen::MatrixXd a2 = Eigen::MatrixXd::Constant(1, 1, 0.3);
  auto v2 = varnet::population_model({"a"}, Eigen::VectorXd::Zero(1), {a1, a2},
                                     Eigen::MatrixXd::Identity(1, 1));
  s = varnet::is_stable(v2);
  const double root = (0.5 + std::sqrt(0.25 + 1.2)) / 2.0;
  CHECK(s.stable);
  CHECK(s.max_modulus == doctest::Approx(root).epsilon(1e-10));
}

TEST_CASE("MA recursion agrees with companion powers") {
  Eigen::MatrixXd A1(3, 3), A2(3, 3);
  A1 << 0.4, 0.1, 0.0, 0.2, 0.3, 0.1, 0.0, 0.1, 0.5;
  A2 << 0.1, 0.0, 0.05, 0.0, 0.1, 0.0, 0.02, 0.0, 0.1;
  auto model = varnet::population_model(
      {"a", "b", "c"}, Eigen::VectorXd::Zero(3), {A1, A2},
      Eigen::MatrixXd::Identity(3, 3));

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(6, 6);
  companion.block(0, 0, 3, 3) = A1;
  companion.block(0, 3, 3, 3) = A2;
  companion.block(3, 0, 3, 3) = Eigen::MatrixXd::Identity(3, 3);

  const auto theta = varnet::ma_coefficients(model, 8);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(6, 6);
  for (int l = 0; l < 8; ++l) {
    CHECK((theta[static_cast<std::size_t>(l)] - power.block(0, 0, 3, 3))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    power = companion * power;
  }
}

TEST_CASE("model serialization round-trips") {
  Eigen::MatrixXd A1(2, 2);
  A1 << 0.5, 0.125, -0.25, 1.0 / 3.0;
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.5, 0.2, 0.2, 0.8;
  const auto panel = simulated_panel({A1}, sigma, 400, 55);
  const auto model = varnet::fit_var(panel, 1);

  const auto path = std::filesystem::temp_directory_path() / "varnet_model_rt.txt";
  varnet::save_model(model, path.string());
  const auto back = varnet::load_model(path.string());

  CHECK(back.names == model.names);
  CHECK(back.p == model.p);
  CHECK(back.t_effective == model.t_effective);
  CHECK(back.c == model.c);                // format_full is exact
  CHECK(back.A[0] == model.A[0]);
  CHECK(back.sigma_u == model.sigma_u);
  CHECK(back.xtx_inv == model.xtx_inv);
  CHECK(back.residuals.size() == 0);
  CHECK(back.design.size() == 0);

  SUBCASE("corrupt header is rejected") {
    varnet::write_text_file(path.string(), "not a model\n");
    CHECK_THROWS_AS(varnet::load_model(path.string()), std::runtime_error);
  }
  SUBCASE("truncated body is rejected") {
    const auto text = varnet::read_text_file(path.string());
    varnet::write_text_file(path.string(), text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(varnet::load_model(path.string()), std::runtime_error);
  }
}

TEST_CASE("coefficient covariance has the Kronecker block layout") {
  Eigen::MatrixXd A1(2, 2);
  A1 << 0.4, 0.1, 0.2, 0.3;
  const auto panel = simulated_panel({A1}, Eigen::MatrixXd::Identity(2, 2), 600, 13);
  const auto model = varnet::fit_var(panel, 1);
  const Eigen::MatrixXd cov = model.coef_cov();
  const Eigen::Index m = model.m();
  REQUIRE(cov.rows() == 2 * m);
  REQUIRE(cov.cols() == 2 * m);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      const Eigen::MatrixXd block = cov.block(i * m, j * m, m, m);
      const Eigen::MatrixXd expected = model.sigma_u(i, j) * model.xtx_inv;
      CHECK((block - expected).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
  CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-14);
}

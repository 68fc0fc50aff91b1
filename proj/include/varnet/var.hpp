#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "varnet/panel.hpp"

namespace varnet {

// Reduced-form VAR(p): y_t = c + A_1 y_{t-1} + ... + A_p y_{t-p} + u_t.
struct VarModel {
  std::vector<std::string> names;
  int p = 0;
  Eigen::VectorXd c;
  std::vector<Eigen::MatrixXd> A;
  Eigen::MatrixXd sigma_u;

  // Estimation byproducts. Population models leave all of these empty;
  // models read back from disk keep xtx_inv but not residuals or design.
  Eigen::MatrixXd residuals;  // (T - p) x K
  Eigen::MatrixXd design;     // (T - p) x m, rows (1, y_{t-1}', ..., y_{t-p}')
  Eigen::MatrixXd xtx_inv;    // m x m, (Z'Z)^{-1}
  Eigen::Index t_effective = 0;

  Eigen::Index K() const { return c.size(); }
  Eigen::Index m() const { return K() * p + 1; }

  // Covariance of the stacked coefficients under per-equation stacking:
  // equation blocks in variable order, within each equation the regressor
  // order (intercept, lag-1 all variables, lag-2 all variables, ...).
  // Equals sigma_u (Kronecker) (Z'Z)^{-1}. Requires xtx_inv.
  Eigen::MatrixXd coef_cov() const;

  int index_of(const std::string& name) const;
  void validate() const;
};

// Model with known parameters and no estimation history, for simulation
// studies and population-quantity checks.
VarModel population_model(std::vector<std::string> names, Eigen::VectorXd c,
                          std::vector<Eigen::MatrixXd> A,
                          Eigen::MatrixXd sigma_u);

// Multivariate least squares with common regressors (1, y_{t-1},...,y_{t-p}).
// sigma_u uses the adjusted divisor T - p - Kp - 1.
VarModel fit_var(const ReturnPanel& panel, int p);

enum class Criterion { kAic, kBic, kHq };

Criterion parse_criterion(const std::string& text);
std::string criterion_name(Criterion criterion);

// Argmin of the criterion over p = 1..p_max, every candidate evaluated on the
// sample trimmed at p_max so scores are comparable. Ties go to the smaller p.
int select_lag(const ReturnPanel& panel, int p_max, Criterion criterion);

// Theta_0..Theta_{h-1} of the moving-average representation:
// Theta_0 = I, Theta_l = sum_{m=1}^{min(l,p)} Theta_{l-m} A_m.
std::vector<Eigen::MatrixXd> ma_coefficients(const VarModel& model, int h);

// Var(h) = sum_{l=0}^{h-1} Theta_l sigma_u Theta_l'.
Eigen::MatrixXd forecast_error_variance(const VarModel& model, int h);

struct Stability {
  bool stable = false;
  double max_modulus = 0.0;
};

// Stable iff all eigenvalues of the Kp x Kp companion matrix lie inside the
// unit circle.
Stability is_stable(const VarModel& model);

// Plain-text serialization. Residuals and the design matrix are not written;
// a loaded model supports everything except residual-based diagnostics and
// robust covariances.
void save_model(const VarModel& model, const std::string& path);
VarModel load_model(const std::string& path);

}  // namespace varnet

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "varnet/panel.hpp"

namespace varnet {

struct JbResult {
  double stat;
  double pvalue;
};

// Jarque-Bera normality statistic n*(S^2/6 + (K-3)^2/24) with moment
// (n-divisor) skewness and kurtosis; p-value from the chi-square(2) upper
// tail. Requires n >= 8 and positive sample variance.
JbResult jarque_bera(const Eigen::VectorXd& x);

struct AdfResult {
  double stat;        // t-ratio on the lagged level
  int lag_used;       // augmentation lags in the final regression
  bool reject_1pct;
  bool reject_5pct;
  bool reject_10pct;

  bool rejects(double level) const;
};

// Constant-only large-sample Dickey-Fuller critical values.
inline constexpr double kAdfCrit1Pct = -3.44;
inline constexpr double kAdfCrit5Pct = -2.87;
inline constexpr double kAdfCrit10Pct = -2.60;

// Augmented Dickey-Fuller regression with intercept, no trend:
//   dx_t = a + rho * x_{t-1} + sum_i g_i * dx_{t-i} + e_t
// max_lag < 0 selects the lag automatically: candidates 0..floor(12*(n/100)^{1/4})
// (capped so at least 20 usable observations remain) are compared by AIC on
// the common sample, and the winner is refit on its maximal sample. The
// reject_* decisions compare the t-ratio against the constant-only critical
// values (reject when stat <= critical value); no p-value is computed.
AdfResult adf_test(const Eigen::VectorXd& x, int max_lag = -1);

struct SeriesStats {
  double mean;
  double std;  // sample, divisor n-1
  double min;
  double median;
  double max;
  double jb_stat;
  double mean_over_std;
  double adf_stat;
};

// One row of the per-series summary table per panel column, in column order.
// Requires every series to have length >= 20; a constant series fails with
// the jarque_bera zero-variance error.
std::vector<SeriesStats> summary_stats(const ReturnPanel& panel);

}  // namespace varnet

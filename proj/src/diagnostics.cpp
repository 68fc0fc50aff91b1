#include "varnet/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "varnet/math.hpp"

namespace varnet {

namespace {

// OLS via normal equations with an LDLT factorization; throws on a
// rank-deficient moment matrix (relative tolerance 1e-12).
struct OlsFit {
  Eigen::VectorXd beta;
  double ssr;
  Eigen::MatrixXd xtx_inv;
  Eigen::Index nobs;
};

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd xtx = X.transpose() * X;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
  const Eigen::VectorXd d = ldlt.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || dmax <= 0.0 ||
      d.minCoeff() <= 1e-12 * dmax) {
    throw std::invalid_argument("singular regression");
  }
  OlsFit fit;
  fit.beta = ldlt.solve(X.transpose() * y);
  fit.ssr = (y - X * fit.beta).squaredNorm();
  fit.xtx_inv = ldlt.solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
  fit.nobs = X.rows();
  return fit;
}

// Design matrix for the ADF regression with `lag` augmentation terms, using
// observations t = start..n-1 of the differenced series.
void adf_design(const Eigen::VectorXd& x, int lag, int start,
                Eigen::MatrixXd& X, Eigen::VectorXd& y) {
  const int n = static_cast<int>(x.size());
  const int rows = n - 1 - start;
  X.resize(rows, 2 + lag);
  y.resize(rows);
  for (int r = 0; r < rows; ++r) {
    const int t = start + 1 + r;  // index into levels; diff row t uses x_t - x_{t-1}
    y(r) = x(t) - x(t - 1);
    X(r, 0) = 1.0;
    X(r, 1) = x(t - 1);
    for (int i = 1; i <= lag; ++i) {
      X(r, 1 + i) = x(t - i) - x(t - i - 1);
    }
  }
}

double adf_t_ratio(const Eigen::VectorXd& x, int lag, OlsFit* fit_out) {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  adf_design(x, lag, lag, X, y);
  OlsFit fit = ols(X, y);
  const double dof = static_cast<double>(fit.nobs - X.cols());
  if (dof <= 0.0) throw std::invalid_argument("singular regression");
  const double sigma2 = fit.ssr / dof;
  const double se = std::sqrt(sigma2 * fit.xtx_inv(1, 1));
  if (fit_out) *fit_out = fit;
  return fit.beta(1) / se;
}

}  // namespace

JbResult jarque_bera(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  if (n < 8) throw std::invalid_argument("jarque_bera: need n >= 8");
  const double nf = static_cast<double>(n);
  const double mean = x.mean();
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = x(i) - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= nf;
  m3 /= nf;
  m4 /= nf;
  if (m2 <= 0.0) throw std::invalid_argument("jarque_bera: zero variance");
  const double skew = m3 / std::pow(m2, 1.5);
  const double ex_kurt = m4 / (m2 * m2) - 3.0;
  const double stat = nf * (skew * skew / 6.0 + ex_kurt * ex_kurt / 24.0);
  return {stat, chi2_sf(stat, 2)};
}

bool AdfResult::rejects(double level) const {
  if (level == 0.01) return reject_1pct;
  if (level == 0.05) return reject_5pct;
  if (level == 0.10) return reject_10pct;
  throw std::invalid_argument("adf decisions are available at 1%, 5% and 10% only");
}

AdfResult adf_test(const Eigen::VectorXd& x, int max_lag) {
  const int n = static_cast<int>(x.size());
  if (max_lag < 0) {
    // Schwert bound, capped so the selection sample keeps 20 observations.
    max_lag = static_cast<int>(std::floor(12.0 * std::pow(n / 100.0, 0.25)));
    max_lag = std::max(0, std::min(max_lag, n - 20));
  }
  if (n < max_lag + 20) {
    throw std::invalid_argument("adf_test: series too short for max_lag");
  }

  // Candidate lags compete by AIC on the sample trimmed for max_lag. A
  // candidate whose augmented design is rank deficient (e.g. a constant
  // differenced series) simply drops out of the race.
  int best_lag = -1;
  double best_aic = std::numeric_limits<double>::infinity();
  for (int lag = 0; lag <= max_lag; ++lag) {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    adf_design(x, lag, max_lag, X, y);
    double aic = 0.0;
    try {
      const OlsFit fit = ols(X, y);
      const double nobs = static_cast<double>(fit.nobs);
      aic = nobs * std::log(fit.ssr / nobs) + 2.0 * (2.0 + lag);
    } catch (const std::invalid_argument&) {
      continue;
    }
    if (aic < best_aic) {
      best_aic = aic;
      best_lag = lag;
    }
  }
  if (best_lag < 0) {
    throw std::invalid_argument("adf_test: no candidate regression has full rank");
  }

  // Refit the winner on its maximal sample.
  const double stat = adf_t_ratio(x, best_lag, nullptr);
  return {stat, best_lag, stat <= kAdfCrit1Pct, stat <= kAdfCrit5Pct,
          stat <= kAdfCrit10Pct};
}

std::vector<SeriesStats> summary_stats(const ReturnPanel& panel) {
  panel.validate();
  if (panel.T() < 20) {
    throw std::invalid_argument("summary_stats: need at least 20 observations");
  }
  std::vector<SeriesStats> out;
  out.reserve(static_cast<std::size_t>(panel.K()));
  for (Eigen::Index k = 0; k < panel.K(); ++k) {
    const Eigen::VectorXd x = panel.values.col(k);
    const double n = static_cast<double>(x.size());
    SeriesStats s{};
    s.mean = x.mean();
    s.std = std::sqrt((x.array() - s.mean).square().sum() / (n - 1.0));
    s.min = x.minCoeff();
    s.max = x.maxCoeff();
    std::vector<double> sorted(x.data(), x.data() + x.size());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    s.median = (sorted.size() % 2 == 1)
                   ? sorted[mid]
                   : 0.5 * (sorted[mid - 1] + sorted[mid]);
    s.jb_stat = jarque_bera(x).stat;  // throws on a constant series
    s.mean_over_std = s.mean / s.std;
    s.adf_stat = adf_test(x).stat;
    out.push_back(s);
  }
  return out;
}

}  // namespace varnet

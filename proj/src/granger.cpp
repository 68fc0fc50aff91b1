#include "varnet/granger.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "varnet/math.hpp"

namespace varnet {

namespace {

// Indices (within one equation's coefficient block) of source j's lags:
// regressor order is (intercept, lag-1 all vars, lag-2 all vars, ...).
std::vector<Eigen::Index> lag_positions(const VarModel& model, int j) {
  std::vector<Eigen::Index> idx;
  idx.reserve(static_cast<std::size_t>(model.p));
  for (int l = 1; l <= model.p; ++l) {
    idx.push_back(1 + static_cast<Eigen::Index>(l - 1) * model.K() + j);
  }
  return idx;
}

// HC0 covariance of equation i's coefficients:
// (Z'Z)^{-1} [sum_t u_{ti}^2 z_t z_t'] (Z'Z)^{-1}.
Eigen::MatrixXd hc0_equation_cov(const VarModel& model, int i) {
  if (model.design.size() == 0 || model.residuals.size() == 0) {
    throw std::invalid_argument(
        "robust covariance needs the fitted design and residuals, which are "
        "not retained by serialized models");
  }
  const Eigen::ArrayXd u2 = model.residuals.col(i).array().square();
  const Eigen::MatrixXd meat =
      model.design.transpose() * (model.design.array().colwise() * u2).matrix();
  return model.xtx_inv * meat * model.xtx_inv;
}

std::string level_band(double level) {
  const double pct = 100.0 * level;
  char buf[32];
  if (pct == std::floor(pct)) {
    std::snprintf(buf, sizeof(buf), "%.0f%%", pct);
  } else {
    std::snprintf(buf, sizeof(buf), "%g%%", pct);
  }
  return buf;
}

}  // namespace

WaldResult wald_noncausality(const VarModel& model, const std::string& source,
                             const std::string& target, bool robust) {
  model.validate();
  if (source == target) {
    throw std::invalid_argument("source and target must differ");
  }
  if (model.xtx_inv.size() == 0) {
    throw std::invalid_argument("model carries no coefficient covariance");
  }
  const int j = model.index_of(source);
  const int i = model.index_of(target);
  const int p = model.p;

  Eigen::VectorXd r(p);
  for (int l = 1; l <= p; ++l) {
    r(l - 1) = model.A[static_cast<std::size_t>(l - 1)](i, j);
  }

  const auto idx = lag_positions(model, j);
  Eigen::MatrixXd V(p, p);
  if (robust) {
    const Eigen::MatrixXd full = hc0_equation_cov(model, i);
    for (int a = 0; a < p; ++a) {
      for (int b = 0; b < p; ++b) {
        V(a, b) = full(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
      }
    }
  } else {
    const double s_ii = model.sigma_u(i, i);
    for (int a = 0; a < p; ++a) {
      for (int b = 0; b < p; ++b) {
        V(a, b) = s_ii * model.xtx_inv(idx[static_cast<std::size_t>(a)],
                                       idx[static_cast<std::size_t>(b)]);
      }
    }
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(V);
  const Eigen::VectorXd d = ldlt.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || dmax <= 0.0 ||
      d.minCoeff() <= 1e-12 * dmax) {
    throw std::invalid_argument("singular restricted covariance block for " +
                                source + " -> " + target);
  }
  const double stat = std::max(0.0, r.dot(ldlt.solve(r)));
  return {source, target, stat, p, chi2_sf(stat, p)};
}

PValueMatrix pvalue_matrix(const VarModel& model, bool robust) {
  model.validate();
  const Eigen::Index K = model.K();
  PValueMatrix pm;
  pm.names = model.names;
  pm.p = Eigen::MatrixXd::Constant(K, K, std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index i = 0; i < K; ++i) {
    for (Eigen::Index j = 0; j < K; ++j) {
      if (i == j) continue;
      try {
        const auto w = wald_noncausality(model, model.names[static_cast<std::size_t>(j)],
                                         model.names[static_cast<std::size_t>(i)], robust);
        pm.p(i, j) = w.pvalue;
      } catch (const std::exception& e) {
        pm.failures.push_back({static_cast<int>(i), static_cast<int>(j), e.what()});
      }
    }
  }
  return pm;
}

NetworkGraph causal_network(const PValueMatrix& pm,
                            const GroupPartition& partition,
                            const std::vector<double>& levels) {
  if (levels.empty()) throw std::invalid_argument("no significance levels given");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] <= 0.0 || levels[i] >= 1.0 ||
        (i > 0 && levels[i] <= levels[i - 1])) {
      throw std::invalid_argument("levels must be strictly increasing in (0,1)");
    }
  }
  partition.validate_covers(pm.names);

  NetworkGraph g;
  g.kind = "granger";
  for (const auto& name : pm.names) {
    g.nodes.push_back({name, partition.label_of(name)});
  }
  const Eigen::Index K = pm.p.rows();
  const double max_level = levels.back();
  for (Eigen::Index i = 0; i < K; ++i) {
    for (Eigen::Index j = 0; j < K; ++j) {
      if (i == j) continue;
      const double pv = pm.p(i, j);
      if (!(pv <= max_level)) continue;  // NaN cells drop out here
      std::size_t b = 0;
      while (pv > levels[b]) ++b;
      g.edges.push_back({pm.names[static_cast<std::size_t>(j)],
                         pm.names[static_cast<std::size_t>(i)], pv,
                         level_band(levels[b])});
    }
  }
  g.validate();
  return g;
}

NetworkGraph causal_network(const PValueMatrix& pm,
                            const std::vector<double>& levels) {
  return causal_network(pm, single_group(pm.names), levels);
}

}  // namespace varnet

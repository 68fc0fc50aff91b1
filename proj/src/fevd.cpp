#include "varnet/fevd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "varnet/rng.hpp"

namespace varnet {

GvdMatrix gvd(const VarModel& model, int h) {
  model.validate();
  if (h < 1) throw std::invalid_argument("horizon must be >= 1");
  const Eigen::Index K = model.K();
  for (Eigen::Index j = 0; j < K; ++j) {
    if (model.sigma_u(j, j) <= 0.0) {
      throw std::invalid_argument("sigma_u has a nonpositive diagonal entry");
    }
  }
  const auto theta = ma_coefficients(model, h);
  const Eigen::MatrixXd var_h = forecast_error_variance(model, h);

  // numer(i,j) = sum_l (e_i' Theta_l Sigma_u e_j)^2
  Eigen::MatrixXd numer = Eigen::MatrixXd::Zero(K, K);
  for (const auto& t : theta) {
    numer += (t * model.sigma_u).array().square().matrix();
  }
  GvdMatrix out;
  out.names = model.names;
  out.h = h;
  out.values.resize(K, K);
  for (Eigen::Index i = 0; i < K; ++i) {
    const double var_i = var_h(i, i);
    if (var_i <= 0.0) {
      throw std::invalid_argument("degenerate forecast-error variance");
    }
    for (Eigen::Index j = 0; j < K; ++j) {
      out.values(i, j) = numer(i, j) / (model.sigma_u(j, j) * var_i);
    }
  }
  return out;
}

GvdMatrix sgvd(const GvdMatrix& g) {
  GvdMatrix out;
  out.names = g.names;
  out.h = g.h;
  out.values.resizeLike(g.values);
  for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
    const double row_sum = g.values.row(i).sum();
    if (row_sum <= 0.0) {
      throw std::invalid_argument("zero row sum in variance decomposition");
    }
    out.values.row(i) = 100.0 * g.values.row(i) / row_sum;
  }
  return out;
}

ConnectednessTable connectedness_table(const GvdMatrix& s,
                                       const GroupPartition& partition) {
  partition.validate_covers(s.names);
  const Eigen::Index K = s.values.rows();

  ConnectednessTable table;
  table.names = s.names;
  table.group_labels = partition.labels_in_order(s.names);
  table.sgvd = s.values;
  table.partition = partition;
  table.h = s.h;

  const Eigen::Index G = static_cast<Eigen::Index>(table.group_labels.size());
  std::vector<Eigen::Index> group_index(static_cast<std::size_t>(K));
  for (Eigen::Index k = 0; k < K; ++k) {
    const std::string& label = partition.label_of(s.names[static_cast<std::size_t>(k)]);
    const auto it = std::find(table.group_labels.begin(), table.group_labels.end(), label);
    group_index[static_cast<std::size_t>(k)] = it - table.group_labels.begin();
  }

  table.from_group = Eigen::MatrixXd::Zero(K, G);
  table.to_group = Eigen::MatrixXd::Zero(G, K);
  for (Eigen::Index i = 0; i < K; ++i) {
    for (Eigen::Index j = 0; j < K; ++j) {
      if (i == j) continue;
      table.from_group(i, group_index[static_cast<std::size_t>(j)]) += s.values(i, j);
      table.to_group(group_index[static_cast<std::size_t>(i)], j) += s.values(i, j);
    }
  }
  return table;
}

Eigen::VectorXd empirical_fev_oracle(const VarModel& model, int h,
                                     std::int64_t nsims, std::uint64_t seed) {
  model.validate();
  if (h < 1) throw std::invalid_argument("horizon must be >= 1");
  if (nsims < 1000) throw std::invalid_argument("nsims must be >= 1000");
  const auto stab = is_stable(model);
  if (!stab.stable) {
    throw std::invalid_argument("model is not stable (max companion modulus " +
                                std::to_string(stab.max_modulus) + ")");
  }
  const Eigen::Index K = model.K();
  Eigen::LLT<Eigen::MatrixXd> llt(model.sigma_u);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("sigma_u is not positive definite");
  }
  const Eigen::MatrixXd L = llt.matrixL();

  // Forecast-error recursion from the zero state: e_s = sum_m A_m e_{s-m} + u_s.
  // The deterministic forecast cancels, so only shocks propagate.
  constexpr std::int64_t kChunk = 4096;
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(K);
  std::vector<Eigen::VectorXd> err(static_cast<std::size_t>(h));
  Eigen::VectorXd z(K);
  for (std::int64_t start = 0; start < nsims; start += kChunk) {
    const std::int64_t stop = std::min(nsims, start + kChunk);
    GaussianRng rng(derive_seed(seed, static_cast<std::uint64_t>(start / kChunk)));
    for (std::int64_t sim = start; sim < stop; ++sim) {
      for (int s = 0; s < h; ++s) {
        for (Eigen::Index k = 0; k < K; ++k) z(k) = rng.normal();
        Eigen::VectorXd e = L * z;
        const int lim = std::min(s, model.p);
        for (int m = 1; m <= lim; ++m) {
          e += model.A[static_cast<std::size_t>(m - 1)] * err[static_cast<std::size_t>(s - m)];
        }
        err[static_cast<std::size_t>(s)] = std::move(e);
      }
      sum_sq += err[static_cast<std::size_t>(h - 1)].cwiseAbs2();
    }
  }
  return sum_sq / static_cast<double>(nsims);
}

}  // namespace varnet

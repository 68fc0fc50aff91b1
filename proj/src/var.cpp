#include "varnet/var.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "varnet/csv.hpp"

namespace varnet {

namespace {

constexpr double kSingularTol = 1e-12;

// Solves the normal equations X b = rhs for a symmetric PSD moment matrix,
// throwing when the pivots fall below the relative singularity tolerance.
Eigen::LDLT<Eigen::MatrixXd> factor_moment(const Eigen::MatrixXd& xtx) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
  const Eigen::VectorXd d = ldlt.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || dmax <= 0.0 ||
      d.minCoeff() <= kSingularTol * dmax) {
    throw std::invalid_argument("singular regressor moment matrix");
  }
  return ldlt;
}

// Lagged design for rows t = start..T-1: (1, y_{t-1}', ..., y_{t-p}').
Eigen::MatrixXd lag_design(const Eigen::MatrixXd& values, int p, int start) {
  const Eigen::Index T = values.rows();
  const Eigen::Index K = values.cols();
  const Eigen::Index rows = T - start;
  Eigen::MatrixXd Z(rows, K * p + 1);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index t = start + r;
    Z(r, 0) = 1.0;
    for (int lag = 1; lag <= p; ++lag) {
      Z.block(r, 1 + (lag - 1) * K, 1, K) = values.row(t - lag);
    }
  }
  return Z;
}

double log_det_psd(const Eigen::MatrixXd& s) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
  const Eigen::VectorXd d = ldlt.vectorD();
  double ld = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) <= 0.0) return -std::numeric_limits<double>::infinity();
    ld += std::log(d(i));
  }
  return ld;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

}  // namespace

Eigen::MatrixXd VarModel::coef_cov() const {
  if (xtx_inv.size() == 0) {
    throw std::logic_error("coef_cov: model has no regressor moment matrix");
  }
  const Eigen::Index k = K();
  const Eigen::Index mm = m();
  Eigen::MatrixXd cov(k * mm, k * mm);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      cov.block(i * mm, j * mm, mm, mm) = sigma_u(i, j) * xtx_inv;
    }
  }
  return cov;
}

int VarModel::index_of(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw std::invalid_argument("unknown variable " + name);
  }
  return static_cast<int>(it - names.begin());
}

void VarModel::validate() const {
  const Eigen::Index k = K();
  if (k < 1) throw std::invalid_argument("model has no variables");
  if (static_cast<Eigen::Index>(names.size()) != k) {
    throw std::invalid_argument("model name count does not match K");
  }
  if (p < 0 || static_cast<int>(A.size()) != p) {
    throw std::invalid_argument("model must hold exactly p lag matrices");
  }
  for (const auto& a : A) {
    if (a.rows() != k || a.cols() != k || !a.allFinite()) {
      throw std::invalid_argument("lag matrix is not a finite KxK matrix");
    }
  }
  if (sigma_u.rows() != k || sigma_u.cols() != k || !sigma_u.allFinite()) {
    throw std::invalid_argument("sigma_u is not a finite KxK matrix");
  }
  if ((sigma_u - sigma_u.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("sigma_u is not symmetric");
  }
  if (!c.allFinite()) throw std::invalid_argument("intercept is not finite");
}

VarModel population_model(std::vector<std::string> names, Eigen::VectorXd c,
                          std::vector<Eigen::MatrixXd> A,
                          Eigen::MatrixXd sigma_u) {
  VarModel model;
  model.names = std::move(names);
  model.p = static_cast<int>(A.size());
  model.c = std::move(c);
  model.A = std::move(A);
  model.sigma_u = std::move(sigma_u);
  model.validate();
  return model;
}

VarModel fit_var(const ReturnPanel& panel, int p) {
  if (p < 1) throw std::invalid_argument("lag order must be >= 1");
  panel.validate();
  const Eigen::Index T = panel.T();
  const Eigen::Index K = panel.K();
  const Eigen::Index m = K * p + 1;
  if (T - p <= m) {
    throw std::invalid_argument("insufficient observations for VAR(" +
                                std::to_string(p) + ")");
  }

  const Eigen::MatrixXd Z = lag_design(panel.values, p, p);
  const Eigen::MatrixXd Y = panel.values.bottomRows(T - p);
  const Eigen::MatrixXd ztz = Z.transpose() * Z;
  const auto ldlt = factor_moment(ztz);
  const Eigen::MatrixXd B = ldlt.solve(Z.transpose() * Y);  // m x K
  const Eigen::MatrixXd U = Y - Z * B;

  VarModel model;
  model.names = panel.names;
  model.p = p;
  model.c = B.row(0).transpose();
  model.A.reserve(static_cast<std::size_t>(p));
  for (int lag = 1; lag <= p; ++lag) {
    Eigen::MatrixXd a(K, K);
    for (Eigen::Index i = 0; i < K; ++i) {
      for (Eigen::Index j = 0; j < K; ++j) {
        a(i, j) = B(1 + (lag - 1) * K + j, i);
      }
    }
    model.A.push_back(std::move(a));
  }
  const double dof = static_cast<double>(T - p - K * p - 1);
  Eigen::MatrixXd s = (U.transpose() * U) / dof;
  model.sigma_u = 0.5 * (s + s.transpose());
  model.residuals = U;
  model.design = Z;
  model.xtx_inv = ldlt.solve(Eigen::MatrixXd::Identity(m, m));
  model.t_effective = T - p;
  model.validate();
  return model;
}

Criterion parse_criterion(const std::string& text) {
  if (text == "aic") return Criterion::kAic;
  if (text == "bic") return Criterion::kBic;
  if (text == "hq") return Criterion::kHq;
  throw std::invalid_argument("unknown criterion " + text +
                              " (expected aic, bic or hq)");
}

std::string criterion_name(Criterion criterion) {
  switch (criterion) {
    case Criterion::kAic: return "aic";
    case Criterion::kBic: return "bic";
    case Criterion::kHq: return "hq";
  }
  throw std::logic_error("unreachable");
}

int select_lag(const ReturnPanel& panel, int p_max, Criterion criterion) {
  if (p_max < 1) throw std::invalid_argument("p_max must be >= 1");
  panel.validate();
  const Eigen::Index T = panel.T();
  const Eigen::Index K = panel.K();
  const Eigen::Index t_eff = T - p_max;
  if (t_eff <= K * p_max + 1) {
    throw std::invalid_argument("insufficient observations for lag search up to " +
                                std::to_string(p_max));
  }
  const Eigen::MatrixXd Y = panel.values.bottomRows(t_eff);
  const double n = static_cast<double>(t_eff);

  int best_p = 1;
  double best_score = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= p_max; ++p) {
    const Eigen::MatrixXd Z = lag_design(panel.values, p, p_max);
    const auto ldlt = factor_moment(Z.transpose() * Z);
    const Eigen::MatrixXd B = ldlt.solve(Z.transpose() * Y);
    const Eigen::MatrixXd U = Y - Z * B;
    const Eigen::MatrixXd sigma_ml = (U.transpose() * U) / n;
    const double ld = log_det_psd(sigma_ml);
    const double m = static_cast<double>(K * (K * p + 1));
    double penalty = 0.0;
    switch (criterion) {
      case Criterion::kAic: penalty = 2.0 * m / n; break;
      case Criterion::kBic: penalty = m * std::log(n) / n; break;
      case Criterion::kHq: penalty = 2.0 * m * std::log(std::log(n)) / n; break;
    }
    const double score = ld + penalty;
    if (score < best_score) {
      best_score = score;
      best_p = p;
    }
  }
  return best_p;
}

std::vector<Eigen::MatrixXd> ma_coefficients(const VarModel& model, int h) {
  if (h < 1) throw std::invalid_argument("horizon must be >= 1");
  const Eigen::Index K = model.K();
  std::vector<Eigen::MatrixXd> theta;
  theta.reserve(static_cast<std::size_t>(h));
  theta.push_back(Eigen::MatrixXd::Identity(K, K));
  for (int l = 1; l < h; ++l) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(K, K);
    const int lim = std::min(l, model.p);
    for (int m = 1; m <= lim; ++m) {
      t += theta[static_cast<std::size_t>(l - m)] * model.A[static_cast<std::size_t>(m - 1)];
    }
    theta.push_back(std::move(t));
  }
  return theta;
}

Eigen::MatrixXd forecast_error_variance(const VarModel& model, int h) {
  const auto theta = ma_coefficients(model, h);
  const Eigen::Index K = model.K();
  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(K, K);
  for (const auto& t : theta) {
    var += t * model.sigma_u * t.transpose();
  }
  return 0.5 * (var + var.transpose());
}

Stability is_stable(const VarModel& model) {
  const Eigen::Index K = model.K();
  const Eigen::Index n = K * model.p;
  if (n == 0) return {true, 0.0};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int lag = 1; lag <= model.p; ++lag) {
    companion.block(0, (lag - 1) * K, K, K) = model.A[static_cast<std::size_t>(lag - 1)];
  }
  if (model.p > 1) {
    companion.block(K, 0, n - K, n - K).setIdentity();
  }
  const Eigen::VectorXcd eig = companion.eigenvalues();
  const double max_mod = eig.cwiseAbs().maxCoeff();
  return {max_mod < 1.0, max_mod};
}

void save_model(const VarModel& model, const std::string& path) {
  model.validate();
  std::string out;
  out += "varnet model v1\n";
  out += "K " + std::to_string(model.K()) + "\n";
  out += "p " + std::to_string(model.p) + "\n";
  out += "t_eff " + std::to_string(model.t_effective) + "\n";
  out += "names";
  for (const auto& n : model.names) out += " " + n;
  out += "\n";
  const auto write_row = [&out](const auto& row) {
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      if (j > 0) out += " ";
      out += format_full(row(j));
    }
    out += "\n";
  };
  const auto write_matrix = [&](const Eigen::MatrixXd& mat) {
    for (Eigen::Index i = 0; i < mat.rows(); ++i) write_row(mat.row(i));
  };
  out += "c\n";
  write_row(model.c.transpose());
  for (int lag = 1; lag <= model.p; ++lag) {
    out += "A " + std::to_string(lag) + "\n";
    write_matrix(model.A[static_cast<std::size_t>(lag - 1)]);
  }
  out += "sigma_u\n";
  write_matrix(model.sigma_u);
  if (model.xtx_inv.size() == 0) {
    out += "xtx_inv none\n";
  } else {
    out += "xtx_inv\n";
    write_matrix(model.xtx_inv);
  }
  write_text_file(path, out);
}

VarModel load_model(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  std::size_t pos = 0;
  const auto fail = [&path](const std::string& why) -> std::runtime_error {
    return std::runtime_error("model file " + path + ": " + why);
  };
  const auto next = [&]() -> std::vector<std::string> {
    if (pos >= lines.size()) throw fail("truncated");
    return tokens(lines[pos++]);
  };
  const auto expect_int = [&](const std::string& key) -> Eigen::Index {
    const auto t = next();
    if (t.size() != 2 || t[0] != key) throw fail("expected " + key);
    return static_cast<Eigen::Index>(std::stoll(t[1]));
  };
  const auto read_row = [&](Eigen::Index n) -> Eigen::VectorXd {
    const auto t = next();
    if (static_cast<Eigen::Index>(t.size()) != n) throw fail("bad row width");
    Eigen::VectorXd v(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto d = parse_double(t[static_cast<std::size_t>(j)]);
      if (!d) throw fail("bad number " + t[static_cast<std::size_t>(j)]);
      v(j) = *d;
    }
    return v;
  };
  const auto read_matrix = [&](Eigen::Index r, Eigen::Index c) -> Eigen::MatrixXd {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) m.row(i) = read_row(c).transpose();
    return m;
  };

  if (pos >= lines.size() || lines[pos++] != "varnet model v1") {
    throw fail("unrecognized header");
  }
  const Eigen::Index K = expect_int("K");
  const Eigen::Index p = expect_int("p");
  const Eigen::Index t_eff = expect_int("t_eff");
  auto name_toks = next();
  if (name_toks.empty() || name_toks[0] != "names" ||
      static_cast<Eigen::Index>(name_toks.size()) != K + 1) {
    throw fail("expected names");
  }

  VarModel model;
  model.names.assign(name_toks.begin() + 1, name_toks.end());
  model.p = static_cast<int>(p);
  model.t_effective = t_eff;
  if (next() != std::vector<std::string>{"c"}) throw fail("expected c");
  model.c = read_row(K);
  for (Eigen::Index lag = 1; lag <= p; ++lag) {
    const auto t = next();
    if (t.size() != 2 || t[0] != "A" || t[1] != std::to_string(lag)) {
      throw fail("expected A " + std::to_string(lag));
    }
    model.A.push_back(read_matrix(K, K));
  }
  if (next() != std::vector<std::string>{"sigma_u"}) throw fail("expected sigma_u");
  model.sigma_u = read_matrix(K, K);
  const auto xt = next();
  if (xt == std::vector<std::string>{"xtx_inv", "none"}) {
    // population model round trip, nothing more to read
  } else if (xt == std::vector<std::string>{"xtx_inv"}) {
    model.xtx_inv = read_matrix(K * p + 1, K * p + 1);
  } else {
    throw fail("expected xtx_inv");
  }
  model.validate();
  return model;
}

}  // namespace varnet

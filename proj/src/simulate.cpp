#include "varnet/simulate.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

#include "varnet/csv.hpp"
#include "varnet/diagnostics.hpp"
#include "varnet/granger.hpp"
#include "varnet/rng.hpp"
#include "varnet/var.hpp"

namespace varnet {

void DgpSpec::validate() const {
  const Eigen::Index k = K();
  if (k < 1) throw std::invalid_argument("dgp: no variables");
  if (static_cast<Eigen::Index>(names.size()) != k) {
    throw std::invalid_argument("dgp: name count does not match K");
  }
  detail::check_names(names);
  for (const auto& a : A) {
    if (a.rows() != k || a.cols() != k || !a.allFinite()) {
      throw std::invalid_argument("dgp: lag matrix is not a finite KxK matrix");
    }
  }
  if (sigma_u.rows() != k || sigma_u.cols() != k || !sigma_u.allFinite() ||
      (sigma_u - sigma_u.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("dgp: sigma_u is not a symmetric KxK matrix");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_u);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("dgp: sigma_u is not positive definite");
  }
  if (dist == ShockDist::kScaledT && nu <= 2.0) {
    throw std::invalid_argument("dgp: scaled-t needs nu > 2");
  }
  if (n < 1) throw std::invalid_argument("dgp: n must be >= 1");
  if (burn_in < 0) throw std::invalid_argument("dgp: burn_in must be >= 0");
  const auto stab = is_stable(population_model(names, c, A, sigma_u));
  if (!stab.stable) {
    throw std::invalid_argument("dgp: unstable process (max companion modulus " +
                                std::to_string(stab.max_modulus) + ")");
  }
}

ReturnPanel simulate_var(const DgpSpec& spec) {
  spec.validate();
  const Eigen::Index K = spec.K();
  const int p = spec.p();
  const Eigen::MatrixXd L =
      Eigen::LLT<Eigen::MatrixXd>(spec.sigma_u).matrixL();
  GaussianRng rng(spec.seed);

  const Eigen::Index total = spec.burn_in + spec.n;
  Eigen::MatrixXd path = Eigen::MatrixXd::Zero(total + p, K);  // p zero rows prepended
  Eigen::VectorXd z(K);
  for (Eigen::Index t = p; t < total + p; ++t) {
    for (Eigen::Index k = 0; k < K; ++k) {
      z(k) = spec.dist == ShockDist::kGaussian ? rng.normal()
                                               : rng.scaled_t(spec.nu);
    }
    Eigen::VectorXd y = spec.c + L * z;
    for (int m = 1; m <= p; ++m) {
      y += spec.A[static_cast<std::size_t>(m - 1)] * path.row(t - m).transpose();
    }
    path.row(t) = y.transpose();
  }

  ReturnPanel panel;
  panel.names = spec.names;
  panel.values = path.bottomRows(spec.n);
  panel.partition = single_group(spec.names);
  panel.dates.reserve(static_cast<std::size_t>(spec.n));
  Date d{2000, 1, 1};
  for (Eigen::Index t = 0; t < spec.n; ++t) {
    panel.dates.push_back(d);
    d = next_day(d);
  }
  panel.validate();
  return panel;
}

TestDescriptor parse_test_descriptor(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  const auto fail = [&text]() -> std::invalid_argument {
    return std::invalid_argument(
        "bad test descriptor '" + text +
        "' (expected granger:SOURCE:TARGET, jb:VAR or adf:VAR)");
  };
  if (parts[0] == "granger") {
    if (parts.size() != 3 || parts[1].empty() || parts[2].empty()) throw fail();
    return {parts[0], parts[1], parts[2]};
  }
  if (parts[0] == "jb" || parts[0] == "adf") {
    if (parts.size() != 2 || parts[1].empty()) throw fail();
    return {parts[0], "", parts[1]};
  }
  throw fail();
}

McResult mc_rejection_rate(const DgpSpec& spec, const std::string& test,
                           double level, long reps) {
  if (reps < 100) throw std::invalid_argument("mc: reps must be >= 100");
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("mc: level must lie in (0,1)");
  }
  const TestDescriptor td = parse_test_descriptor(test);
  spec.validate();

  // Fail fast on names that do not exist rather than excluding every rep.
  const auto column_of = [&spec](const std::string& name) -> Eigen::Index {
    const auto it = std::find(spec.names.begin(), spec.names.end(), name);
    if (it == spec.names.end()) {
      throw std::invalid_argument("mc: unknown variable " + name);
    }
    return it - spec.names.begin();
  };
  if (td.kind == "granger") {
    column_of(td.source);
    column_of(td.target);
    if (td.source == td.target) {
      throw std::invalid_argument("mc: granger source and target must differ");
    }
  } else {
    column_of(td.target);
  }
  if (td.kind == "adf" && level != 0.01 && level != 0.05 && level != 0.10) {
    throw std::invalid_argument("mc: adf decisions exist at 0.01, 0.05, 0.10 only");
  }

  McResult out;
  out.reps = reps;
  for (long rep = 0; rep < reps; ++rep) {
    DgpSpec rep_spec = spec;
    rep_spec.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(rep));
    try {
      const ReturnPanel panel = simulate_var(rep_spec);
      bool reject = false;
      if (td.kind == "granger") {
        const VarModel model = fit_var(panel, spec.p());
        reject = wald_noncausality(model, td.source, td.target).pvalue <= level;
      } else if (td.kind == "jb") {
        reject = jarque_bera(panel.values.col(column_of(td.target))).pvalue <= level;
      } else {
        reject = adf_test(panel.values.col(column_of(td.target))).rejects(level);
      }
      if (reject) ++out.rejections;
    } catch (const std::exception&) {
      ++out.exclusions;
    }
  }
  const long effective = reps - out.exclusions;
  if (effective == 0) throw std::runtime_error("mc: every replication failed");
  out.rate = static_cast<double>(out.rejections) / static_cast<double>(effective);
  return out;
}

DgpSpec load_dgp_spec(const std::string& path) {
  const std::string text = read_text_file(path);
  const auto fail = [&path](const std::string& why) -> std::runtime_error {
    return std::runtime_error("dgp file " + path + ": " + why);
  };

  // key -> token list, matrices kept as row strings split on ';'
  std::istringstream in(text);
  std::string line;
  Eigen::Index K = 0;
  int p = -1;
  DgpSpec spec;
  bool have_n = false, have_seed = false;
  std::vector<std::pair<std::string, std::string>> entries;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string rest;
    std::getline(ls, rest);
    entries.emplace_back(key, rest);
  }

  const auto parse_scalar = [&fail](const std::string& key, const std::string& rest) {
    std::istringstream rs(rest);
    std::string tok;
    if (!(rs >> tok)) throw fail(key + " needs a value");
    std::string extra;
    if (rs >> extra) throw fail(key + " takes one value");
    const auto v = parse_double(tok);
    if (!v) throw fail("bad number for " + key);
    return *v;
  };
  const auto parse_row = [&fail](const std::string& key, const std::string& rest,
                                 Eigen::Index width) {
    std::istringstream rs(rest);
    Eigen::VectorXd v(width);
    std::string tok;
    for (Eigen::Index i = 0; i < width; ++i) {
      if (!(rs >> tok)) throw fail(key + ": expected " + std::to_string(width) + " values");
      const auto d = parse_double(tok);
      if (!d) throw fail("bad number for " + key);
      v(i) = *d;
    }
    std::string extra;
    if (rs >> extra) throw fail(key + ": too many values");
    return v;
  };
  const auto parse_matrix = [&](const std::string& key, const std::string& rest) {
    std::vector<std::string> rows;
    std::string cur;
    std::istringstream rs(rest);
    char ch;
    while (rs.get(ch)) {
      if (ch == ';') {
        rows.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    rows.push_back(cur);
    if (static_cast<Eigen::Index>(rows.size()) != K) {
      throw fail(key + ": expected " + std::to_string(K) + " ';'-separated rows");
    }
    Eigen::MatrixXd m(K, K);
    for (Eigen::Index i = 0; i < K; ++i) {
      m.row(i) = parse_row(key, rows[static_cast<std::size_t>(i)], K).transpose();
    }
    return m;
  };

  // First pass for dimensions so matrix keys can appear in any order after them.
  for (const auto& [key, rest] : entries) {
    if (key == "K") K = static_cast<Eigen::Index>(parse_scalar(key, rest));
    if (key == "p") p = static_cast<int>(parse_scalar(key, rest));
  }
  if (K < 1) throw fail("missing or bad K");
  if (p < 0) throw fail("missing or bad p");
  spec.A.assign(static_cast<std::size_t>(p), Eigen::MatrixXd());

  for (const auto& [key, rest] : entries) {
    if (key == "K" || key == "p") continue;
    if (key == "n") {
      spec.n = static_cast<Eigen::Index>(parse_scalar(key, rest));
      have_n = true;
    } else if (key == "burn_in") {
      spec.burn_in = static_cast<Eigen::Index>(parse_scalar(key, rest));
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(parse_scalar(key, rest));
      have_seed = true;
    } else if (key == "dist") {
      std::istringstream rs(rest);
      std::string kind;
      rs >> kind;
      if (kind == "gaussian") {
        spec.dist = ShockDist::kGaussian;
      } else if (kind == "t") {
        spec.dist = ShockDist::kScaledT;
        std::string nu_tok;
        if (!(rs >> nu_tok)) throw fail("dist t needs degrees of freedom");
        const auto nu = parse_double(nu_tok);
        if (!nu) throw fail("bad degrees of freedom");
        spec.nu = *nu;
      } else {
        throw fail("dist must be gaussian or t NU");
      }
    } else if (key == "names") {
      std::istringstream rs(rest);
      std::string name;
      while (rs >> name) spec.names.push_back(name);
      if (static_cast<Eigen::Index>(spec.names.size()) != K) {
        throw fail("names: expected " + std::to_string(K) + " identifiers");
      }
    } else if (key == "c") {
      spec.c = parse_row(key, rest, K);
    } else if (key.size() > 1 && key[0] == 'A' &&
               std::all_of(key.begin() + 1, key.end(),
                           [](unsigned char c) { return std::isdigit(c); })) {
      const int lag = std::stoi(key.substr(1));
      if (lag < 1 || lag > p) throw fail(key + ": lag outside 1.." + std::to_string(p));
      spec.A[static_cast<std::size_t>(lag - 1)] = parse_matrix(key, rest);
    } else if (key == "sigma") {
      spec.sigma_u = parse_matrix(key, rest);
    } else {
      throw fail("unknown key " + key);
    }
  }

  if (spec.names.empty()) {
    for (Eigen::Index k = 1; k <= K; ++k) spec.names.push_back("y" + std::to_string(k));
  }
  if (spec.c.size() == 0) spec.c = Eigen::VectorXd::Zero(K);
  for (int lag = 1; lag <= p; ++lag) {
    if (spec.A[static_cast<std::size_t>(lag - 1)].size() == 0) {
      throw fail("missing A" + std::to_string(lag));
    }
  }
  if (spec.sigma_u.size() == 0) throw fail("missing sigma");
  if (!have_n) throw fail("missing n");
  if (!have_seed) throw fail("missing seed");
  spec.validate();
  return spec;
}

}  // namespace varnet

#include "varnet/report.hpp"

#include <cmath>
#include <stdexcept>

#include <openssl/evp.h>

#include "varnet/csv.hpp"

namespace varnet {

namespace {

std::string cell(double v, int decimals) {
  return decimals < 0 ? format_full(v) : format_fixed(v, decimals);
}

}  // namespace

std::string stats_csv(const std::vector<std::string>& names,
                      const std::vector<SeriesStats>& stats, int decimals) {
  if (names.size() != stats.size()) {
    throw std::invalid_argument("stats_csv: one name per stats row required");
  }
  std::string out =
      "Variable,Mean,Std.,Min,Median,Max,JB Stat.,Mean/Std.,ADF Stat.\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    const SeriesStats& s = stats[i];
    out += names[i];
    for (double v : {s.mean, s.std, s.min, s.median, s.max, s.jb_stat,
                     s.mean_over_std, s.adf_stat}) {
      out += "," + cell(v, decimals);
    }
    out += "\n";
  }
  return out;
}

std::string pvalues_csv(const PValueMatrix& pm, int decimals) {
  std::string out = "Causality From →";
  for (const auto& n : pm.names) out += "," + n;
  out += "\n";
  for (Eigen::Index i = 0; i < pm.p.rows(); ++i) {
    out += pm.names[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < pm.p.cols(); ++j) {
      out += ",";
      const double v = pm.p(i, j);
      if (i != j && !std::isnan(v)) out += cell(v, decimals);
    }
    out += "\n";
  }
  return out;
}

std::string connectedness_csv(const ConnectednessTable& table, int decimals) {
  const Eigen::Index K = table.sgvd.rows();
  const Eigen::Index G = static_cast<Eigen::Index>(table.group_labels.size());
  std::string out;
  for (const auto& n : table.names) out += "," + n;
  for (const auto& g : table.group_labels) out += ",From " + g;
  out += "\n";
  for (Eigen::Index i = 0; i < K; ++i) {
    out += table.names[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < K; ++j) out += "," + cell(table.sgvd(i, j), decimals);
    for (Eigen::Index g = 0; g < G; ++g) {
      out += "," + cell(table.from_group(i, g), decimals);
    }
    out += "\n";
  }
  for (Eigen::Index g = 0; g < G; ++g) {
    out += "To " + table.group_labels[static_cast<std::size_t>(g)];
    for (Eigen::Index j = 0; j < K; ++j) out += "," + cell(table.to_group(g, j), decimals);
    for (Eigen::Index h = 0; h < G; ++h) out += ",";
    out += "\n";
  }
  return out;
}

std::string edges_csv(const NetworkGraph& g) {
  g.validate();
  std::string out = g.kind == "granger" ? "source,target,pvalue,band\n"
                                        : "source,target,share,band\n";
  for (const auto& e : g.edges) {
    out += e.source + "," + e.target + "," + format_full(e.weight) + "," +
           e.band + "\n";
  }
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_hex_file(const std::string& path) {
  return sha256_hex(read_text_file(path));
}

}  // namespace varnet

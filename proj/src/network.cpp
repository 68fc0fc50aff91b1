#include "varnet/network.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "varnet/csv.hpp"

namespace varnet {

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string format_weight(const std::string& kind, double w) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), kind == "granger" ? "%.3f" : "%.1f", w);
  return buf;
}

}  // namespace

void NetworkGraph::validate() const {
  if (kind != "granger" && kind != "fevd") {
    throw std::invalid_argument("graph kind must be granger or fevd");
  }
  std::set<std::string> known;
  for (const auto& n : nodes) {
    if (n.name.empty()) throw std::invalid_argument("empty node name");
    if (!known.insert(n.name).second) {
      throw std::invalid_argument("duplicate node " + n.name);
    }
  }
  for (const auto& e : edges) {
    if (e.source == e.target) {
      throw std::invalid_argument("self-loop on " + e.source);
    }
    if (!known.count(e.source) || !known.count(e.target)) {
      throw std::invalid_argument("edge endpoint not among nodes");
    }
  }
}

NetworkGraph threshold_network(const ConnectednessTable& table,
                               const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw std::invalid_argument("no thresholds given");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (thresholds[i] <= 0.0 ||
        (i > 0 && thresholds[i] <= thresholds[i - 1])) {
      throw std::invalid_argument("thresholds must be increasing");
    }
  }
  NetworkGraph g;
  g.kind = "fevd";
  for (const auto& name : table.names) {
    g.nodes.push_back({name, table.partition.label_of(name)});
  }
  const Eigen::Index K = table.sgvd.rows();
  const std::size_t nt = thresholds.size();
  for (Eigen::Index i = 0; i < K; ++i) {
    for (Eigen::Index j = 0; j < K; ++j) {
      if (i == j) continue;
      const double w = table.sgvd(i, j);
      if (w < thresholds[0]) continue;
      std::size_t band = 0;
      while (band + 1 < nt && w >= thresholds[band + 1]) ++band;
      std::string label =
          (band + 1 < nt)
              ? format_full(thresholds[band]) + "–" + format_full(thresholds[band + 1])
              : "≥" + format_full(thresholds[band]);
      g.edges.push_back({table.names[static_cast<std::size_t>(j)],
                         table.names[static_cast<std::size_t>(i)], w,
                         std::move(label)});
    }
  }
  g.validate();
  return g;
}

DotStyle default_style(const std::string& kind) {
  DotStyle style;
  style.group_fills = {"lightsteelblue", "navajowhite", "palegreen",
                       "lightpink", "lightgrey", "khaki"};
  if (kind == "granger") {
    style.band_edge_attrs = {{"5%", "color=black"}, {"10%", "color=grey50"}};
  } else {
    style.band_edge_attrs = {{"≥15", "style=bold"},
                             {"5–15", "color=grey50"}};
  }
  return style;
}

std::string to_dot(const NetworkGraph& g, const DotStyle& style) {
  g.validate();

  std::vector<std::string> groups;
  for (const auto& n : g.nodes) groups.push_back(n.group);
  std::sort(groups.begin(), groups.end());
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
  const auto fill_of = [&](const std::string& group) -> std::string {
    if (style.group_fills.empty()) return {};
    const std::size_t idx =
        std::find(groups.begin(), groups.end(), group) - groups.begin();
    return style.group_fills[idx % style.group_fills.size()];
  };

  auto nodes = g.nodes;
  std::sort(nodes.begin(), nodes.end(),
            [](const NetworkNode& a, const NetworkNode& b) { return a.name < b.name; });
  auto edges = g.edges;
  std::sort(edges.begin(), edges.end(),
            [](const NetworkEdge& a, const NetworkEdge& b) {
              return std::tie(a.source, a.target) < std::tie(b.source, b.target);
            });

  std::string out = "digraph G {\n";
  for (const auto& n : nodes) {
    out += "  \"" + dot_escape(n.name) + "\"";
    const std::string fill = fill_of(n.group);
    if (!fill.empty()) {
      out += " [style=filled, fillcolor=" + fill + ", group=\"" +
             dot_escape(n.group) + "\"]";
    }
    out += ";\n";
  }
  for (const auto& e : edges) {
    out += "  \"" + dot_escape(e.source) + "\" -> \"" + dot_escape(e.target) +
           "\" [label=\"" + format_weight(g.kind, e.weight) + "\"";
    const auto it = style.band_edge_attrs.find(e.band);
    if (it != style.band_edge_attrs.end() && !it->second.empty()) {
      out += ", " + it->second;
    }
    out += "];\n";
  }
  out += "}\n";
  return out;
}

std::string to_dot(const NetworkGraph& g) { return to_dot(g, default_style(g.kind)); }

std::string to_json(const NetworkGraph& g) {
  g.validate();
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : g.nodes) {
    j["nodes"].push_back({{"id", n.name}, {"group", n.group}});
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.edges) {
    j["edges"].push_back({{"source", e.source},
                          {"target", e.target},
                          {"weight", e.weight},
                          {"band", e.band}});
  }
  j["kind"] = g.kind;
  return j.dump(2) + "\n";
}

NetworkGraph network_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  NetworkGraph g;
  g.kind = j.at("kind").get<std::string>();
  for (const auto& n : j.at("nodes")) {
    g.nodes.push_back({n.at("id").get<std::string>(), n.at("group").get<std::string>()});
  }
  for (const auto& e : j.at("edges")) {
    g.edges.push_back({e.at("source").get<std::string>(),
                       e.at("target").get<std::string>(),
                       e.at("weight").get<double>(),
                       e.at("band").get<std::string>()});
  }
  g.validate();
  return g;
}

}  // namespace varnet

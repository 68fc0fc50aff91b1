#pragma once

#include <map>
#include <string>
#include <vector>

#include "varnet/fevd.hpp"

namespace varnet {

struct NetworkNode {
  std::string name;
  std::string group;
};

struct NetworkEdge {
  std::string source;
  std::string target;
  double weight = 0.0;  // p-value for granger graphs, percent share for fevd
  std::string band;
};

struct NetworkGraph {
  std::string kind;  // "granger" or "fevd"
  std::vector<NetworkNode> nodes;
  std::vector<NetworkEdge> edges;

  void validate() const;  // endpoints among nodes, no self-loops
};

// Directed edge j -> i for every off-diagonal sgvd(i,j) >= min threshold.
// Band label is the highest threshold met: "5–15" style for interior
// bands, "≥15" for the top band.
NetworkGraph threshold_network(const ConnectednessTable& table,
                               const std::vector<double>& thresholds = {5.0,
                                                                        15.0});

// Visual encoding of band labels and groups for DOT output.
struct DotStyle {
  // band label -> extra edge attributes, e.g. "style=bold"
  std::map<std::string, std::string> band_edge_attrs;
  // fill colors cycled over sorted group labels
  std::vector<std::string> group_fills;
};

DotStyle default_style(const std::string& kind);

// Deterministic DOT digraph: nodes and edges sorted lexicographically,
// weights labeled (%.3f for granger p-values, %.1f for fevd shares).
std::string to_dot(const NetworkGraph& g, const DotStyle& style);
std::string to_dot(const NetworkGraph& g);

// Schema {nodes:[{id,group}], edges:[{source,target,weight,band}], kind},
// element order preserved, weights at full precision.
std::string to_json(const NetworkGraph& g);
NetworkGraph network_from_json(const std::string& text);

}  // namespace varnet

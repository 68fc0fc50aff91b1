#pragma once

#include <string>
#include <vector>

#include "varnet/diagnostics.hpp"
#include "varnet/fevd.hpp"
#include "varnet/granger.hpp"
#include "varnet/network.hpp"

namespace varnet {

// CSV renderers for the run artifacts. decimals < 0 emits full-precision
// values (shortest round-trip); otherwise fixed decimals for display files.

// Columns: Variable, Mean, Std., Min, Median, Max, JB Stat., Mean/Std.,
// ADF Stat.
std::string stats_csv(const std::vector<std::string>& names,
                      const std::vector<SeriesStats>& stats, int decimals = -1);

// Corner cell "Causality From →"; row = target, column = source;
// diagonal and failed cells left blank.
std::string pvalues_csv(const PValueMatrix& pm, int decimals = -1);

// KxK block, then one "From <group>" column per group, then one
// "To <group>" row per group (From cells blank on To rows).
std::string connectedness_csv(const ConnectednessTable& table,
                              int decimals = -1);

// source,target,weight,band with the weight column named after the graph
// kind (pvalue for granger, share for fevd).
std::string edges_csv(const NetworkGraph& g);

std::string sha256_hex(const std::string& bytes);
std::string sha256_hex_file(const std::string& path);

}  // namespace varnet

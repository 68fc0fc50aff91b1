#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "varnet/csv.hpp"
#include "varnet/var.hpp"

namespace varnet {

// Fully resolved settings for one end-to-end run.
struct RunConfig {
  std::vector<std::string> inputs;
  std::string input_kind = "prices";  // prices | returns
  MissingPolicy missing = MissingPolicy::kDropRow;
  std::vector<ColumnSpec> series;  // empty selects every column of every input
  int lag = 0;                     // 0 = select by criterion up to pmax
  Criterion criterion = Criterion::kBic;
  int pmax = 10;
  int horizon = 10;
  std::vector<double> levels = {0.05, 0.10};
  std::vector<double> thresholds = {5.0, 15.0};
  std::string outdir;
  std::uint64_t seed = 0;  // recorded in the manifest; reserved for seeded stages
};

struct ConfigResult {
  RunConfig config;
  std::vector<std::string> errors;  // empty iff the config is usable
};

// Flat key=value file, '#' comments, keys: input (repeatable), input_kind,
// missing (drop|ffill), series (repeatable COL[:NAME]:GROUP), lag (auto|int),
// criterion (aic|bic|hq), pmax, horizon, levels, thresholds, outdir, seed.
// Collects every violation instead of stopping at the first.
ConfigResult validate_config(const std::string& path);

// Loads, aligns and (for prices) differences the configured inputs into one
// return panel. Series specs are routed to the input file carrying the
// column; a spec matching no input or several inputs is an error.
ReturnPanel load_inputs(const RunConfig& config);

// Ingest -> stats -> fit -> granger -> fevd -> network export, writing all
// artifacts into config.outdir. Returns 0 on success or a stage-tagged exit
// code (10 config, 20 ingest, 30 fit, 40 granger, 50 fevd, 60 export) after
// printing "stage: message" to err and removing partial outputs.
int run_pipeline(const RunConfig& config, std::ostream& err);

}  // namespace varnet

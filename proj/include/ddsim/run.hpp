#pragma once

// Executes a parsed run config end to end: builds the experiment spec, runs
// it, and writes `<prefix>.csv`, `<prefix>.svg` (when plotting is enabled
// and the result is plottable) and `<prefix>.meta.json`. The sidecar embeds
// the raw config text and the effective overrides, so a recorded run can be
// re-executed byte-identically from the sidecar alone.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddsim/config.hpp"

namespace ddsim {

struct RunOverrides {
  std::optional<std::uint64_t> seed;  // wins over the config seed
  int threads = 1;
  bool plot = true;  // combined with the config toggle
};

struct RunPaths {
  std::string csv;
  std::string svg;  // empty when no plot was written
  std::string meta;
};

RunPaths execute_run(const RunConfig& config, const RunOverrides& overrides);

// Re-run the job recorded in a provenance sidecar with outputs redirected to
// new_prefix; the regenerated CSV is byte-identical to the original.
RunPaths rerun_from_meta(const std::string& meta_path,
                         const std::string& new_prefix);

// n evenly spaced values from lo to hi inclusive (n == 1 -> {lo})
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace ddsim

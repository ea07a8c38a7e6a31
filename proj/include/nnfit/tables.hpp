#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nnfit/mc.hpp"

namespace nnfit {

struct TableOptions {
  std::size_t reps_critical = 10000;
  std::size_t reps_power = 10000;
  std::uint64_t master_seed = 1;
  // Diff report tolerances: relative for quantiles, percentage points for
  // rejection rates.
  double quantile_tolerance = 0.02;
  double power_tolerance = 3.0;
  // Concentration of the bimodal circle alternative.
  double bmf_kappa = 1.0;
  RunOptions run;
};

// appendix-square, appendix-circle, appendix-sphere, power-square,
// power-square-classical, power-circle, power-circle-classical,
// power-sphere, power-sphere-classical.
std::span<const std::string_view> table_ids();

// Writes <id>.csv for every requested table and diff-report.csv comparing
// each cell with the published value. Returns the written paths; an empty
// request writes nothing. Unknown ids are a ConfigError, I/O failures an
// Error naming the path.
std::vector<std::filesystem::path> reproduce_tables(std::span<const std::string> which,
                                                    const TableOptions& options,
                                                    const std::filesystem::path& outdir);

}  // namespace nnfit

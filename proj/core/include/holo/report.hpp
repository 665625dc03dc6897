#pragma once

// Consolidated tables over a directory of runs.
//
// A run is any directory (the root itself or a direct child) holding a
// config.json. Outputs go to <root>/report/:
//
//   runs.csv        one row per run: task metrics and final loss
//   ablation.csv    runs grouped by variant, mean and sample std of the
//                   headline metric across seeds
//   robustness.csv  one row per (run, axis, level)
//   plot_data.csv   x,y,series triples: loss histories and noise curves
//   report.json     the same content plus the list of incomplete runs
//
// Rows are sorted by run name, so output is byte-identical for unchanged
// inputs.

#include <filesystem>
#include <string>
#include <vector>

namespace holo {

struct ReportResult {
  std::vector<std::string> runs;     // complete runs, sorted
  std::vector<std::string> missing;  // run directories without metrics.json
  std::filesystem::path out_dir;
};

/// "full", "w/o phase decay", "w/o coherent sum", "w/o reconstruction",
/// "magnitude only", or a '+'-joined combination.
std::string variant_label(bool phase_decay, bool coherent_sum, bool reconstruction,
                          bool magnitude_only);

/// Throws DataError if root does not exist or holds no runs at all.
ReportResult cmd_report(const std::filesystem::path& root);

}  // namespace holo

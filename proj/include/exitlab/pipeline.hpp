#pragma once

// End-to-end experiment: landscape -> hypotheses -> QSD -> exit samples per
// temperature -> F against G.

#include "exitlab/agmon.hpp"
#include "exitlab/config.hpp"
#include "exitlab/exitstats.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace exitlab {

/// Boundary windows of the composite domain: the right segment and the left
/// segment {x = -1}, the latter being the target of the figures.
std::vector<BoundaryWindow> composite_windows();

/// Built-in recipes res1, res2, res3 at desk scale. res3 is run once per
/// entry of figure_time_steps("res3"). Throws UnknownName.
RunConfig figure_config(const std::string& name);
std::vector<double> figure_time_steps(const std::string& name);

struct PipelineOptions {
  bool write_events = false;
  std::ostream* log = nullptr;
};

struct PipelineResult {
  HypothesisReport hypotheses;
  Hypo1Report hypo1;
  Hypo2Result hypo2;
  std::vector<double> h_grid;
  std::vector<ExitSummary> summaries;
  std::vector<char> qsd_converged;
  std::optional<FGFit> fit;
  int target_index = 0;  ///< i with z_i in the target window
  bool intercept_discrepancy = false;
};

/// Runs every stage and writes manifest.yaml, inventory.csv, hypotheses.csv,
/// summaries.csv, qsd_h<k>.csv, fg_table.csv and fg_fit.csv into out_dir.
/// Errors are rethrown with the failing stage prefixed to the message.
PipelineResult run_pipeline(const RunConfig& cfg, const std::string& out_dir, const PipelineOptions& options = {});

/// Seed used for the exit samples at grid index k.
std::uint64_t exit_seed(std::uint64_t seed, std::size_t k);

}  // namespace exitlab

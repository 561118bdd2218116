#pragma once

// Run configuration. The on-disk format is a YAML subset: nested maps whose
// leaves are strings, numbers or arrays of numbers.
//
//   potential:  name, params {key: number | [numbers]}
//   domain:     kind (optional; must match the potential's domain)
//   simulation: dt, h, seed, max_steps, n_samples, workers, h_grid, start
//   qsd:        n_particles, n_chains, r_threshold, snapshot_stride, max_time
//   windows:    [{label, s_begin, s_end}, ...]
//   analysis:   target_window
//   output:     dir
//   meta:       written into manifests, ignored when read back
//
// Unknown keys are rejected with their full path.

#include "exitlab/landscape.hpp"
#include "exitlab/langevin.hpp"
#include "exitlab/qsd.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace exitlab {

struct RunConfig {
  std::string potential = "quadratic-disc-caps";
  ParamMap params{{"a", 0.1}};
  std::string domain_kind;  ///< empty: whatever the potential implies

  double dt = 5e-3;
  double h = 0.5;
  std::uint64_t seed = 1;
  std::uint64_t max_steps = 100'000'000;
  std::size_t n_samples = 10000;
  int workers = 1;
  std::vector<double> h_grid{1.0, 0.8, 2.0 / 3.0, 4.0 / 7.0, 0.5, 4.0 / 9.0, 0.4};
  /// "qsd" (Fleming-Viot ensemble) or "x0" (deterministic start at the minimum).
  std::string start = "qsd";

  std::size_t qsd_particles = 10000;
  int qsd_chains = 4;
  double r_threshold = 1.02;
  std::uint64_t snapshot_stride = 20;
  double qsd_max_time = 200.0;

  std::vector<BoundaryWindow> windows;
  std::string target_window;
  std::string output_dir;

  SimConfig sim(double temperature) const;
  QsdConfig qsd(double temperature, std::uint64_t seed_offset = 0) const;
};

/// Throws Error(ConfigError, "<key path>: <reason>").
RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::string& path);

/// Applies "section.key=value" overrides (value parsed as YAML).
void apply_override(RunConfig& cfg, const std::string& assignment);

Landscape build_landscape(const RunConfig& cfg);

/// The fully resolved configuration plus a meta section (version, derived
/// seeds and anything in `meta`). Loading it back gives the same RunConfig.
std::string emit_manifest(const RunConfig& cfg, const std::map<std::string, std::string>& meta = {});

/// Output directory: explicit value, else cfg.output_dir, else
/// $EXITLAB_OUTPUT_DIR, else "exitlab_out".
std::string resolve_output_dir(const RunConfig& cfg, const std::string& explicit_dir = {});

inline constexpr const char* kVersion = "0.1.0";

}  // namespace exitlab

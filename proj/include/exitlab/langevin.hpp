#pragma once

// Euler-Maruyama for dX = -grad f(X) dt + sqrt(h) dB and discrete detection
// of the first exit from the domain.
//
// Exit is declared on the first iterate outside the domain. The exit point is
// where the last step's segment crosses the boundary and the exit time is
// interpolated linearly along that segment. No Brownian-bridge correction is
// applied, so exit times carry an O(sqrt(dt)) bias.

#include "exitlab/landscape.hpp"
#include "exitlab/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace exitlab {

struct SimConfig {
  double dt = 1e-3;
  double h = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 100'000'000;

  /// Throws InvalidParams unless dt > 0, h > 0 and max_steps >= 1.
  void validate() const;
};

/// An arc [s_begin, s_end] of the boundary parametrization. It wraps around
/// when s_begin > s_end. In d = 1 the endpoints have coordinates 0 and 1.
struct BoundaryWindow {
  std::string label;
  double s_begin = 0.0;
  double s_end = 0.0;

  bool contains(double s) const;
};

struct ExitEvent {
  double tau = 0.0;
  Vec x_exit;
  int window = -1;  ///< index into the configured windows, -1 if unlabeled
  std::uint64_t steps = 0;
  bool censored = false;
};

/// x - grad f(x) dt + sqrt(h dt) xi. Accepts h = 0 (noise off).
Vec em_step(const Vec& x, const Landscape& land, const SimConfig& cfg, Stream& rng);

int window_index(const Landscape& land, const std::vector<BoundaryWindow>& windows, const Vec& boundary_point);

/// Throws PreconditionViolated if x0 is outside the domain. When max_steps is
/// reached the event is returned with censored = true and x_exit set to the
/// last position.
ExitEvent simulate_until_exit(const Vec& x0, const Landscape& land, const SimConfig& cfg, Stream& rng,
                              const std::vector<BoundaryWindow>& windows = {});

/// n independent events from x0; sample i uses Stream(cfg.seed, i).
std::vector<ExitEvent> batch_exits(const Vec& x0, const Landscape& land, const SimConfig& cfg, std::size_t n,
                                   const std::vector<BoundaryWindow>& windows = {}, int workers = 1);

/// As above, but sample i first draws its starting point uniformly from the
/// ensemble with its own stream.
std::vector<ExitEvent> batch_exits(const std::vector<Vec>& ensemble, const Landscape& land, const SimConfig& cfg,
                                   std::size_t n, const std::vector<BoundaryWindow>& windows = {},
                                   int workers = 1);

/// Columns sample_id, tau, x_exit_0.., window_label, censored.
void write_events_csv(const std::vector<ExitEvent>& events, const std::vector<BoundaryWindow>& windows, int dimension,
                      std::ostream& out);

struct EventLog {
  std::vector<ExitEvent> events;
  std::vector<std::string> labels;  ///< window labels in order of first appearance
};

EventLog read_events_csv(const std::string& path);

}  // namespace exitlab

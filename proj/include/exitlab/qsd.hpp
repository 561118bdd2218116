#pragma once

// Fleming-Viot sampling of the quasi-stationary distribution and the
// Gelman-Rubin convergence diagnostic used to decide when to stop.

#include "exitlab/langevin.hpp"
#include "exitlab/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace exitlab {

struct FVEnsemble {
  std::vector<Vec> particles;
  std::vector<Stream> streams;  ///< one per particle
  double time = 0.0;
  std::uint64_t branch_count = 0;
  std::uint64_t step_index = 0;
  std::uint64_t seed = 0;
};

/// Particle i gets Stream(seed, i).
FVEnsemble make_ensemble(std::vector<Vec> particles, std::uint64_t seed);

/// Advances every particle by one Euler-Maruyama step. Particles that left
/// the domain are then handled in index order: each jumps onto a survivor
/// chosen uniformly, where exiters already relocated count as survivors. The
/// choices come from a stream keyed by the step index.
void fv_step(FVEnsemble& ens, const Landscape& land, const SimConfig& cfg, int workers = 1);

struct GRDiag {
  double R = 1.0;
  std::size_t n = 0;  ///< retained snapshots per sequence
  std::size_t m = 0;  ///< number of sequences
  double W = 0.0;     ///< mean within-sequence variance
  double B = 0.0;     ///< n times the variance of sequence means
  bool window_too_short = false;
};

/// Potential scale reduction of m equal-length traces:
///   V = (n-1)/n W + B/n,  R = sqrt(V / W).
/// Throws ZeroVariance when every trace is constant.
GRDiag gelman_rubin(const std::vector<std::vector<double>>& chains);

/// Each trace's second half, split into two halves, as 2m sequences.
GRDiag split_gelman_rubin(const std::vector<std::vector<double>>& chains);

struct QsdConfig {
  std::size_t n_particles = 10000;  ///< per chain
  int n_chains = 4;
  double dt = 1e-3;
  double h = 1.0;
  std::uint64_t seed = 0;
  double r_threshold = 1.02;
  std::uint64_t snapshot_stride = 20;
  double max_time = 200.0;
  /// Fewest snapshots before convergence may be declared.
  std::size_t min_snapshots = 20;
  int workers = 1;
};

struct QsdSnapshot {
  std::uint64_t step = 0;
  double time = 0.0;
  std::vector<double> R;  ///< per observable, NaN before enough snapshots
  double R_max = 0.0;
  std::uint64_t branch_count = 0;  ///< summed over chains
};

struct QsdResult {
  std::vector<FVEnsemble> chains;
  std::vector<Vec> pooled;
  std::vector<std::string> observables;
  std::vector<QsdSnapshot> history;
  bool converged = false;
};

/// Runs n_chains independent Fleming-Viot systems from particles drawn
/// uniformly in the domain until the split Gelman-Rubin statistic of every
/// observable (ensemble mean of f and of each coordinate) is below
/// r_threshold, or max_time is reached (converged = false).
QsdResult sample_qsd(const Landscape& land, const QsdConfig& cfg);

/// Uniform draws in the domain by rejection from its bounding box.
std::vector<Vec> uniform_in_domain(const Domain& domain, std::size_t n, std::uint64_t seed);

/// Columns step, time, R_<observable>..., R_max, branch_count.
void write_qsd_diagnostics_csv(const QsdResult& result, std::ostream& out);

}  // namespace exitlab

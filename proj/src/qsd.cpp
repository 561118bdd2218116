#include "exitlab/qsd.hpp"

#include "exitlab/csv.hpp"
#include "exitlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace exitlab {

namespace {

constexpr std::uint64_t kBranchTag = 0x6272616e6368ULL;  // "branch"
constexpr std::uint64_t kInitTag = 0x696e6974ULL;        // "init"

std::uint64_t chain_seed(std::uint64_t seed, int chain) {
  return mix64(seed ^ mix64(static_cast<std::uint64_t>(chain) + 1));
}

}  // namespace

FVEnsemble make_ensemble(std::vector<Vec> particles, std::uint64_t seed) {
  FVEnsemble ens;
  ens.seed = seed;
  ens.streams.reserve(particles.size());
  for (std::size_t i = 0; i < particles.size(); ++i) ens.streams.push_back(Stream::split(seed, i));
  ens.particles = std::move(particles);
  return ens;
}

void fv_step(FVEnsemble& ens, const Landscape& land, const SimConfig& cfg, int workers) {
  const std::size_t n = ens.particles.size();
  if (n < 2) throw Error(ErrorCode::PreconditionViolated, "a Fleming-Viot system needs at least 2 particles");
  const Domain& dom = *land.domain;
  std::vector<char> exited(n, 0);
  parallel_for(n, workers, [&](std::size_t i) {
    Vec next = em_step(ens.particles[i], land, cfg, ens.streams[i]);
    if (dom.contains(next))
      ens.particles[i] = next;
    else
      exited[i] = 1;
  });

  std::vector<std::size_t> survivors;
  survivors.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!exited[i]) survivors.push_back(i);
  if (survivors.size() < n) {
    if (survivors.empty())
      throw Error(ErrorCode::AllParticlesExited, "every particle left the domain in one step; check dt and h");
    Stream branch = Stream(ens.seed, ens.step_index).derive(kBranchTag);
    for (std::size_t i = 0; i < n; ++i) {
      if (!exited[i]) continue;
      const std::size_t j = survivors[branch.uniform_index(survivors.size())];
      ens.particles[i] = ens.particles[j];
      survivors.push_back(i);
      ++ens.branch_count;
    }
  }
  ++ens.step_index;
  ens.time = static_cast<double>(ens.step_index) * cfg.dt;
}

namespace {

double mean(const std::vector<double>& v, std::size_t b, std::size_t e) {
  double s = 0.0;
  for (std::size_t k = b; k < e; ++k) s += v[k];
  return s / static_cast<double>(e - b);
}

GRDiag gelman_rubin_ranges(const std::vector<std::vector<double>>& traces,
                           const std::vector<std::pair<std::size_t, std::size_t>>& ranges) {
  // ranges[k] applies to traces[k]
  const std::size_t m = traces.size();
  if (m < 2) throw Error(ErrorCode::InvalidParams, "Gelman-Rubin needs at least 2 chains");
  const std::size_t n = ranges.front().second - ranges.front().first;
  if (n < 2) throw Error(ErrorCode::InvalidParams, "Gelman-Rubin needs at least 2 snapshots per chain");
  std::vector<double> means(m);
  double w = 0.0;
  for (std::size_t c = 0; c < m; ++c) {
    const auto [b, e] = ranges[c];
    if (e - b != n) throw Error(ErrorCode::InvalidParams, "Gelman-Rubin traces must have equal length");
    means[c] = mean(traces[c], b, e);
    double ss = 0.0;
    for (std::size_t k = b; k < e; ++k) ss += (traces[c][k] - means[c]) * (traces[c][k] - means[c]);
    w += ss / static_cast<double>(n - 1);
  }
  w /= static_cast<double>(m);
  double grand = 0.0;
  for (double mu : means) grand += mu;
  grand /= static_cast<double>(m);
  double between = 0.0;
  for (double mu : means) between += (mu - grand) * (mu - grand);
  between *= static_cast<double>(n) / static_cast<double>(m - 1);

  if (!(w > 0.0)) throw Error(ErrorCode::ZeroVariance, "all traces are constant");
  GRDiag d;
  d.n = n;
  d.m = m;
  d.W = w;
  d.B = between;
  const double nn = static_cast<double>(n);
  const double v = (nn - 1.0) / nn * w + between / nn;
  d.R = std::sqrt(v / w);
  d.window_too_short = d.R < 1.0;
  return d;
}

}  // namespace

GRDiag gelman_rubin(const std::vector<std::vector<double>>& chains) {
  if (chains.empty()) throw Error(ErrorCode::InvalidParams, "Gelman-Rubin needs at least 2 chains");
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (const auto& c : chains) ranges.emplace_back(0, c.size());
  return gelman_rubin_ranges(chains, ranges);
}

GRDiag split_gelman_rubin(const std::vector<std::vector<double>>& chains) {
  std::vector<std::vector<double>> traces;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (const auto& c : chains) {
    const std::size_t len = c.size();
    const std::size_t start = len / 2;
    const std::size_t half = (len - start) / 2;
    // Drop the oldest retained snapshot when the count is odd.
    const std::size_t first = len - 2 * half;
    traces.push_back(c);
    ranges.emplace_back(first, first + half);
    traces.push_back(c);
    ranges.emplace_back(first + half, len);
  }
  return gelman_rubin_ranges(traces, ranges);
}

std::vector<Vec> uniform_in_domain(const Domain& domain, std::size_t n, std::uint64_t seed) {
  const auto [lo, hi] = domain.bounding_box();
  const int d = domain.dimension();
  std::vector<Vec> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Stream rng = Stream(seed, i).derive(kInitTag);
    for (int attempt = 0;; ++attempt) {
      if (attempt > 100000)
        throw Error(ErrorCode::NoConvergence, "rejection sampling found no point inside the domain");
      Vec p(d);
      for (int k = 0; k < d; ++k) p[k] = lo[k] + (hi[k] - lo[k]) * rng.uniform();
      if (domain.contains(p)) {
        out[i] = p;
        break;
      }
    }
  }
  return out;
}

QsdResult sample_qsd(const Landscape& land, const QsdConfig& cfg) {
  if (cfg.n_particles < 2) throw Error(ErrorCode::PreconditionViolated, "n_particles must be at least 2");
  if (cfg.n_chains < 2) throw Error(ErrorCode::InvalidParams, "n_chains must be at least 2");
  if (cfg.snapshot_stride < 1) throw Error(ErrorCode::InvalidParams, "snapshot_stride must be at least 1");
  SimConfig sim{cfg.dt, cfg.h, cfg.seed, 1};
  sim.validate();

  const int d = land.dimension();
  QsdResult result;
  result.observables.push_back("f");
  for (int k = 0; k < d; ++k) result.observables.push_back("x" + std::to_string(k));
  const std::size_t n_obs = result.observables.size();

  for (int c = 0; c < cfg.n_chains; ++c) {
    const std::uint64_t s = chain_seed(cfg.seed, c);
    result.chains.push_back(make_ensemble(uniform_in_domain(*land.domain, cfg.n_particles, s), s));
  }
  // traces[o][c] is the history of observable o in chain c.
  std::vector<std::vector<std::vector<double>>> traces(n_obs,
                                                       std::vector<std::vector<double>>(result.chains.size()));
  auto record = [&] {
    std::vector<double> acc(n_obs);
    for (std::size_t c = 0; c < result.chains.size(); ++c) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (const Vec& p : result.chains[c].particles) {
        acc[0] += land.f(p);
        for (int k = 0; k < d; ++k) acc[static_cast<std::size_t>(k) + 1] += p[k];
      }
      for (std::size_t o = 0; o < n_obs; ++o)
        traces[o][c].push_back(acc[o] / static_cast<double>(result.chains[c].particles.size()));
    }
  };

  const auto max_steps = static_cast<std::uint64_t>(std::ceil(cfg.max_time / cfg.dt));
  std::uint64_t step = 0;
  record();
  while (step < max_steps) {
    for (std::uint64_t k = 0; k < cfg.snapshot_stride && step < max_steps; ++k, ++step)
      for (auto& chain : result.chains) fv_step(chain, land, sim, cfg.workers);
    record();

    QsdSnapshot snap;
    snap.step = step;
    snap.time = static_cast<double>(step) * cfg.dt;
    for (const auto& chain : result.chains) snap.branch_count += chain.branch_count;
    const std::size_t count = traces[0][0].size();
    snap.R.assign(n_obs, std::numeric_limits<double>::quiet_NaN());
    snap.R_max = std::numeric_limits<double>::infinity();
    if (count >= std::max<std::size_t>(cfg.min_snapshots, 8)) {
      double r_max = 0.0;
      for (std::size_t o = 0; o < n_obs; ++o) {
        try {
          snap.R[o] = split_gelman_rubin(traces[o]).R;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::ZeroVariance) throw;
          snap.R[o] = std::numeric_limits<double>::infinity();
        }
        r_max = std::max(r_max, snap.R[o]);
      }
      snap.R_max = r_max;
    }
    result.history.push_back(snap);
    if (snap.R_max < cfg.r_threshold) {
      result.converged = true;
      break;
    }
  }
  for (const auto& chain : result.chains)
    result.pooled.insert(result.pooled.end(), chain.particles.begin(), chain.particles.end());
  return result;
}

void write_qsd_diagnostics_csv(const QsdResult& result, std::ostream& out) {
  CsvWriter csv(out);
  std::vector<std::string> header{"step", "time"};
  for (const auto& o : result.observables) header.push_back("R_" + o);
  header.push_back("R_max");
  header.push_back("branch_count");
  csv.header(header);
  for (const auto& s : result.history) {
    csv.field(static_cast<std::int64_t>(s.step)).field(s.time);
    for (double r : s.R) csv.field(r);
    csv.field(s.R_max).field(static_cast<std::int64_t>(s.branch_count));
    csv.end_row();
  }
}

}  // namespace exitlab

#include "exitlab/langevin.hpp"

#include "exitlab/csv.hpp"
#include "exitlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace exitlab {

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidParams, "dt must be positive");
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidParams, "h must be positive");
  if (max_steps < 1) throw Error(ErrorCode::InvalidParams, "max_steps must be at least 1");
}

bool BoundaryWindow::contains(double s) const {
  if (s_begin <= s_end) return s >= s_begin && s <= s_end;
  return s >= s_begin || s <= s_end;
}

Vec em_step(const Vec& x, const Landscape& land, const SimConfig& cfg, Stream& rng) {
  Vec next = x - cfg.dt * land.grad(x);
  if (cfg.h > 0.0) {
    const double sigma = std::sqrt(cfg.h * cfg.dt);
    for (Eigen::Index k = 0; k < next.size(); ++k) next[k] += sigma * rng.normal();
  }
  return next;
}

int window_index(const Landscape& land, const std::vector<BoundaryWindow>& windows, const Vec& p) {
  if (windows.empty()) return -1;
  const double s = land.domain->boundary_coordinate(p);
  for (std::size_t w = 0; w < windows.size(); ++w)
    if (windows[w].contains(s)) return static_cast<int>(w);
  return -1;
}

ExitEvent simulate_until_exit(const Vec& x0, const Landscape& land, const SimConfig& cfg, Stream& rng,
                              const std::vector<BoundaryWindow>& windows) {
  cfg.validate();
  const Domain& dom = *land.domain;
  if (x0.size() != land.dimension() || !dom.contains(x0))
    throw Error(ErrorCode::PreconditionViolated, "start point is not inside the domain");
  Vec x = x0;
  for (std::uint64_t step = 1; step <= cfg.max_steps; ++step) {
    Vec next = em_step(x, land, cfg, rng);
    if (dom.contains(next)) {
      x = next;
      continue;
    }
    ExitEvent ev;
    ev.x_exit = dom.project_boundary(x, next);
    const double seg = (next - x).norm();
    const double theta = seg > 0.0 ? std::clamp((ev.x_exit - x).norm() / seg, 0.0, 1.0) : 1.0;
    ev.tau = (static_cast<double>(step - 1) + theta) * cfg.dt;
    ev.steps = step;
    ev.window = window_index(land, windows, ev.x_exit);
    return ev;
  }
  ExitEvent ev;
  ev.x_exit = x;
  ev.tau = static_cast<double>(cfg.max_steps) * cfg.dt;
  ev.steps = cfg.max_steps;
  ev.censored = true;
  return ev;
}

std::vector<ExitEvent> batch_exits(const Vec& x0, const Landscape& land, const SimConfig& cfg, std::size_t n,
                                   const std::vector<BoundaryWindow>& windows, int workers) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "n_samples must be at least 1");
  cfg.validate();
  std::vector<ExitEvent> events(n);
  parallel_for(n, workers, [&](std::size_t i) {
    Stream rng = Stream::split(cfg.seed, i);
    events[i] = simulate_until_exit(x0, land, cfg, rng, windows);
  });
  return events;
}

std::vector<ExitEvent> batch_exits(const std::vector<Vec>& ensemble, const Landscape& land, const SimConfig& cfg,
                                   std::size_t n, const std::vector<BoundaryWindow>& windows, int workers) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "n_samples must be at least 1");
  if (ensemble.empty()) throw Error(ErrorCode::InvalidParams, "empty starting ensemble");
  cfg.validate();
  std::vector<ExitEvent> events(n);
  parallel_for(n, workers, [&](std::size_t i) {
    Stream rng = Stream::split(cfg.seed, i);
    const Vec& start = ensemble[rng.uniform_index(ensemble.size())];
    events[i] = simulate_until_exit(start, land, cfg, rng, windows);
  });
  return events;
}

void write_events_csv(const std::vector<ExitEvent>& events, const std::vector<BoundaryWindow>& windows, int dimension,
                      std::ostream& out) {
  CsvWriter csv(out);
  std::vector<std::string> header{"sample_id", "tau"};
  for (int k = 0; k < dimension; ++k) header.push_back("x_exit_" + std::to_string(k));
  header.push_back("window_label");
  header.push_back("censored");
  csv.header(header);
  for (std::size_t i = 0; i < events.size(); ++i) {
    const ExitEvent& ev = events[i];
    csv.field(i).field(ev.tau);
    for (int k = 0; k < dimension; ++k) csv.field(ev.x_exit[k]);
    csv.field(ev.window >= 0 ? windows[static_cast<std::size_t>(ev.window)].label : std::string());
    csv.field(ev.censored ? 1 : 0);
    csv.end_row();
  }
}

EventLog read_events_csv(const std::string& path) {
  const CsvTable table = read_csv_file(path);
  const std::size_t c_tau = table.column("tau");
  const std::size_t c_label = table.column("window_label");
  const std::size_t c_cens = table.column("censored");
  std::vector<std::size_t> c_x;
  for (int k = 0;; ++k) {
    const std::string name = "x_exit_" + std::to_string(k);
    auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) break;
    c_x.push_back(static_cast<std::size_t>(it - table.header.begin()));
  }
  EventLog log;
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw Error(ErrorCode::IoError, "ragged row in '" + path + "'");
    ExitEvent ev;
    ev.tau = parse_number(row[c_tau]);
    ev.x_exit = Vec(static_cast<Eigen::Index>(c_x.size()));
    for (std::size_t k = 0; k < c_x.size(); ++k) ev.x_exit[static_cast<Eigen::Index>(k)] = parse_number(row[c_x[k]]);
    ev.censored = parse_number(row[c_cens]) != 0.0;
    const std::string& label = row[c_label];
    if (!label.empty()) {
      auto it = std::find(log.labels.begin(), log.labels.end(), label);
      if (it == log.labels.end()) {
        log.labels.push_back(label);
        it = log.labels.end() - 1;
      }
      ev.window = static_cast<int>(it - log.labels.begin());
    }
    log.events.push_back(std::move(ev));
  }
  return log;
}

}  // namespace exitlab

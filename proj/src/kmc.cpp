#include "exitlab/kmc.hpp"

#include "exitlab/csv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace exitlab {

RateTable::RateTable(std::vector<std::string> states) : states_(std::move(states)), rows_(states_.size()) {}

int RateTable::add_state(std::string label) {
  states_.push_back(std::move(label));
  rows_.emplace_back();
  return static_cast<int>(states_.size()) - 1;
}

void RateTable::check_state(int i) const {
  if (i < 0 || static_cast<std::size_t>(i) >= states_.size())
    throw Error(ErrorCode::InvalidParams, "unknown state " + std::to_string(i));
}

void RateTable::set_rate(int from, int to, double k, std::string provenance) {
  check_state(from);
  check_state(to);
  if (from == to) throw Error(ErrorCode::InvalidParams, "self-rates are not allowed");
  if (!(k >= 0.0) || !std::isfinite(k)) throw Error(ErrorCode::InvalidParams, "rates must be finite and >= 0");
  auto& row = rows_[static_cast<std::size_t>(from)];
  for (auto& e : row)
    if (e.to == to) {
      e.k = k;
      e.provenance = std::move(provenance);
      return;
    }
  row.push_back({to, k, std::move(provenance)});
}

const std::string& RateTable::label(int i) const {
  check_state(i);
  return states_[static_cast<std::size_t>(i)];
}

int RateTable::index_of(const std::string& label) const {
  auto it = std::find(states_.begin(), states_.end(), label);
  if (it == states_.end()) throw Error(ErrorCode::InvalidParams, "unknown state '" + label + "'");
  return static_cast<int>(it - states_.begin());
}

const std::vector<RateEntry>& RateTable::out(int i) const {
  check_state(i);
  return rows_[static_cast<std::size_t>(i)];
}

double RateTable::outflow(int i) const {
  double total = 0.0;
  for (const auto& e : out(i)) total += e.k;
  return total;
}

double residence_time(const RateTable& table, int i, Stream& rng) {
  const double total = table.outflow(i);
  if (!(total > 0.0)) throw Error(ErrorCode::AbsorbingState, "state '" + table.label(i) + "' has no outflow");
  return -std::log(rng.uniform()) / total;
}

int next_state(const RateTable& table, int i, Stream& rng) {
  const double total = table.outflow(i);
  if (!(total > 0.0)) throw Error(ErrorCode::AbsorbingState, "state '" + table.label(i) + "' has no outflow");
  const double target = rng.uniform() * total;
  double acc = 0.0;
  const RateEntry* last = nullptr;
  for (const auto& e : table.out(i)) {
    if (e.k <= 0.0) continue;
    acc += e.k;
    last = &e;
    if (target < acc) return e.to;
  }
  return last->to;
}

int KmcTrajectory::state_at(double t) const {
  if (states.empty()) throw Error(ErrorCode::InvalidParams, "empty trajectory");
  auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto n = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - times.begin() - 1, 0));
  return states[n];
}

KmcTrajectory run(const RateTable& table, int start, double t_end, std::uint64_t seed, std::uint64_t index) {
  if (start < 0 || static_cast<std::size_t>(start) >= table.size())
    throw Error(ErrorCode::InvalidParams, "start state out of range");
  KmcTrajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(start);
  traj.final_time = t_end;
  const Stream base(seed, index);
  double t = 0.0;
  int state = start;
  for (std::uint64_t n = 0;; ++n) {
    if (!(table.outflow(state) > 0.0)) break;
    Stream time_rng = base.derive(2 * n);
    Stream jump_rng = base.derive(2 * n + 1);
    const double dt = residence_time(table, state, time_rng);
    if (t + dt > t_end) break;
    t += dt;
    state = next_state(table, state, jump_rng);
    traj.times.push_back(t);
    traj.states.push_back(state);
  }
  return traj;
}

RateTable table_from_landscape(const TheoryContext& ctx, const std::vector<std::string>& neighbor_labels,
                               const std::vector<double>& return_rates) {
  if (neighbor_labels.size() > ctx.inventory.n())
    throw Error(ErrorCode::InvalidParams, "more neighbours than boundary minima");
  if (return_rates.size() > neighbor_labels.size())
    throw Error(ErrorCode::InvalidParams, "more return rates than neighbours");
  RateTable table({"0"});
  for (std::size_t i = 0; i < neighbor_labels.size(); ++i) {
    const int j = table.add_state(neighbor_labels[i]);
    table.set_rate(0, j, rate(ctx, static_cast<int>(i) + 1), "theory");
    if (i < return_rates.size()) table.set_rate(j, 0, return_rates[i], "empirical");
  }
  return table;
}

void write_rate_table_csv(const RateTable& table, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"i", "j", "k", "provenance"});
  for (std::size_t i = 0; i < table.size(); ++i)
    for (const auto& e : table.out(static_cast<int>(i))) {
      csv.field(table.label(static_cast<int>(i))).field(table.label(e.to)).field(e.k).field(e.provenance);
      csv.end_row();
    }
}

void write_trajectory_csv(const KmcTrajectory& traj, const RateTable& table, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"t", "state"});
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    csv.field(traj.times[n]).field(table.label(traj.states[n]));
    csv.end_row();
  }
}

}  // namespace exitlab

#pragma once

// Kinetic Monte Carlo: a continuous-time jump process given by a table of
// rates k_{i,j}. Residence times are exponential with the total outflow as
// parameter and the next state is drawn independently with probability
// proportional to the rate.

#include "exitlab/kramers.hpp"
#include "exitlab/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace exitlab {

struct RateEntry {
  int to = 0;
  double k = 0.0;
  std::string provenance;  ///< "theory" or "empirical"
};

class RateTable {
 public:
  explicit RateTable(std::vector<std::string> states = {});

  int add_state(std::string label);
  /// Throws InvalidParams for self-rates, negative rates or unknown states.
  void set_rate(int from, int to, double k, std::string provenance);

  std::size_t size() const { return states_.size(); }
  const std::string& label(int i) const;
  int index_of(const std::string& label) const;
  const std::vector<RateEntry>& out(int i) const;
  double outflow(int i) const;

 private:
  void check_state(int i) const;
  std::vector<std::string> states_;
  std::vector<std::vector<RateEntry>> rows_;
};

/// Exp(outflow(i)) by inverse CDF. Throws AbsorbingState.
double residence_time(const RateTable& table, int i, Stream& rng);

/// j with probability k_{i,j} / outflow(i). Throws AbsorbingState.
int next_state(const RateTable& table, int i, Stream& rng);

/// Jump times T_0 = 0 < T_1 < ... and states Y_0, Y_1, ...; Z_t = Y_n for
/// T_n <= t < T_{n+1}.
struct KmcTrajectory {
  std::vector<double> times;
  std::vector<int> states;
  double final_time = 0.0;

  int state_at(double t) const;
  std::size_t jumps() const { return states.empty() ? 0 : states.size() - 1; }
};

/// Jump n draws its residence time from Stream(seed, index).derive(2n) and its
/// target from derive(2n + 1). Stops at the first jump that would pass t_end
/// or at an absorbing state; final_time is t_end.
KmcTrajectory run(const RateTable& table, int start, double t_end, std::uint64_t seed, std::uint64_t index = 0);

/// State 0 is the well; state i is the neighbour reached through z_i. Rates
/// k_{0,i} come from the Eyring-Kramers formula. Neighbours are absorbing
/// unless return_rates[i-1] is given. An empty neighbour list gives a single
/// absorbing state.
RateTable table_from_landscape(const TheoryContext& ctx, const std::vector<std::string>& neighbor_labels,
                               const std::vector<double>& return_rates = {});

/// Columns i, j, k, provenance.
void write_rate_table_csv(const RateTable& table, std::ostream& out);
/// Columns t, state.
void write_trajectory_csv(const KmcTrajectory& traj, const RateTable& table, std::ostream& out);

}  // namespace exitlab

#include "doctest.h"

#include "exitlab/kmc.hpp"

#include <cmath>

using namespace exitlab;

TEST_CASE("rate table from the caps landscape") {
  const Landscape land = make_builtin_landscape("quadratic-disc-caps", ParamMap{{"a", 0.1}});
  const TheoryContext ctx(find_boundary_minima(land), 0.5);
  const RateTable t = table_from_landscape(ctx, {"S1", "S2"});
  REQUIRE(t.size() == 3);
  CHECK(t.outflow(0) == doctest::Approx(rate(ctx, 1) + rate(ctx, 2)));
  const double r = 2.1 / 1.9 * std::exp(-0.8);
  CHECK(t.out(0)[1].k / t.outflow(0) == doctest::Approx(r / (1 + r)).epsilon(1e-12));
  CHECK(t.out(0)[1].provenance == "theory");
  CHECK(t.outflow(1) == 0.0);
}

TEST_CASE("table validation") {
  RateTable t({"A", "B"});
  CHECK_THROWS_AS(t.set_rate(0, 0, 1.0, "theory"), Error);
  CHECK_THROWS_AS(t.set_rate(0, 1, -1.0, "theory"), Error);
  CHECK_THROWS_AS(t.set_rate(0, 5, 1.0, "theory"), Error);
  Stream s(1, 0);
  CHECK_THROWS_AS(residence_time(t, 0, s), Error);
}

TEST_CASE("two-state occupation") {
  const double a = 2.0, b = 0.5;
  RateTable t({"A", "B"});
  t.set_rate(0, 1, a, "theory");
  t.set_rate(1, 0, b, "theory");
  const double t_end = 20000.0;
  const KmcTrajectory traj = run(t, 0, t_end, 12);
  CHECK(traj.final_time == t_end);
  double in_a = 0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double next = k + 1 < traj.times.size() ? traj.times[k + 1] : t_end;
    if (traj.states[k] == 0) in_a += next - traj.times[k];
  }
  const double frac = in_a / t_end;
  // Each cycle lasts 1/a + 1/b = 2.5 on average, so there are ~8000 cycles.
  const double cycles = t_end / (1 / a + 1 / b);
  CHECK(std::abs(frac - b / (a + b)) < 3.0 * 0.5 / std::sqrt(cycles));
  CHECK(traj.state_at(0.0) == 0);

  const KmcTrajectory again = run(t, 0, t_end, 12);
  CHECK(again.times == traj.times);
}

TEST_CASE("absorbing start") {
  RateTable t({"A"});
  const KmcTrajectory traj = run(t, 0, 10.0, 1);
  CHECK(traj.jumps() == 0);
  CHECK(traj.state_at(5.0) == 0);
}

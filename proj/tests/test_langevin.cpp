#include "doctest.h"

#include "exitlab/langevin.hpp"
#include "exitlab/oracle1d.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace exitlab;

namespace {

Landscape parabola() {
  ParamMap p;
  p.set("coeffs", std::vector<double>{0, 0, 1});
  p.set("z1", -1.0);
  p.set("z2", 2.0);
  return make_builtin_landscape("interval-1d", p);
}

}  // namespace

TEST_CASE("noise-free step is gradient descent") {
  const Landscape land = make_builtin_landscape("quadratic-disc-caps", ParamMap{{"a", 0.1}});
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.h = 0.0;
  Stream s(1, 0);
  const Vec x = em_step(vec2(0.5, 0.5), land, cfg, s);
  CHECK((x - vec2(0.5 - 0.01 * 0.9, 0.5 - 0.01 * 1.0)).norm() < 1e-15);
}

TEST_CASE("config validation") {
  SimConfig cfg;
  cfg.dt = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.dt = 1e-3;
  cfg.h = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("windows") {
  BoundaryWindow w{"wrap", 5.0, 1.0};
  CHECK(w.contains(5.5));
  CHECK(w.contains(0.5));
  CHECK_FALSE(w.contains(3.0));
  const Landscape line = parabola();
  const std::vector<BoundaryWindow> ends{{"left", 0.0, 0.0}, {"right", 1.0, 1.0}};
  CHECK(window_index(line, ends, vec1(2.0)) == 1);
  CHECK(window_index(line, ends, vec1(-1.0)) == 0);
}

TEST_CASE("1-D exit side matches the quadrature oracle") {
  const Landscape land = parabola();
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.h = 1.0;
  cfg.seed = 11;
  const std::size_t n = 20000;
  const auto events = batch_exits(vec1(0.0), land, cfg, n, {{"left", 0, 0}, {"right", 1, 1}}, 2);
  double right = 0;
  for (const auto& e : events) {
    CHECK_FALSE(e.censored);
    CHECK(e.tau > 0.0);
    right += e.window == 1;
  }
  const double p = right / n;
  const double w = exact_exit_prob(Interval1D::from_polynomial({0, 0, 1}, -1, 2), 0.0, 1.0);
  // Three binomial sigma plus the discrete-exit bias at this step size.
  CHECK(std::abs(p - w) < 3 * std::sqrt(w * (1 - w) / n) + 0.1 * w);
}

TEST_CASE("exits are independent of the worker count and stream order") {
  const Landscape land = make_builtin_landscape("quadratic-disc-caps", ParamMap{{"a", 0.1}});
  SimConfig cfg;
  cfg.dt = 5e-3;
  cfg.h = 1.0;
  cfg.seed = 5;
  const auto a = batch_exits(vec2(0.05, 0), land, cfg, 64, {}, 1);
  const auto b = batch_exits(vec2(0.05, 0), land, cfg, 64, {}, 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].tau == b[i].tau);
    CHECK(a[i].x_exit == b[i].x_exit);
  }
  Stream s(5, 17);
  const ExitEvent e = simulate_until_exit(vec2(0.05, 0), land, cfg, s);
  CHECK(e.tau == a[17].tau);
  CHECK(std::abs(land.domain->boundary_distance(a[3].x_exit)) < 1e-9);
}

TEST_CASE("censoring and bad starts") {
  const Landscape land = make_builtin_landscape("quadratic-disc-caps", ParamMap{{"a", 0.1}});
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.h = 0.1;
  cfg.max_steps = 10;
  Stream s(1, 0);
  const ExitEvent e = simulate_until_exit(vec2(0.05, 0), land, cfg, s);
  CHECK(e.censored);
  CHECK(e.steps == 10);
  CHECK_THROWS_AS(simulate_until_exit(vec2(5, 0), land, cfg, s), Error);
}

TEST_CASE("events csv round trip") {
  const Landscape land = make_builtin_landscape("quadratic-disc-caps", ParamMap{{"a", 0.1}});
  SimConfig cfg;
  cfg.dt = 5e-3;
  cfg.h = 1.0;
  cfg.seed = 3;
  const std::vector<BoundaryWindow> windows{{"Sigma1", 0, 2}};
  const auto events = batch_exits(vec2(0.05, 0), land, cfg, 20, windows);
  const auto path = std::filesystem::temp_directory_path() / "exitlab_events_test.csv";
  {
    std::ofstream out(path);
    write_events_csv(events, windows, 2, out);
  }
  const EventLog log = read_events_csv(path.string());
  REQUIRE(log.events.size() == events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    CHECK(log.events[i].tau == events[i].tau);
    CHECK(log.events[i].x_exit == events[i].x_exit);
  }
  std::filesystem::remove(path);
}

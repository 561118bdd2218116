#include "doctest.h"

#include "exitlab/agmon.hpp"

#include <cmath>

using namespace exitlab;

namespace {

Landscape caps(double a = 0.1) { return make_builtin_landscape("quadratic-disc-caps", ParamMap{{"a", a}}); }

Landscape parabola() {
  ParamMap p;
  p.set("coeffs", std::vector<double>{0, 0, 1});
  p.set("z1", -1.0);
  p.set("z2", 2.0);
  return make_builtin_landscape("interval-1d", p);
}

}  // namespace

TEST_CASE("path length of simple paths") {
  const Landscape line = parabola();
  CHECK(path_length({vec1(0.2), vec1(1.5)}, line) == doctest::Approx(1.5 * 1.5 - 0.04).epsilon(1e-10));
  CHECK(path_length({vec1(-1), vec1(2)}, line) == doctest::Approx(5.0).epsilon(1e-10));

  const Landscape land = caps();
  CHECK(path_length({vec2(0.05, 0), vec2(0.5, 0)}, land) == doctest::Approx(0.2025).epsilon(1e-9));
  // Along the segment x = 1 only the tangential gradient counts.
  CHECK(path_length({vec2(1, -0.5), vec2(1, 0.5)}, land) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_THROWS_AS(path_length({vec2(0, 0), vec2(3, 0)}, land), Error);
}

TEST_CASE("1-D distance is the total variation of f") {
  const DistanceBound b = distance_upper(parabola(), vec1(-1), vec1(2), 0.01);
  CHECK(b.upper == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(b.lower == doctest::Approx(3.0));
}

TEST_CASE("near-minimum identity") {
  const Landscape land = caps();
  const DistanceBound b = distance_upper(land, vec2(0.05, 0), vec2(0.3, 0), 0.01);
  CHECK(b.upper == doctest::Approx(0.0625).epsilon(0.02));
  CHECK(b.lower == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(b.upper >= b.lower - 1e-12);
}

TEST_CASE("mesh basics") {
  const Landscape land = caps();
  AgmonMesh mesh(land, 0.05);
  CHECK(mesh.size() > 1000);
  CHECK(mesh.edge_count() > mesh.size());
  CHECK(mesh.chain_nodes().size() == mesh.chain_s().size());
  for (std::size_t k = 0; k < mesh.size(); k += 97) {
    const Vec& p = mesh.node(static_cast<int>(k));
    CHECK((land.domain->contains(p) || std::abs(land.domain->boundary_distance(p)) < 1e-9));
    CHECK(mesh.g(static_cast<int>(k)) <= mesh.max_g() + 1e-12);
  }
  const auto d = distances_from(mesh, {{mesh.nearest_node(vec2(0.05, 0)), 0.0}});
  for (double v : d) CHECK(std::isfinite(v));
}

TEST_CASE("annulus bound") {
  const Landscape land = caps();
  const Vec z2 = vec2(-1, 0);
  std::vector<Vec> B;
  for (int k = 0; k <= 40; ++k) B.push_back(vec2(1, -1 + 0.05 * k));
  const AnnulusBound b = lower_bound_annulus(land, z2, 1.0 / 3.0, 2.0 / 3.0, B);
  CHECK(b.value == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
  CHECK(b.alpha == doctest::Approx(1.0 / 3.0));
  CHECK(b.convex);

  CHECK_THROWS_AS(lower_bound_annulus(land, z2, 1.0 / 3.0, 2.0 / 3.0, {vec2(-0.9, 0)}), Error);
  CHECK_THROWS_AS(lower_bound_annulus(land, z2, 0.5, 0.4, B), Error);
}

TEST_CASE("hypo1 and hypo2") {
  const Landscape land = caps();
  const CriticalInventory inv = find_boundary_minima(land);
  const Hypo1Report r = check_hypo1(land, inv, Hypo1Method::automatic);
  CHECK(r.overall() == Verdict::pass);

  const Landscape high = caps(0.11);
  const CriticalInventory inv_high = find_boundary_minima(high);
  const Hypo1Report ann = check_hypo1(high, inv_high, Hypo1Method::annulus);
  CHECK(ann.overall() != Verdict::pass);

  const Hypo2Result h2 = check_hypo2(inv);
  CHECK(h2.margin == doctest::Approx(0.7025));
  CHECK(h2.pass);

  CHECK(parse_hypo1_method("annulus") == Hypo1Method::annulus);
  CHECK_THROWS_AS(parse_hypo1_method("bogus"), Error);
}

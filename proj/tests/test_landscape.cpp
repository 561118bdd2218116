#include "doctest.h"

#include "exitlab/landscape.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace exitlab;

namespace {

Landscape caps(double a = 0.1) { return make_builtin_landscape("quadratic-disc-caps", ParamMap{{"a", a}}); }

void check_gradient(const Potential& p, const Vec& x) {
  const double eps = 1e-6;
  const Vec g = p.gradient(x);
  const Mat H = p.hessian(x);
  for (int k = 0; k < x.size(); ++k) {
    Vec xp = x, xm = x;
    xp[k] += eps;
    xm[k] -= eps;
    CHECK(g[k] == doctest::Approx((p.value(xp) - p.value(xm)) / (2 * eps)).epsilon(1e-6).scale(1.0));
    const Vec dg = (p.gradient(xp) - p.gradient(xm)) / (2 * eps);
    for (int j = 0; j < x.size(); ++j) CHECK(H(j, k) == doctest::Approx(dg[j]).epsilon(1e-5).scale(1.0));
  }
}

}  // namespace

TEST_CASE("gradients and Hessians agree with finite differences") {
  QuadraticCapsPotential q(0.1);
  CornichePotential c(0.05);
  Polynomial1DPotential p({0.3, -1.0, 0.5, 0.25});
  for (const Vec& x : {vec2(0.3, -0.2), vec2(-0.8, 1.1), vec2(0.9, 0.05)}) {
    check_gradient(q, x);
    check_gradient(c, x);
  }
  check_gradient(p, vec1(0.7));
  check_gradient(p, vec1(-1.3));
}

TEST_CASE("corniche profile coefficients") {
  CornichePotential c(0.05);
  CHECK(c.quadratic_coefficient() == doctest::Approx(-0.3981).epsilon(1e-4));
  CHECK(c.linear_coefficient() == doctest::Approx(0.1481).epsilon(1e-3));
  CHECK(std::abs(c.profile(-0.95)) < 1e-14);
  CHECK(c.profile(1.0) == doctest::Approx(0.25));
}

TEST_CASE("composite domain geometry") {
  PaperCompositeDomain d;
  CHECK(d.boundary_length() == doctest::Approx(4 + 2 * std::numbers::pi));
  CHECK(d.contains(vec2(0, 0)));
  CHECK(d.contains(vec2(0, 1.9)));
  CHECK_FALSE(d.contains(vec2(0.9, 1.9)));
  CHECK_FALSE(d.contains(vec2(1.01, 0)));
  const auto z1 = d.boundary_frame(1.0);
  CHECK((z1.point - vec2(1, 0)).norm() < 1e-12);
  CHECK((z1.normal - vec2(1, 0)).norm() < 1e-12);
  const auto z2 = d.boundary_frame(3 + std::numbers::pi);
  CHECK((z2.point - vec2(-1, 0)).norm() < 1e-12);
  CHECK(d.boundary_coordinate(vec2(-1, 0)) == doctest::Approx(3 + std::numbers::pi));
  CHECK(d.boundary_distance(vec2(0.5, 0)) == doctest::Approx(-0.5));
  const auto arc = d.boundary_frame(2 + std::numbers::pi / 2);
  CHECK((arc.point - vec2(0, 2)).norm() < 1e-12);
  CHECK(std::abs(arc.curvature) == doctest::Approx(1.0));
}

TEST_CASE("quadratic-disc-caps critical inventory") {
  const Landscape land = caps();
  const auto x0 = find_interior_minimum(land, default_seeds(*land.domain));
  CHECK((x0.x - vec2(0.05, 0)).norm() < 1e-10);
  CHECK(x0.det_hess == doctest::Approx(4.0));
  CHECK(x0.f == doctest::Approx(-0.0025));

  const CriticalInventory inv = find_boundary_minima(land);
  REQUIRE(inv.n() == 2);
  CHECK(inv.n0 == 1);
  CHECK((inv.z(1).z - vec2(1, 0)).norm() < 1e-8);
  CHECK(inv.z(1).dn_f == doctest::Approx(1.9));
  CHECK(inv.z(1).det_hess_boundary == doctest::Approx(2.0).epsilon(1e-6));
  CHECK((inv.z(2).z - vec2(-1, 0)).norm() < 1e-8);
  CHECK(inv.z(2).dn_f == doctest::Approx(2.1));
  CHECK(inv.z(2).det_hess_boundary == doctest::Approx(2.0).epsilon(1e-6));

  CHECK(basin_label(land, inv, vec2(1, 0.5)) == 1);
  CHECK(basin_label(land, inv, vec2(-1, -0.5)) == 2);
  CHECK(normal_derivative(land, vec2(1, 0.5)) == doctest::Approx(1.9));
  CHECK(tangential_gradient(land, vec2(1, 0.5)).norm() == doctest::Approx(1.0));
}

TEST_CASE("hypothesis checks") {
  const auto rep = check_hypotheses(caps());
  CHECK(rep.all_pass());
  std::ostringstream out;
  write_inventory_csv(*rep.inventory, out);
  CHECK(out.str().rfind("i,z_x,z_y,f_z,dn_f,det_hess_boundary,basin_id", 0) == 0);

  const auto corn = check_hypotheses(make_builtin_landscape("corniche", ParamMap{{"delta", 0.05}}));
  CHECK_FALSE(corn.entry("H1").pass);
}

TEST_CASE("invalid builtin parameters") {
  CHECK_THROWS_AS(caps(0.2), Error);
  CHECK_THROWS_AS(make_builtin_landscape("nope", {}), Error);
  try {
    caps(-1);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidParams);
  }
}

TEST_CASE("interval landscape") {
  ParamMap p;
  p.set("coeffs", std::vector<double>{0, 0, 1});
  p.set("z1", -1.0);
  p.set("z2", 2.0);
  const Landscape land = make_builtin_landscape("interval-1d", p);
  const CriticalInventory inv = find_boundary_minima(land);
  REQUIRE(inv.n() == 2);
  CHECK(inv.z(1).z[0] == doctest::Approx(-1.0));
  CHECK(inv.z(1).dn_f == doctest::Approx(2.0));
  CHECK(inv.z(2).dn_f == doctest::Approx(4.0));
  CHECK(std::abs(inv.x0[0]) < 1e-10);
}

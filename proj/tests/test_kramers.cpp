#include "doctest.h"

#include "exitlab/kramers.hpp"

#include <cmath>
#include <numbers>

using namespace exitlab;

namespace {

TheoryContext ctx_at(double h, double a = 0.1) {
  return TheoryContext(find_boundary_minima(make_builtin_landscape("quadratic-disc-caps", ParamMap{{"a", a}})), h);
}

}  // namespace

TEST_CASE("rates on the caps landscape") {
  const TheoryContext ctx = ctx_at(0.5);
  const double expected = 1.9 * 2.0 / std::sqrt(2.0) / std::sqrt(std::numbers::pi * 0.5) * std::exp(-2 * 0.9025 / 0.5);
  CHECK(rate(ctx, 1) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(rate(ctx, 1) == doctest::Approx(0.0579970).epsilon(1e-6));
  CHECK(barrier(ctx, 1) == doctest::Approx(0.9025));
  for (double h : {0.3, 0.5, 1.0}) {
    const TheoryContext c = ctx_at(h);
    CHECK(rate(c, 2) / rate(c, 1) == doctest::Approx(2.1 / 1.9 * std::exp(-0.4 / h)).epsilon(1e-12));
  }
  CHECK(1.0 / principal_eigenvalue(ctx) == doctest::Approx(17.2423).epsilon(1e-5));
  CHECK_THROWS_AS(TheoryContext(ctx.inventory, 0.0), Error);
}

TEST_CASE("exit probabilities") {
  for (double h : {0.2, 0.5, 1.0}) {
    const TheoryContext ctx = ctx_at(h);
    const double lambda = principal_eigenvalue(ctx);
    CHECK(exit_probability(ctx, 1) * lambda == doctest::Approx(rate(ctx, 1)).epsilon(1e-12));
    const double r = 2.1 / 1.9 * std::exp(-0.4 / h);
    CHECK(exit_probability(ctx, 2) / exit_probability(ctx, 1) == doctest::Approx(r).epsilon(1e-12));
  }
}

TEST_CASE("theory line") {
  const AffineG g = theory_curve_G(ctx_at(1.0).inventory, 2);
  CHECK(g.intercept == doctest::Approx(std::log(2.1 / 1.9)).epsilon(1e-10));
  CHECK(g.slope == doctest::Approx(-0.2).epsilon(1e-10));
}

TEST_CASE("approximate exit density") {
  const Landscape land = make_builtin_landscape("quadratic-disc-caps", ParamMap{{"a", 0.1}});
  const TheoryContext ctx(find_boundary_minima(land), 0.5);
  const double ratio = approx_exit_density(ctx, land, vec2(-1, 0)) / approx_exit_density(ctx, land, vec2(1, 0));
  CHECK(ratio == doctest::Approx(2.1 / 1.9 * std::exp(-0.4 / 0.5)).epsilon(1e-12));

  const double L = land.domain->boundary_length();
  const int n = 20000;
  double total = 0;
  for (int k = 0; k < n; ++k)
    total += approx_exit_density(ctx, land, land.domain->boundary_frame(L * (k + 0.5) / n).point);
  CHECK(total * L / n == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("generic window scales like sqrt(h) against the saddle") {
  const Landscape land = make_builtin_landscape("quadratic-disc-caps", ParamMap{{"a", 0.1}});
  const CriticalInventory inv = find_boundary_minima(land);
  // On x = 1, f = 0.9 + y^2, so f(1, y*) = f(z2) at y* = sqrt(0.2).
  const double ystar = std::sqrt(0.2);
  const WindowSpec w = make_generic_window(land, inv, 1.0 + ystar, 1.0 + ystar + 0.3, "upper");
  CHECK(w.f_star == doctest::Approx(1.1).epsilon(1e-9));
  WindowSpec saddle;
  saddle.kind = WindowKind::saddle;
  saddle.saddle_index = 2;
  const double r1 = exit_probability_window(TheoryContext(inv, 0.4), w) /
                    exit_probability_window(TheoryContext(inv, 0.4), saddle);
  const double r2 = exit_probability_window(TheoryContext(inv, 0.1), w) /
                    exit_probability_window(TheoryContext(inv, 0.1), saddle);
  CHECK(r1 / r2 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(make_generic_window(land, inv, 0.5, 1.5), Error);
}

TEST_CASE("uh mass") {
  const TheoryContext ctx = ctx_at(0.5);
  const double expected =
      std::sqrt(std::numbers::pi) * std::pow(4.0, -0.25) * std::sqrt(0.5) * std::exp(0.0025 / 0.5);
  CHECK(uh_mass(ctx) == doctest::Approx(expected).epsilon(1e-12));
}

#include "doctest.h"

#include "exitlab/oracle1d.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>

using namespace exitlab;

TEST_CASE("exact probability against an independent quadrature") {
  const Interval1D iv = Interval1D::from_polynomial({0, 0, 1}, -1, 2);
  const double h = 0.4;
  boost::math::quadrature::tanh_sinh<double> ts;
  auto w = [&](double t) { return std::exp(2.0 * (t * t - 4.0) / h); };
  const double left = ts.integrate(w, -1.0, 0.0);
  const double total = left + ts.integrate(w, 0.0, 2.0);
  CHECK(exact_exit_prob(iv, 0.0, h) == doctest::Approx(left / total).epsilon(1e-8));
  CHECK(exact_exit_prob(iv, -1.0, h) == 0.0);
  CHECK(exact_exit_prob(iv, 2.0, h) == 1.0);
}

TEST_CASE("laplace regimes") {
  const Interval1D iv = Interval1D::from_polynomial({0, 0, 1}, -1, 2);
  const LaplaceResult below = laplace_asymptotic(iv, 0.0, 0.5);
  CHECK(below.regime == LaplaceRegime::below);
  CHECK(below.value == doctest::Approx(2.0 * std::exp(-6.0 / 0.5)));
  CHECK(laplace_asymptotic(iv, 1.0, 0.5).regime == LaplaceRegime::equal);
  CHECK(laplace_asymptotic(iv, 1.5, 0.5).regime == LaplaceRegime::above);
  CHECK(to_string(LaplaceRegime::below) == "below");

  double prev = 1e9;
  for (double h : {0.8, 0.4, 0.2, 0.1}) {
    const double gap = std::abs(exact_exit_prob(iv, 0.0, h) / laplace_asymptotic(iv, 0.0, h).value - 1.0);
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("preconditions") {
  CHECK_THROWS_AS(Interval1D::from_polynomial({0, 0, 1}, 1, 2), Error);
  CHECK_THROWS_AS(Interval1D::from_polynomial({0, 0, 1}, -2, 1), Error);
  CHECK_THROWS_AS(Interval1D::from_polynomial({0, 0, -1, 0, 1}, -1.2, 1.3), Error);
  const Interval1D iv = Interval1D::from_polynomial({0, 0, 1}, -1, 2);
  CHECK_THROWS_AS(exact_exit_prob(iv, 0.0, 0.0), Error);
  CHECK_THROWS_AS(exact_exit_prob(iv, 3.0, 1.0), Error);
}

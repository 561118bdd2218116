#include "exitlab/oracle1d.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace exitlab {

Interval1D::Interval1D(Fn f, Fn df, double z1, double z2) : f_(std::move(f)), df_(std::move(df)), z1_(z1), z2_(z2) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::PreconditionViolated, why); };
  if (!(z1 < z2)) fail("z1 < z2 required");
  if (!(df_(z1) < 0.0)) fail("f'(z1) < 0 required");
  if (!(df_(z2) > 0.0)) fail("f'(z2) > 0 required");
  if (!(f_(z1) < f_(z2))) fail("f(z1) < f(z2) required");

  constexpr int kScan = 4000;
  const double step = (z2 - z1) / kScan;
  int roots = 0;
  // Sign changes of f' between nonzero samples.
  double prev = df_(z1);
  double prev_x = z1;
  for (int k = 1; k <= kScan; ++k) {
    const double x = z1 + k * step;
    const double cur = df_(x);
    if (cur == 0.0) continue;
    if ((prev < 0.0) != (cur < 0.0)) {
      ++roots;
      if (prev < 0.0) {
        double lo = prev_x, hi = x;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
          const double mid = 0.5 * (lo + hi);
          (df_(mid) < 0.0 ? lo : hi) = mid;
        }
        x0_ = 0.5 * (lo + hi);
      }
    }
    prev = cur;
    prev_x = x;
  }
  if (roots != 1) {
    std::ostringstream msg;
    msg << "expected exactly one interior critical point, found " << roots;
    fail(msg.str());
  }
  const double eps = 1e-5 * std::max(1.0, std::abs(x0_));
  if (!((df_(x0_ + eps) - df_(x0_ - eps)) / (2 * eps) > 0.0)) fail("f''(x0) > 0 required");
}

Interval1D Interval1D::from_polynomial(const std::vector<double>& coeffs, double z1, double z2) {
  auto poly = std::make_shared<Polynomial1DPotential>(coeffs);
  return Interval1D([poly](double x) { return poly->value(x); }, [poly](double x) { return poly->derivative(x); },
                    z1, z2);
}

Interval1D Interval1D::from_landscape(const Landscape& land) {
  const auto* interval = dynamic_cast<const IntervalDomain*>(land.domain.get());
  if (!interval) throw Error(ErrorCode::InvalidParams, "the 1-D oracle needs an interval domain");
  auto pot = land.potential;
  return Interval1D([pot](double x) { return pot->value(vec1(x)); },
                    [pot](double x) { return pot->gradient(vec1(x))[0]; }, interval->lo(), interval->hi());
}

namespace {

struct Piece {
  double value = 0.0;
  double error = 0.0;
};

Piece integrate_shifted(const Interval1D& iv, double a, double b, double shift, double h) {
  Piece p;
  if (a >= b) return p;
  auto integrand = [&](double t) { return std::exp(2.0 * (iv.f(t) - shift) / h); };
  p.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, a, b, 15, 1e-12, &p.error);
  return p;
}

}  // namespace

double exact_exit_prob(const Interval1D& iv, double x, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidTemperature, "h must be positive");
  if (!(x >= iv.z1() && x <= iv.z2())) throw Error(ErrorCode::PointOutsideDomain, "x outside [z1, z2]");
  if (x == iv.z1()) return 0.0;
  if (x == iv.z2()) return 1.0;
  // f is largest at an endpoint because x0 is the only interior critical point.
  const double shift = std::max(iv.f(iv.z1()), iv.f(iv.z2()));
  // Split at x0 so each panel has a monotone integrand. Splits closer than
  // machine precision to an endpoint are skipped.
  const double tiny = 1e-12 * (iv.z2() - iv.z1());
  auto piece = [&](double a, double b) {
    if (iv.x0() > a + tiny && iv.x0() < b - tiny) {
      const Piece l = integrate_shifted(iv, a, iv.x0(), shift, h);
      const Piece r = integrate_shifted(iv, iv.x0(), b, shift, h);
      return Piece{l.value + r.value, l.error + r.error};
    }
    return integrate_shifted(iv, a, b, shift, h);
  };
  const Piece left = piece(iv.z1(), x);
  const Piece right = piece(x, iv.z2());
  const double total = left.value + right.value;
  // The relative error of the ratio is bounded by the sum of the panel errors
  // over each of the two integrals.
  const double rel = left.error / std::max(left.value, 1e-300) + right.error / std::max(right.value, 1e-300);
  if (!std::isfinite(total) || !(total > 0.0) || rel > 1e-8) {
    std::ostringstream msg;
    msg << "relative error estimate " << rel << " exceeds 1e-8";
    throw Error(ErrorCode::QuadratureFailure, msg.str());
  }
  return left.value / total;
}

std::string_view to_string(LaplaceRegime r) {
  switch (r) {
    case LaplaceRegime::below: return "below";
    case LaplaceRegime::equal: return "equal";
    case LaplaceRegime::above: return "above";
  }
  return "unknown";
}

LaplaceResult laplace_asymptotic(const Interval1D& iv, double x, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidTemperature, "h must be positive");
  if (!(x > iv.z1() && x <= iv.z2())) throw Error(ErrorCode::PointOutsideDomain, "x must lie in (z1, z2]");
  const double f1 = iv.f(iv.z1()), f2 = iv.f(iv.z2()), fx = iv.f(x);
  const double d1 = iv.df(iv.z1()), d2 = iv.df(iv.z2()), dx = iv.df(x);
  LaplaceResult r;
  if (std::abs(fx - f1) < 1e-12) {
    r.regime = LaplaceRegime::equal;
    r.value = d2 * (1.0 / dx - 1.0 / d1) * std::exp(-2.0 * (f2 - f1) / h);
  } else if (fx < f1) {
    r.regime = LaplaceRegime::below;
    r.value = -d2 / d1 * std::exp(-2.0 * (f2 - f1) / h);
  } else {
    r.regime = LaplaceRegime::above;
    r.value = d2 / dx * std::exp(-2.0 * (f2 - fx) / h);
  }
  return r;
}

}  // namespace exitlab

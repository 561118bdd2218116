#pragma once

// Exact and Laplace-asymptotic exit probabilities on an interval [z1, z2].
//
// Starting from x, the probability to leave through z2 is
//   w_h(x) = int_{z1}^{x} e^{2f/h} / int_{z1}^{z2} e^{2f/h},
// the solution of (h/2) w'' - f' w' = 0 with w(z1) = 0, w(z2) = 1.

#include "exitlab/landscape.hpp"

#include <functional>
#include <string_view>

namespace exitlab {

class Interval1D {
 public:
  using Fn = std::function<double(double)>;

  /// Checks f'(z1) < 0, f'(z2) > 0, f(z1) < f(z2) and a unique interior
  /// critical point x0 with f''(x0) > 0. Throws PreconditionViolated.
  Interval1D(Fn f, Fn df, double z1, double z2);

  static Interval1D from_polynomial(const std::vector<double>& coeffs, double z1, double z2);
  static Interval1D from_landscape(const Landscape& land);

  double f(double x) const { return f_(x); }
  double df(double x) const { return df_(x); }
  double z1() const { return z1_; }
  double z2() const { return z2_; }
  double x0() const { return x0_; }

 private:
  Fn f_;
  Fn df_;
  double z1_;
  double z2_;
  double x0_ = 0.0;
};

/// Probability of exiting through z2 from x. Adaptive Gauss-Kronrod on
/// e^{2(f - max f)/h}, relative error below 1e-8 or QuadratureFailure.
double exact_exit_prob(const Interval1D& iv, double x, double h);

enum class LaplaceRegime { below, equal, above };

std::string_view to_string(LaplaceRegime r);

struct LaplaceResult {
  double value = 0.0;
  LaplaceRegime regime = LaplaceRegime::below;
};

/// Leading-order small-h behaviour of exact_exit_prob. The regime compares
/// f(x) with f(z1); |f(x) - f(z1)| < 1e-12 counts as equality.
LaplaceResult laplace_asymptotic(const Interval1D& iv, double x, double h);

}  // namespace exitlab

#pragma once

// Leading-order small-temperature formulas for the exit event from the
// quasi-stationary distribution: transition rates k_{0,i}, the principal
// eigenvalue lambda_h, exit probabilities through saddle windows and generic
// windows, the approximate exit density, and the theory line G(2/h).
//
// All (1 + O(h)) corrections are dropped.

#include "exitlab/landscape.hpp"

#include <string>

namespace exitlab {

struct TheoryContext {
  CriticalInventory inventory;
  double h = 1.0;

  /// Throws InvalidTemperature unless h > 0.
  TheoryContext(CriticalInventory inv, double temperature);
};

/// f(z_i) - f(x0).
double barrier(const TheoryContext& ctx, int i);

/// The sub-exponential factor of rate(ctx, i).
double rate_prefactor(const TheoryContext& ctx, int i);

/// k_{0,i} = (pi h)^{-1/2} dn f(z_i) sqrt(det Hess f(x0)) / sqrt(det Hess f|dOmega(z_i))
///           * exp(-2 (f(z_i) - f(x0)) / h).
double rate(const TheoryContext& ctx, int i);

double principal_eigenvalue(const TheoryContext& ctx);

/// Probability that the exit point lies close to z_i.
double exit_probability(const TheoryContext& ctx, int i);

/// G(x) = intercept + slope * x with x = 2/h.
struct AffineG {
  double intercept = 0.0;
  double slope = 0.0;
  double operator()(double x) const { return intercept + slope * x; }
};

AffineG theory_curve_G(const CriticalInventory& inv, int i_target);

enum class WindowKind { saddle, generic };

/// A boundary window. A saddle window surrounds one z_i. A generic window sits
/// inside one basin and reaches its lowest value f_star at a single point
/// z_star of its own boundary.
struct WindowSpec {
  std::string label;
  WindowKind kind = WindowKind::saddle;
  int saddle_index = 0;
  double f_star = 0.0;
  Vec z_star;
  double dn_f_zstar = 0.0;
  /// Derivative of f at z_star along the outward normal of the window inside
  /// the boundary. Negative for a valid window.
  double dn_partial_sigma_f_zstar = 0.0;
  double det_hess_partial_sigma = 1.0;
};

/// Builds a generic window from the boundary arc [s_begin, s_end] (d = 2).
/// Throws InvalidWindow if the arc contains a boundary minimum, crosses basins
/// or does not reach its minimum at exactly one end.
WindowSpec make_generic_window(const Landscape& land, const CriticalInventory& inv, double s_begin, double s_end,
                               std::string label = "window");

double exit_probability_window(const TheoryContext& ctx, const WindowSpec& window);

/// dn f(z) e^{-2 f(z)/h} normalized by its boundary integral. The integral is
/// a periodic trapezoid rule on the arclength in d = 2 and a sum over the two
/// endpoints in d = 1 (the density is then a probability mass).
double approx_exit_density(const TheoryContext& ctx, const Landscape& land, const Vec& z,
                           std::size_t panels = 10000);

/// Leading order of int u_h e^{-2f/h}.
double uh_mass(const TheoryContext& ctx);

}  // namespace exitlab

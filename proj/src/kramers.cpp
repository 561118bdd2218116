#include "exitlab/kramers.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace exitlab {

namespace {

constexpr double kPi = std::numbers::pi;

double weight(const BoundaryMinimum& m) { return m.dn_f / std::sqrt(m.det_hess_boundary); }

double global_weight_sum(const CriticalInventory& inv) {
  double sum = 0.0;
  for (int k = 1; k <= inv.n0; ++k) sum += weight(inv.z(k));
  return sum;
}

}  // namespace

TheoryContext::TheoryContext(CriticalInventory inv, double temperature) : inventory(std::move(inv)), h(temperature) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidTemperature, "h must be positive and finite");
  if (inventory.n() == 0) throw Error(ErrorCode::InvalidParams, "inventory has no boundary minima");
}

double barrier(const TheoryContext& ctx, int i) { return ctx.inventory.z(i).f_z - ctx.inventory.f_x0; }

double rate_prefactor(const TheoryContext& ctx, int i) {
  return weight(ctx.inventory.z(i)) * std::sqrt(ctx.inventory.det_hess_x0) / std::sqrt(kPi * ctx.h);
}

double rate(const TheoryContext& ctx, int i) {
  return rate_prefactor(ctx, i) * std::exp(-2.0 * barrier(ctx, i) / ctx.h);
}

double principal_eigenvalue(const TheoryContext& ctx) {
  const auto& inv = ctx.inventory;
  return std::sqrt(inv.det_hess_x0) / std::sqrt(kPi * ctx.h) * global_weight_sum(inv) *
         std::exp(-2.0 * (inv.z(1).f_z - inv.f_x0) / ctx.h);
}

double exit_probability(const TheoryContext& ctx, int i) {
  const auto& inv = ctx.inventory;
  return weight(inv.z(i)) / global_weight_sum(inv) * std::exp(-2.0 * (inv.z(i).f_z - inv.z(1).f_z) / ctx.h);
}

AffineG theory_curve_G(const CriticalInventory& inv, int i_target) {
  const auto& zi = inv.z(i_target);
  const auto& z1 = inv.z(1);
  AffineG g;
  g.intercept = std::log(zi.dn_f * std::sqrt(z1.det_hess_boundary) / (z1.dn_f * std::sqrt(zi.det_hess_boundary)));
  g.slope = -(zi.f_z - z1.f_z);
  return g;
}

WindowSpec make_generic_window(const Landscape& land, const CriticalInventory& inv, double s_begin, double s_end,
                               std::string label) {
  const Domain& dom = *land.domain;
  if (!dom.has_boundary_param()) throw Error(ErrorCode::InvalidWindow, "generic windows need a parametrized boundary");
  const double length = dom.boundary_length();
  double span = std::fmod(s_end - s_begin, length);
  if (span < 0) span += length;
  if (!(span > 0.0)) throw Error(ErrorCode::InvalidWindow, "empty window");
  for (const auto& m : inv.boundary_minima) {
    double offset = std::fmod(m.s - s_begin, length);
    if (offset < 0) offset += length;
    if (offset >= 0.0 && offset <= span)
      throw Error(ErrorCode::InvalidWindow, "window '" + label + "' contains a boundary minimum");
  }
  constexpr int kSamples = 2000;
  double f_min = std::numeric_limits<double>::infinity();
  int arg = -1;
  for (int k = 0; k <= kSamples; ++k) {
    const double fk = land.f(dom.boundary_frame(s_begin + span * k / kSamples).point);
    if (fk < f_min) {
      f_min = fk;
      arg = k;
    }
  }
  if (arg != 0 && arg != kSamples)
    throw Error(ErrorCode::InvalidWindow, "infimum of f over window '" + label + "' is not attained at an end");
  int basin_a = 0, basin_b = 0;
  try {
    basin_a = basin_label(land, inv, dom.boundary_frame(s_begin).point);
    basin_b = basin_label(land, inv, dom.boundary_frame(s_begin + span).point);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidWindow, std::string("window end on a basin boundary: ") + e.what());
  }
  if (basin_a != basin_b) throw Error(ErrorCode::InvalidWindow, "window '" + label + "' crosses two basins");

  const bool at_begin = arg == 0;
  const double s_star = at_begin ? s_begin : s_begin + span;
  const BoundaryFrame fr = dom.boundary_frame(s_star);
  const BoundaryJet jet = boundary_jet(land, s_star);
  WindowSpec w;
  w.label = std::move(label);
  w.kind = WindowKind::generic;
  w.f_star = jet.f;
  w.z_star = fr.point;
  w.dn_f_zstar = land.grad(fr.point).dot(fr.normal);
  // Leaving the window at its start means moving against the tangent.
  w.dn_partial_sigma_f_zstar = at_begin ? -jet.df : jet.df;
  w.det_hess_partial_sigma = 1.0;
  if (!(w.dn_partial_sigma_f_zstar < 0.0))
    throw Error(ErrorCode::InvalidWindow, "f does not increase into window '" + w.label + "' at its lowest point");
  return w;
}

double exit_probability_window(const TheoryContext& ctx, const WindowSpec& window) {
  if (window.kind == WindowKind::saddle) return exit_probability(ctx, window.saddle_index);
  if (!(window.dn_partial_sigma_f_zstar < 0.0) || !(window.det_hess_partial_sigma > 0.0))
    throw Error(ErrorCode::InvalidWindow, "window '" + window.label + "' violates its sign conditions");
  const auto& inv = ctx.inventory;
  return -std::sqrt(ctx.h) / (2.0 * std::sqrt(kPi)) * window.dn_f_zstar /
         (window.dn_partial_sigma_f_zstar * std::sqrt(window.det_hess_partial_sigma)) / global_weight_sum(inv) *
         std::exp(-2.0 * (window.f_star - inv.z(1).f_z) / ctx.h);
}

double approx_exit_density(const TheoryContext& ctx, const Landscape& land, const Vec& z, std::size_t panels) {
  const Domain& dom = *land.domain;
  const double f_ref = ctx.inventory.z(1).f_z;
  auto integrand = [&](const Vec& p, const Vec& n) {
    return land.grad(p).dot(n) * std::exp(-2.0 * (land.f(p) - f_ref) / ctx.h);
  };
  double total = 0.0;
  if (dom.kind() == DomainKind::interval) {
    for (double s : {0.0, 1.0}) {
      const BoundaryFrame fr = dom.boundary_frame(s);
      total += integrand(fr.point, fr.normal);
    }
  } else {
    if (panels == 0) throw Error(ErrorCode::InvalidParams, "panels must be positive");
    const double ds = dom.boundary_length() / static_cast<double>(panels);
    for (std::size_t k = 0; k < panels; ++k) {
      const BoundaryFrame fr = dom.boundary_frame(static_cast<double>(k) * ds);
      total += integrand(fr.point, fr.normal) * ds;
    }
  }
  return integrand(z, dom.outward_normal(z)) / total;
}

double uh_mass(const TheoryContext& ctx) {
  const double d = ctx.inventory.dimension;
  return std::pow(kPi, d / 4.0) * std::pow(ctx.inventory.det_hess_x0, -0.25) * std::pow(ctx.h, d / 4.0) *
         std::exp(-ctx.inventory.f_x0 / ctx.h);
}

}  // namespace exitlab

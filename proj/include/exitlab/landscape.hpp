#pragma once

// Potentials, domains and the critical structure of a metastable well:
// the interior minimum x0, the local minima z_1..z_n of f restricted to the
// boundary (generalized saddle points), their basins, and the nondegeneracy /
// ordering / outward-gradient checks (H1-H3) that the asymptotic formulas
// rely on.

#include "exitlab/core.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace exitlab {

class Potential {
 public:
  virtual ~Potential() = default;
  virtual int dimension() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  virtual Mat hessian(const Vec& x) const = 0;
  /// False when hessian() is itself a finite-difference approximation.
  virtual bool analytic_hessian() const { return true; }
  virtual std::string provenance() const = 0;
};

/// f(x, y) = x^2 + y^2 - a x.
class QuadraticCapsPotential final : public Potential {
 public:
  explicit QuadraticCapsPotential(double a) : a_(a) {}
  int dimension() const override { return 2; }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Mat hessian(const Vec& x) const override;
  std::string provenance() const override { return "builtin:quadratic-disc-caps"; }
  double a() const { return a_; }

 private:
  double a_;
};

/// f(x, y) = (y^2 - 2 c(x))^3 with c(x) = c2 x^2 + c1 x + 1/2, where c2, c1
/// solve c(-1 + delta) = 0 and c(1) = 1/4. The zero level set of f consists of
/// two ridges ("corniches") on which the gradient vanishes.
class CornichePotential final : public Potential {
 public:
  explicit CornichePotential(double delta);
  int dimension() const override { return 2; }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Mat hessian(const Vec& x) const override;
  std::string provenance() const override { return "builtin:corniche"; }

  double quadratic_coefficient() const { return c2_; }
  double linear_coefficient() const { return c1_; }
  double profile(double x) const { return c2_ * x * x + c1_ * x + 0.5; }

 private:
  double delta_;
  double c2_;
  double c1_;
};

/// f(x) = sum_k coeffs[k] x^k.
class Polynomial1DPotential final : public Potential {
 public:
  explicit Polynomial1DPotential(std::vector<double> coeffs);
  int dimension() const override { return 1; }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Mat hessian(const Vec& x) const override;
  std::string provenance() const override { return "builtin:polynomial"; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

 private:
  std::vector<double> coeffs_;
};

/// A potential registered from host code. When no Hessian is supplied it is
/// approximated by central differences of the gradient.
class UserPotential final : public Potential {
 public:
  using ScalarFn = std::function<double(const Vec&)>;
  using GradientFn = std::function<Vec(const Vec&)>;
  using HessianFn = std::function<Mat(const Vec&)>;

  UserPotential(int dimension, ScalarFn value, GradientFn gradient, HessianFn hessian = {},
                std::string name = "user");
  int dimension() const override { return dim_; }
  double value(const Vec& x) const override { return value_(x); }
  Vec gradient(const Vec& x) const override { return gradient_(x); }
  Mat hessian(const Vec& x) const override;
  bool analytic_hessian() const override { return static_cast<bool>(hessian_); }
  std::string provenance() const override { return "user:" + name_; }

 private:
  int dim_;
  ScalarFn value_;
  GradientFn gradient_;
  HessianFn hessian_;
  std::string name_;
};

enum class DomainKind { interval, disc, paper_composite, implicit_levelset };

std::string_view to_string(DomainKind kind);

/// Local geometry of a boundary curve at arclength s. `curvature` is signed so
/// that the second derivative of the curve equals -curvature * normal.
struct BoundaryFrame {
  Vec point;
  Vec tangent;
  Vec normal;
  double curvature = 0.0;
};

class Domain {
 public:
  virtual ~Domain() = default;
  virtual int dimension() const = 0;
  virtual DomainKind kind() const = 0;
  virtual bool contains(const Vec& x) const = 0;
  /// Signed distance to the boundary, negative inside. Exact close to the
  /// boundary; deep inside it may underestimate the depth.
  virtual double boundary_distance(const Vec& x) const = 0;
  virtual Vec outward_normal(const Vec& boundary_point) const = 0;
  /// Point where the segment [inside, outside] crosses the boundary.
  virtual Vec project_boundary(const Vec& inside, const Vec& outside) const;
  virtual std::pair<Vec, Vec> bounding_box() const = 0;

  /// Closed arclength parametrization of the boundary (d = 2 only).
  virtual bool has_boundary_param() const { return false; }
  virtual double boundary_length() const;
  virtual BoundaryFrame boundary_frame(double s) const;
  /// Inverse of the parametrization for a boundary point. In d = 1 the two
  /// endpoints get coordinates 0 and 1.
  virtual double boundary_coordinate(const Vec& p) const;
  /// Parameter values where the boundary curvature jumps.
  virtual std::vector<double> boundary_knots() const { return {}; }
};

class IntervalDomain final : public Domain {
 public:
  IntervalDomain(double lo, double hi);
  int dimension() const override { return 1; }
  DomainKind kind() const override { return DomainKind::interval; }
  bool contains(const Vec& x) const override { return x[0] > lo_ && x[0] < hi_; }
  double boundary_distance(const Vec& x) const override;
  Vec outward_normal(const Vec& p) const override;
  Vec project_boundary(const Vec& inside, const Vec& outside) const override;
  std::pair<Vec, Vec> bounding_box() const override { return {vec1(lo_), vec1(hi_)}; }
  BoundaryFrame boundary_frame(double s) const override;
  double boundary_coordinate(const Vec& p) const override;
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

class DiscDomain final : public Domain {
 public:
  DiscDomain(Vec center, double radius);
  int dimension() const override { return 2; }
  DomainKind kind() const override { return DomainKind::disc; }
  bool contains(const Vec& x) const override;
  double boundary_distance(const Vec& x) const override;
  Vec outward_normal(const Vec& p) const override;
  Vec project_boundary(const Vec& inside, const Vec& outside) const override;
  std::pair<Vec, Vec> bounding_box() const override;
  bool has_boundary_param() const override { return true; }
  double boundary_length() const override;
  BoundaryFrame boundary_frame(double s) const override;
  double boundary_coordinate(const Vec& p) const override;

 private:
  Vec center_;
  double radius_;
};

/// (-1,1)^2 together with the unit discs centred at (0, 1) and (0, -1).
/// The boundary is parametrized counterclockwise from the corner (1, -1):
/// right segment [0, 2], upper half circle [2, 2 + pi], left segment
/// [2 + pi, 4 + pi], lower half circle [4 + pi, 4 + 2 pi].
class PaperCompositeDomain final : public Domain {
 public:
  int dimension() const override { return 2; }
  DomainKind kind() const override { return DomainKind::paper_composite; }
  bool contains(const Vec& x) const override;
  double boundary_distance(const Vec& x) const override;
  Vec outward_normal(const Vec& p) const override;
  std::pair<Vec, Vec> bounding_box() const override { return {vec2(-1, -2), vec2(1, 2)}; }
  bool has_boundary_param() const override { return true; }
  double boundary_length() const override;
  BoundaryFrame boundary_frame(double s) const override;
  double boundary_coordinate(const Vec& p) const override;
  std::vector<double> boundary_knots() const override;
};

/// {x : phi(x) < 0} inside a user-supplied bounding box.
class ImplicitDomain final : public Domain {
 public:
  using LevelFn = std::function<double(const Vec&)>;
  using LevelGradientFn = std::function<Vec(const Vec&)>;
  ImplicitDomain(int dimension, LevelFn phi, LevelGradientFn grad_phi, Vec box_lo, Vec box_hi);
  int dimension() const override { return dim_; }
  DomainKind kind() const override { return DomainKind::implicit_levelset; }
  bool contains(const Vec& x) const override { return phi_(x) < 0.0; }
  double boundary_distance(const Vec& x) const override;
  Vec outward_normal(const Vec& p) const override;
  std::pair<Vec, Vec> bounding_box() const override { return {lo_, hi_}; }

 private:
  int dim_;
  LevelFn phi_;
  LevelGradientFn grad_phi_;
  Vec lo_;
  Vec hi_;
};

struct Landscape {
  std::shared_ptr<const Potential> potential;
  std::shared_ptr<const Domain> domain;
  std::string name;
  ParamMap params;

  int dimension() const { return potential->dimension(); }
  double f(const Vec& x) const { return potential->value(x); }
  Vec grad(const Vec& x) const { return potential->gradient(x); }
};

/// Pairs a potential with a domain after checking that their dimensions agree.
Landscape make_landscape(std::shared_ptr<const Potential> potential,
                         std::shared_ptr<const Domain> domain, std::string name,
                         ParamMap params = {});

/// name: quadratic-disc-caps (param a in (0, 1/9)), corniche (param delta,
/// default 0.05), interval-1d (params coeffs, z1, z2).
Landscape make_builtin_landscape(std::string_view name, const ParamMap& params);

/// The derivative of f along the outward normal at a boundary point.
double normal_derivative(const Landscape& land, const Vec& z);

/// grad f minus its normal component at a boundary point.
Vec tangential_gradient(const Landscape& land, const Vec& z);

/// Value, first and second arclength derivatives of s -> f(gamma(s)).
struct BoundaryJet {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};

/// Analytic through the Hessian when available, otherwise a 5-point stencil
/// with step 1e-4 * boundary length.
BoundaryJet boundary_jet(const Landscape& land, double s);

struct CriticalPoint {
  Vec x;
  double f = 0.0;
  double det_hess = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

struct BoundaryMinimum {
  Vec z;
  double s = 0.0;  ///< boundary coordinate
  double f_z = 0.0;
  double dn_f = 0.0;
  double det_hess_boundary = 1.0;
  int basin_id = 0;
};

struct CriticalInventory {
  int dimension = 0;
  Vec x0;
  double f_x0 = 0.0;
  double det_hess_x0 = 0.0;
  std::vector<BoundaryMinimum> boundary_minima;  ///< ascending f
  int n0 = 0;

  std::size_t n() const { return boundary_minima.size(); }
  /// 1-based access, z(1) is the lowest boundary minimum.
  const BoundaryMinimum& z(int i) const;
};

/// Tie tolerance on f when counting global boundary minima.
inline constexpr double kTieTolerance = 1e-10;

/// Cell-centred grid of points inside the domain, `per_axis` per coordinate.
std::vector<Vec> default_seeds(const Domain& domain, int per_axis = 9);

/// Newton's method on grad f = 0 from every seed (with a short gradient-descent
/// restart when Newton leaves the domain). Returns the distinct converged
/// points, of any index.
std::vector<CriticalPoint> find_critical_points(const Landscape& land, const std::vector<Vec>& seeds);

/// The unique interior critical point with a positive definite Hessian.
CriticalPoint find_interior_minimum(const Landscape& land, const std::vector<Vec>& seeds);

CriticalInventory find_boundary_minima(const Landscape& land, std::size_t grid_resolution,
                                       const CriticalPoint& x0);
CriticalInventory find_boundary_minima(const Landscape& land, std::size_t grid_resolution = 4096);

/// Index i (1-based) of the boundary minimum whose basin for the boundary
/// gradient flow contains the point. Throws NoConvergence on basin boundaries.
int basin_label(const Landscape& land, const CriticalInventory& inv, const Vec& boundary_point);

/// Basin label for n equally spaced boundary samples, by discrete descent.
/// Samples that are strict local maxima get label 0.
std::vector<int> boundary_basin_partition(const Landscape& land, const CriticalInventory& inv,
                                          std::size_t n_samples);
/// Same for increasing boundary coordinates covering one turn of the boundary.
std::vector<int> boundary_basin_partition(const Landscape& land, const CriticalInventory& inv,
                                          const std::vector<double>& s_samples);

struct HypothesisEntry {
  std::string id;
  bool pass = false;
  double value = 0.0;
  std::string detail;
};

struct HypothesisReport {
  std::vector<HypothesisEntry> entries;
  std::optional<CriticalInventory> inventory;
  std::vector<CriticalPoint> critical_points;

  bool all_pass() const;
  const HypothesisEntry& entry(std::string_view id) const;
};

struct HypothesisOptions {
  std::size_t boundary_samples = 10000;
  std::size_t grid_resolution = 4096;
  int seeds_per_axis = 9;
};

HypothesisReport check_hypotheses(const Landscape& land, const HypothesisOptions& options = {});

/// Columns i, z_x, z_y, f_z, dn_f, det_hess_boundary, basin_id.
void write_inventory_csv(const CriticalInventory& inv, std::ostream& out);

}  // namespace exitlab

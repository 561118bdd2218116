#include "exitlab/landscape.hpp"

#include "exitlab/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace exitlab {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double s, double length) {
  double r = std::fmod(s, length);
  if (r < 0) r += length;
  return r;
}

double cyclic_distance(double a, double b, double length) {
  const double d = std::abs(wrap(a - b, length));
  return std::min(d, length - d);
}

BoundaryFrame arc_frame(double cx, double cy, double radius, double phi) {
  BoundaryFrame fr;
  fr.point = vec2(cx + radius * std::cos(phi), cy + radius * std::sin(phi));
  fr.tangent = vec2(-std::sin(phi), std::cos(phi));
  fr.normal = vec2(std::cos(phi), std::sin(phi));
  fr.curvature = 1.0 / radius;
  return fr;
}

BoundaryFrame segment_frame(Vec point, Vec tangent, Vec normal) {
  return {std::move(point), std::move(tangent), std::move(normal), 0.0};
}

}  // namespace

// ---------------------------------------------------------------- potentials

double QuadraticCapsPotential::value(const Vec& p) const {
  return p[0] * p[0] + p[1] * p[1] - a_ * p[0];
}

Vec QuadraticCapsPotential::gradient(const Vec& p) const {
  return vec2(2.0 * p[0] - a_, 2.0 * p[1]);
}

Mat QuadraticCapsPotential::hessian(const Vec&) const {
  Mat h(2, 2);
  h << 2.0, 0.0, 0.0, 2.0;
  return h;
}

CornichePotential::CornichePotential(double delta) : delta_(delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw Error(ErrorCode::InvalidParams, "corniche requires delta in (0, 1)");
  // c(u) = 0 at u = -1 + delta and c(1) = 1/4, with c(x) = c2 x^2 + c1 x + 1/2.
  const double u = -1.0 + delta;
  c2_ = (0.25 * u - 0.5) / (u * u - u);
  c1_ = -0.25 - c2_;
}

double CornichePotential::value(const Vec& p) const {
  const double g = p[1] * p[1] - 2.0 * profile(p[0]);
  return g * g * g;
}

Vec CornichePotential::gradient(const Vec& p) const {
  const double g = p[1] * p[1] - 2.0 * profile(p[0]);
  const double dc = 2.0 * c2_ * p[0] + c1_;
  const double s = 3.0 * g * g;
  return vec2(s * (-2.0 * dc), s * (2.0 * p[1]));
}

Mat CornichePotential::hessian(const Vec& p) const {
  const double g = p[1] * p[1] - 2.0 * profile(p[0]);
  const double dc = 2.0 * c2_ * p[0] + c1_;
  const double gx = -2.0 * dc;
  const double gy = 2.0 * p[1];
  Mat h(2, 2);
  h << 6.0 * g * gx * gx + 3.0 * g * g * (-4.0 * c2_), 6.0 * g * gx * gy,
      6.0 * g * gx * gy, 6.0 * g * gy * gy + 3.0 * g * g * 2.0;
  return h;
}

Polynomial1DPotential::Polynomial1DPotential(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw Error(ErrorCode::InvalidParams, "polynomial needs at least one coefficient");
}

double Polynomial1DPotential::value(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial1DPotential::derivative(double x) const {
  double acc = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * coeffs_[k];
  return acc;
}

double Polynomial1DPotential::second_derivative(double x) const {
  double acc = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 2;)
    acc = acc * x + static_cast<double>(k * (k - 1)) * coeffs_[k];
  return acc;
}

double Polynomial1DPotential::value(const Vec& x) const { return value(x[0]); }
Vec Polynomial1DPotential::gradient(const Vec& x) const { return vec1(derivative(x[0])); }
Mat Polynomial1DPotential::hessian(const Vec& x) const {
  Mat h(1, 1);
  h(0, 0) = second_derivative(x[0]);
  return h;
}

UserPotential::UserPotential(int dimension, ScalarFn value, GradientFn gradient, HessianFn hessian,
                             std::string name)
    : dim_(dimension),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      hessian_(std::move(hessian)),
      name_(std::move(name)) {
  if (dim_ < 1 || dim_ > kMaxDim) throw Error(ErrorCode::InvalidParams, "unsupported dimension");
  if (!value_ || !gradient_) throw Error(ErrorCode::InvalidParams, "value and gradient are required");
}

Mat UserPotential::hessian(const Vec& x) const {
  if (hessian_) return hessian_(x);
  Mat h(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    const double step = 1e-5 * std::max(1.0, std::abs(x[i]));
    Vec xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    h.col(i) = (gradient_(xp) - gradient_(xm)) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

// ------------------------------------------------------------------- domains

std::string_view to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::interval: return "interval";
    case DomainKind::disc: return "disc";
    case DomainKind::paper_composite: return "paper-composite";
    case DomainKind::implicit_levelset: return "implicit-levelset";
  }
  return "unknown";
}

Vec Domain::project_boundary(const Vec& inside, const Vec& outside) const {
  Vec lo = inside;
  Vec hi = outside;
  for (int k = 0; k < 200 && (hi - lo).norm() > 1e-13; ++k) {
    Vec mid = 0.5 * (lo + hi);
    if (contains(mid))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double Domain::boundary_length() const {
  throw Error(ErrorCode::InvalidParams, "domain has no boundary parametrization");
}

BoundaryFrame Domain::boundary_frame(double) const {
  throw Error(ErrorCode::InvalidParams, "domain has no boundary parametrization");
}

double Domain::boundary_coordinate(const Vec&) const {
  throw Error(ErrorCode::InvalidParams, "domain has no boundary parametrization");
}

IntervalDomain::IntervalDomain(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo < hi)) throw Error(ErrorCode::InvalidParams, "interval requires z1 < z2");
}

double IntervalDomain::boundary_distance(const Vec& x) const {
  return std::max(lo_ - x[0], x[0] - hi_);
}

Vec IntervalDomain::outward_normal(const Vec& p) const {
  return vec1(std::abs(p[0] - lo_) <= std::abs(p[0] - hi_) ? -1.0 : 1.0);
}

Vec IntervalDomain::project_boundary(const Vec&, const Vec& outside) const {
  return vec1(outside[0] <= lo_ ? lo_ : hi_);
}

BoundaryFrame IntervalDomain::boundary_frame(double s) const {
  BoundaryFrame fr;
  fr.point = vec1(s < 0.5 ? lo_ : hi_);
  fr.normal = vec1(s < 0.5 ? -1.0 : 1.0);
  fr.tangent = Vec::Zero(1);
  return fr;
}

double IntervalDomain::boundary_coordinate(const Vec& p) const {
  return std::abs(p[0] - lo_) <= std::abs(p[0] - hi_) ? 0.0 : 1.0;
}

DiscDomain::DiscDomain(Vec center, double radius) : center_(std::move(center)), radius_(radius) {
  if (center_.size() != 2 || !(radius > 0)) throw Error(ErrorCode::InvalidParams, "disc needs a 2-D centre and radius > 0");
}

bool DiscDomain::contains(const Vec& x) const { return (x - center_).squaredNorm() < radius_ * radius_; }

double DiscDomain::boundary_distance(const Vec& x) const { return (x - center_).norm() - radius_; }

Vec DiscDomain::outward_normal(const Vec& p) const { return (p - center_).normalized(); }

Vec DiscDomain::project_boundary(const Vec& inside, const Vec& outside) const {
  const Vec d = outside - inside;
  const Vec m = inside - center_;
  const double a = d.squaredNorm();
  const double b = 2.0 * m.dot(d);
  const double c = m.squaredNorm() - radius_ * radius_;
  const double disc = std::max(0.0, b * b - 4.0 * a * c);
  const double t = std::clamp((-b + std::sqrt(disc)) / (2.0 * a), 0.0, 1.0);
  return inside + t * d;
}

std::pair<Vec, Vec> DiscDomain::bounding_box() const {
  return {center_.array() - radius_, center_.array() + radius_};
}

double DiscDomain::boundary_length() const { return 2.0 * kPi * radius_; }

BoundaryFrame DiscDomain::boundary_frame(double s) const {
  return arc_frame(center_[0], center_[1], radius_, wrap(s, boundary_length()) / radius_);
}

double DiscDomain::boundary_coordinate(const Vec& p) const {
  return wrap(std::atan2(p[1] - center_[1], p[0] - center_[0]) * radius_, boundary_length());
}

bool PaperCompositeDomain::contains(const Vec& p) const {
  const double x = p[0], y = p[1];
  if (std::abs(x) < 1.0 && std::abs(y) < 1.0) return true;
  const double x2 = x * x;
  return x2 + (y - 1.0) * (y - 1.0) < 1.0 || x2 + (y + 1.0) * (y + 1.0) < 1.0;
}

double PaperCompositeDomain::boundary_distance(const Vec& p) const {
  const double qx = std::abs(p[0]) - 1.0;
  const double qy = std::abs(p[1]) - 1.0;
  const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
  const double square = outside + std::min(std::max(qx, qy), 0.0);
  const double up = std::hypot(p[0], p[1] - 1.0) - 1.0;
  const double down = std::hypot(p[0], p[1] + 1.0) - 1.0;
  return std::min({square, up, down});
}

double PaperCompositeDomain::boundary_length() const { return 4.0 + 2.0 * kPi; }

std::vector<double> PaperCompositeDomain::boundary_knots() const {
  return {0.0, 2.0, 2.0 + kPi, 4.0 + kPi};
}

BoundaryFrame PaperCompositeDomain::boundary_frame(double s) const {
  s = wrap(s, boundary_length());
  if (s < 2.0) return segment_frame(vec2(1.0, -1.0 + s), vec2(0.0, 1.0), vec2(1.0, 0.0));
  if (s < 2.0 + kPi) return arc_frame(0.0, 1.0, 1.0, s - 2.0);
  if (s < 4.0 + kPi) return segment_frame(vec2(-1.0, 1.0 - (s - 2.0 - kPi)), vec2(0.0, -1.0), vec2(-1.0, 0.0));
  return arc_frame(0.0, -1.0, 1.0, -kPi + (s - 4.0 - kPi));
}

double PaperCompositeDomain::boundary_coordinate(const Vec& p) const {
  const double x = p[0], y = p[1];
  double s;
  if (y > 1.0) {
    s = 2.0 + std::clamp(std::atan2(y - 1.0, x), 0.0, kPi);
  } else if (y < -1.0) {
    s = 4.0 + kPi + (std::clamp(std::atan2(y + 1.0, x), -kPi, 0.0) + kPi);
  } else if (x > 0.0) {
    s = 1.0 + y;
  } else {
    s = 2.0 + kPi + (1.0 - y);
  }
  return wrap(s, boundary_length());
}

Vec PaperCompositeDomain::outward_normal(const Vec& p) const {
  return boundary_frame(boundary_coordinate(p)).normal;
}

ImplicitDomain::ImplicitDomain(int dimension, LevelFn phi, LevelGradientFn grad_phi, Vec box_lo, Vec box_hi)
    : dim_(dimension), phi_(std::move(phi)), grad_phi_(std::move(grad_phi)), lo_(std::move(box_lo)), hi_(std::move(box_hi)) {
  if (dim_ < 1 || dim_ > kMaxDim || !phi_ || !grad_phi_)
    throw Error(ErrorCode::InvalidParams, "implicit domain needs phi, grad phi and a dimension in [1, 4]");
}

double ImplicitDomain::boundary_distance(const Vec& x) const {
  const double n = grad_phi_(x).norm();
  return n > 0 ? phi_(x) / n : phi_(x);
}

Vec ImplicitDomain::outward_normal(const Vec& p) const { return grad_phi_(p).normalized(); }

// ---------------------------------------------------------------- landscapes

Landscape make_landscape(std::shared_ptr<const Potential> potential, std::shared_ptr<const Domain> domain,
                         std::string name, ParamMap params) {
  if (!potential || !domain) throw Error(ErrorCode::InvalidParams, "landscape needs a potential and a domain");
  if (potential->dimension() != domain->dimension())
    throw Error(ErrorCode::InvalidParams, "potential and domain dimensions differ");
  return Landscape{std::move(potential), std::move(domain), std::move(name), std::move(params)};
}

Landscape make_builtin_landscape(std::string_view name, const ParamMap& params) {
  if (name == "quadratic-disc-caps") {
    const double a = params.scalar("a");
    if (!(a > 0.0 && a < 1.0 / 9.0))
      throw Error(ErrorCode::InvalidParams, "quadratic-disc-caps requires a in (0, 1/9)");
    return make_landscape(std::make_shared<QuadraticCapsPotential>(a), std::make_shared<PaperCompositeDomain>(),
                          std::string(name), params);
  }
  if (name == "corniche") {
    ParamMap resolved = params;
    if (!resolved.has("delta")) resolved.set("delta", 0.05);
    return make_landscape(std::make_shared<CornichePotential>(resolved.scalar("delta")),
                          std::make_shared<PaperCompositeDomain>(), std::string(name), resolved);
  }
  if (name == "interval-1d") {
    const auto& coeffs = params.array("coeffs");
    const double z1 = params.scalar("z1");
    const double z2 = params.scalar("z2");
    if (!(z1 < z2)) throw Error(ErrorCode::InvalidParams, "interval-1d requires z1 < z2");
    return make_landscape(std::make_shared<Polynomial1DPotential>(coeffs), std::make_shared<IntervalDomain>(z1, z2),
                          std::string(name), params);
  }
  throw Error(ErrorCode::UnknownName, "no builtin landscape named '" + std::string(name) + "'");
}

double normal_derivative(const Landscape& land, const Vec& z) {
  return land.grad(z).dot(land.domain->outward_normal(z));
}

Vec tangential_gradient(const Landscape& land, const Vec& z) {
  const Vec g = land.grad(z);
  const Vec n = land.domain->outward_normal(z);
  return g - g.dot(n) * n;
}

BoundaryJet boundary_jet(const Landscape& land, double s) {
  const Domain& dom = *land.domain;
  const BoundaryFrame fr = dom.boundary_frame(s);
  BoundaryJet jet;
  jet.f = land.f(fr.point);
  const Vec g = land.grad(fr.point);
  jet.df = g.dot(fr.tangent);
  if (land.potential->analytic_hessian()) {
    const Mat h = land.potential->hessian(fr.point);
    jet.d2f = fr.tangent.dot(h * fr.tangent) - fr.curvature * g.dot(fr.normal);
  } else {
    const double step = 1e-4 * dom.boundary_length();
    auto fs = [&](double t) { return land.f(dom.boundary_frame(t).point); };
    jet.d2f = (-fs(s + 2 * step) + 16 * fs(s + step) - 30 * jet.f + 16 * fs(s - step) - fs(s - 2 * step)) /
              (12.0 * step * step);
  }
  return jet;
}

// ------------------------------------------------------- critical structure

const BoundaryMinimum& CriticalInventory::z(int i) const {
  if (i < 1 || static_cast<std::size_t>(i) > boundary_minima.size())
    throw Error(ErrorCode::InvalidParams, "boundary minimum index out of range");
  return boundary_minima[static_cast<std::size_t>(i - 1)];
}

std::vector<Vec> default_seeds(const Domain& domain, int per_axis) {
  const auto [lo, hi] = domain.bounding_box();
  const int d = domain.dimension();
  std::vector<Vec> seeds;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (;;) {
    Vec p(d);
    for (int k = 0; k < d; ++k) p[k] = lo[k] + (idx[static_cast<std::size_t>(k)] + 0.5) / per_axis * (hi[k] - lo[k]);
    if (domain.contains(p)) seeds.push_back(p);
    int k = 0;
    while (k < d && ++idx[static_cast<std::size_t>(k)] == per_axis) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == d) break;
  }
  return seeds;
}

namespace {

constexpr double kGradientTolerance = 1e-10;
constexpr double kDegenerateEigenvalue = 1e-8;

std::optional<Vec> newton_critical(const Landscape& land, Vec x) {
  for (int it = 0; it < 200; ++it) {
    const Vec g = land.grad(x);
    if (g.norm() < kGradientTolerance) return x;
    const Mat h = land.potential->hessian(x);
    Eigen::FullPivLU<Mat> lu(h);
    if (!lu.isInvertible()) return std::nullopt;
    const Vec next = x - lu.solve(g);
    if (!next.allFinite() || !land.domain->contains(next)) return std::nullopt;
    x = next;
  }
  if (land.grad(x).norm() < kGradientTolerance) return x;
  return std::nullopt;
}

CriticalPoint classify(const Landscape& land, const Vec& x) {
  const Mat h = land.potential->hessian(x);
  Eigen::SelfAdjointEigenSolver<Mat> eig(h, Eigen::EigenvaluesOnly);
  CriticalPoint cp;
  cp.x = x;
  cp.f = land.f(x);
  cp.det_hess = h.determinant();
  cp.min_eigenvalue = eig.eigenvalues().minCoeff();
  cp.max_eigenvalue = eig.eigenvalues().maxCoeff();
  return cp;
}

}  // namespace

std::vector<CriticalPoint> find_critical_points(const Landscape& land, const std::vector<Vec>& seeds) {
  std::vector<CriticalPoint> found;
  for (const Vec& seed : seeds) {
    if (!land.domain->contains(seed)) throw Error(ErrorCode::PreconditionViolated, "seed outside the domain");
    std::optional<Vec> x = newton_critical(land, seed);
    if (!x) {
      // Gradient-descent pre-iterations, then one more Newton attempt.
      Vec y = seed;
      for (int k = 0; k < 50; ++k) {
        const Vec next = y - 1e-2 * land.grad(y);
        if (!land.domain->contains(next)) break;
        y = next;
      }
      x = newton_critical(land, y);
    }
    if (!x) continue;
    const bool duplicate = std::any_of(found.begin(), found.end(),
                                       [&](const CriticalPoint& c) { return (c.x - *x).norm() < 1e-6; });
    if (!duplicate) found.push_back(classify(land, *x));
  }
  return found;
}

CriticalPoint find_interior_minimum(const Landscape& land, const std::vector<Vec>& seeds) {
  std::vector<CriticalPoint> minima;
  for (auto& cp : find_critical_points(land, seeds))
    if (cp.min_eigenvalue > kDegenerateEigenvalue) minima.push_back(std::move(cp));
  if (minima.empty()) throw Error(ErrorCode::NoConvergence, "no nondegenerate interior minimum found from the seeds");
  if (minima.size() > 1) {
    std::ostringstream msg;
    msg << minima.size() << " interior minima:";
    for (const auto& m : minima) msg << " (" << m.x.transpose() << ")";
    throw Error(ErrorCode::MultipleMinimaFound, msg.str());
  }
  return minima.front();
}

namespace {

/// Local minimum of s -> f(gamma(s)) in [a, b] (unwrapped coordinates).
double refine_boundary_minimum(const Landscape& land, double a, double b) {
  const double scale = std::max(1.0, land.domain->boundary_length());
  const double da = boundary_jet(land, a).df;
  const double db = boundary_jet(land, b).df;
  double s = 0.5 * (a + b);
  if (da < 0.0 && db > 0.0) {
    for (int it = 0; it < 200; ++it) {
      const BoundaryJet jet = boundary_jet(land, s);
      if (jet.df == 0.0) break;
      if (jet.df < 0.0)
        a = s;
      else
        b = s;
      double next = jet.d2f > 0.0 ? s - jet.df / jet.d2f : 0.5 * (a + b);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      const bool done = std::abs(next - s) < 1e-15 * scale;
      s = next;
      if (done || b - a < 1e-15 * scale) break;
    }
    return s;
  }
  // No sign change of the derivative at the bracket ends: golden section on f.
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  auto fs = [&](double t) { return land.f(land.domain->boundary_frame(t).point); };
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = fs(c), fd = fs(d);
  for (int it = 0; it < 200 && b - a > 1e-13 * scale; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = fs(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = fs(d);
    }
  }
  s = 0.5 * (a + b);
  for (int it = 0; it < 5; ++it) {
    const BoundaryJet jet = boundary_jet(land, s);
    if (!(jet.d2f > 0.0)) break;
    s -= jet.df / jet.d2f;
  }
  return s;
}

}  // namespace

CriticalInventory find_boundary_minima(const Landscape& land, std::size_t grid_resolution) {
  return find_boundary_minima(land, grid_resolution, find_interior_minimum(land, default_seeds(*land.domain)));
}

CriticalInventory find_boundary_minima(const Landscape& land, std::size_t grid_resolution, const CriticalPoint& x0) {
  const Domain& dom = *land.domain;
  CriticalInventory inv;
  inv.dimension = land.dimension();
  inv.x0 = x0.x;
  inv.f_x0 = x0.f;
  inv.det_hess_x0 = x0.det_hess;

  if (dom.kind() == DomainKind::interval) {
    for (double s : {0.0, 1.0}) {
      const BoundaryFrame fr = dom.boundary_frame(s);
      BoundaryMinimum bm;
      bm.z = fr.point;
      bm.s = s;
      bm.f_z = land.f(fr.point);
      bm.dn_f = land.grad(fr.point).dot(fr.normal);
      bm.det_hess_boundary = 1.0;
      inv.boundary_minima.push_back(bm);
    }
  } else {
    if (!dom.has_boundary_param())
      throw Error(ErrorCode::InvalidParams,
                  "automatic boundary analysis needs a parametrized boundary; supply the inventory instead");
    const std::size_t n = std::max<std::size_t>(grid_resolution, 16);
    const double length = dom.boundary_length();
    const double ds = length / static_cast<double>(n);
    std::vector<double> values(n);
    for (std::size_t k = 0; k < n; ++k) values[k] = land.f(dom.boundary_frame(k * ds).point);
    for (std::size_t k = 0; k < n; ++k) {
      const double prev = values[(k + n - 1) % n];
      const double next = values[(k + 1) % n];
      if (!(values[k] < prev && values[k] <= next)) continue;
      const double s_raw = refine_boundary_minimum(land, (static_cast<double>(k) - 1.0) * ds,
                                                   (static_cast<double>(k) + 1.0) * ds);
      const double s = wrap(s_raw, length);
      const bool duplicate = std::any_of(inv.boundary_minima.begin(), inv.boundary_minima.end(),
                                         [&](const BoundaryMinimum& m) { return cyclic_distance(m.s, s, length) < 1e-9; });
      if (duplicate) continue;
      const BoundaryJet jet = boundary_jet(land, s);
      if (jet.d2f <= 1e-8) {
        std::ostringstream msg;
        msg << "second arclength derivative " << jet.d2f << " at s = " << s;
        throw Error(ErrorCode::DegenerateBoundaryMinimum, msg.str());
      }
      const BoundaryFrame fr = dom.boundary_frame(s);
      BoundaryMinimum bm;
      bm.z = fr.point;
      bm.s = s;
      bm.f_z = jet.f;
      bm.dn_f = land.grad(fr.point).dot(fr.normal);
      bm.det_hess_boundary = jet.d2f;
      inv.boundary_minima.push_back(bm);
    }
  }
  std::stable_sort(inv.boundary_minima.begin(), inv.boundary_minima.end(),
                   [](const BoundaryMinimum& a, const BoundaryMinimum& b) { return a.f_z < b.f_z; });
  for (std::size_t i = 0; i < inv.boundary_minima.size(); ++i)
    inv.boundary_minima[i].basin_id = static_cast<int>(i + 1);
  inv.n0 = static_cast<int>(std::count_if(inv.boundary_minima.begin(), inv.boundary_minima.end(), [&](const BoundaryMinimum& m) {
    return m.f_z - inv.boundary_minima.front().f_z <= kTieTolerance;
  }));
  return inv;
}

int basin_label(const Landscape& land, const CriticalInventory& inv, const Vec& p) {
  const Domain& dom = *land.domain;
  if (dom.kind() == DomainKind::interval) {
    const double s = dom.boundary_coordinate(p);
    for (const auto& m : inv.boundary_minima)
      if (m.s == s) return m.basin_id;
    throw Error(ErrorCode::NoConvergence, "endpoint not in the inventory");
  }
  const double length = dom.boundary_length();
  auto nearest = [&](double s) -> int {
    for (const auto& m : inv.boundary_minima)
      if (cyclic_distance(s, m.s, length) < 1e-6) return m.basin_id;
    return 0;
  };
  double s = dom.boundary_coordinate(p);
  if (int id = nearest(s)) return id;
  const double cap = length / 1000.0;
  double dt = 1e-2;
  for (int it = 0; it < 200000; ++it) {
    const BoundaryJet jet = boundary_jet(land, s);
    if (std::abs(jet.df) < 1e-13) break;
    const double step = std::clamp(-jet.df * dt, -cap, cap);
    const double next = s + step;
    if (land.f(dom.boundary_frame(next).point) >= jet.f) {
      dt *= 0.5;
      if (dt < 1e-14) break;
      continue;
    }
    s = next;
    dt = std::min(dt * 1.5, 1e3);
    if (int id = nearest(s)) return id;
  }
  std::ostringstream msg;
  msg << "boundary flow stalled at s = " << wrap(s, length) << " (basin-boundary point)";
  throw Error(ErrorCode::NoConvergence, msg.str());
}

std::vector<int> boundary_basin_partition(const Landscape& land, const CriticalInventory& inv, std::size_t n) {
  if (land.domain->kind() == DomainKind::interval) return {1, 2};
  const double ds = land.domain->boundary_length() / static_cast<double>(n);
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = static_cast<double>(k) * ds;
  return boundary_basin_partition(land, inv, s);
}

std::vector<int> boundary_basin_partition(const Landscape& land, const CriticalInventory& inv,
                                          const std::vector<double>& s) {
  const Domain& dom = *land.domain;
  if (dom.kind() == DomainKind::interval) return {1, 2};
  const std::size_t n = s.size();
  if (n < 3) throw Error(ErrorCode::InvalidParams, "need at least 3 boundary samples");
  const double length = dom.boundary_length();
  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) values[k] = land.f(dom.boundary_frame(s[k]).point);
  std::vector<int> label(n, -1);
  auto nearest_min = [&](std::size_t k) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& m : inv.boundary_minima) {
      const double d = cyclic_distance(s[k], m.s, length);
      if (d < best_d) {
        best_d = d;
        best = m.basin_id;
      }
    }
    return best;
  };
  for (std::size_t k = 0; k < n; ++k) {
    const double prev = values[(k + n - 1) % n];
    const double next = values[(k + 1) % n];
    if (values[k] > prev && values[k] > next) label[k] = 0;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (label[k] != -1) continue;
    std::vector<std::size_t> path;
    std::size_t j = k;
    int result = -1;
    for (std::size_t guard = 0; guard <= n; ++guard) {
      if (label[j] > 0) {
        result = label[j];
        break;
      }
      path.push_back(j);
      const std::size_t jp = (j + n - 1) % n, jn = (j + 1) % n;
      const std::size_t lower = values[jp] < values[jn] ? jp : jn;
      if (values[lower] < values[j]) {
        j = lower;
      } else {
        result = nearest_min(j);
        break;
      }
    }
    for (std::size_t q : path)
      if (label[q] != 0) label[q] = result;
  }
  return label;
}

// ---------------------------------------------------------------- hypotheses

bool HypothesisReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const HypothesisEntry& e) { return e.pass; });
}

const HypothesisEntry& HypothesisReport::entry(std::string_view id) const {
  for (const auto& e : entries)
    if (e.id == id) return e;
  throw Error(ErrorCode::InvalidParams, "no hypothesis entry '" + std::string(id) + "'");
}

namespace {

struct BoundaryScan {
  double min_f = std::numeric_limits<double>::infinity();
  double min_dn_f = std::numeric_limits<double>::infinity();
  int degenerate_points = 0;
  std::vector<double> degenerate_s;
};

BoundaryScan scan_boundary(const Landscape& land, std::size_t n) {
  const Domain& dom = *land.domain;
  BoundaryScan scan;
  if (dom.kind() == DomainKind::interval) {
    for (double s : {0.0, 1.0}) {
      const BoundaryFrame fr = dom.boundary_frame(s);
      scan.min_f = std::min(scan.min_f, land.f(fr.point));
      scan.min_dn_f = std::min(scan.min_dn_f, land.grad(fr.point).dot(fr.normal));
    }
    return scan;
  }
  const double length = dom.boundary_length();
  const double ds = length / static_cast<double>(n);
  std::vector<double> df(n);
  double max_abs_df = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const BoundaryFrame fr = dom.boundary_frame(k * ds);
    const Vec g = land.grad(fr.point);
    scan.min_f = std::min(scan.min_f, land.f(fr.point));
    scan.min_dn_f = std::min(scan.min_dn_f, g.dot(fr.normal));
    df[k] = g.dot(fr.tangent);
    max_abs_df = std::max(max_abs_df, std::abs(df[k]));
  }
  auto record = [&](double s) {
    s = wrap(s, length);
    for (double t : scan.degenerate_s)
      if (cyclic_distance(s, t, length) < 2 * ds) return;
    scan.degenerate_s.push_back(s);
    ++scan.degenerate_points;
  };
  for (std::size_t k = 0; k < n; ++k) {
    const double a = df[k], b = df[(k + 1) % n];
    const double s0 = k * ds;
    if ((a < 0 && b > 0) || (a > 0 && b < 0)) {
      // Critical point of f on the boundary: bisection on the derivative.
      double lo = s0, hi = s0 + ds, flo = a;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = boundary_jet(land, mid).df;
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      if (std::abs(boundary_jet(land, 0.5 * (lo + hi)).d2f) <= kDegenerateEigenvalue) record(0.5 * (lo + hi));
      continue;
    }
    // A tangency (|f'| touching zero without a sign change) is a degenerate critical point.
    const double prev = df[(k + n - 1) % n];
    const bool same_sign = (prev > 0) == (a > 0) && (a > 0) == (b > 0);
    if (!same_sign || std::abs(a) > std::abs(prev) || std::abs(a) > std::abs(b) ||
        std::abs(a) > 1e-6 * std::max(1.0, max_abs_df))
      continue;
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = s0 - ds, hi = s0 + ds;
    auto absdf = [&](double t) { return std::abs(boundary_jet(land, t).df); };
    for (int it = 0; it < 100; ++it) {
      const double c = hi - r * (hi - lo), d = lo + r * (hi - lo);
      if (absdf(c) < absdf(d))
        hi = d;
      else
        lo = c;
    }
    const BoundaryJet jet = boundary_jet(land, 0.5 * (lo + hi));
    if (std::abs(jet.df) < 1e-9 * std::max(1.0, max_abs_df) && std::abs(jet.d2f) < 1e-6) record(0.5 * (lo + hi));
  }
  return scan;
}

}  // namespace

HypothesisReport check_hypotheses(const Landscape& land, const HypothesisOptions& options) {
  HypothesisReport report;
  const auto seeds = default_seeds(*land.domain, options.seeds_per_axis);
  report.critical_points = find_critical_points(land, seeds);

  int degenerate_interior = 0;
  for (const auto& cp : report.critical_points)
    if (std::abs(cp.min_eigenvalue) <= kDegenerateEigenvalue || std::abs(cp.max_eigenvalue) <= kDegenerateEigenvalue)
      ++degenerate_interior;
  const BoundaryScan scan = scan_boundary(land, options.boundary_samples);

  std::optional<CriticalPoint> x0;
  std::string x0_problem;
  try {
    x0 = find_interior_minimum(land, seeds);
  } catch (const Error& e) {
    x0_problem = e.what();
  }

  std::string inventory_problem;
  if (x0) {
    try {
      report.inventory = find_boundary_minima(land, options.grid_resolution, *x0);
    } catch (const Error& e) {
      inventory_problem = e.what();
    }
  }

  {
    HypothesisEntry h1{"H1", true, 0.0, ""};
    std::ostringstream detail;
    if (degenerate_interior > 0) {
      h1.pass = false;
      detail << degenerate_interior << " degenerate interior critical point(s); ";
    }
    if (scan.degenerate_points > 0) {
      h1.pass = false;
      detail << scan.degenerate_points << " degenerate critical point(s) of f on the boundary; ";
    }
    if (!inventory_problem.empty() && inventory_problem.find("DegenerateBoundaryMinimum") != std::string::npos) {
      h1.pass = false;
      detail << inventory_problem << "; ";
    }
    h1.value = static_cast<double>(degenerate_interior + scan.degenerate_points);
    h1.detail = h1.pass ? "all critical points found are nondegenerate" : detail.str();
    report.entries.push_back(h1);
  }
  {
    HypothesisEntry h2{"H2", false, 0.0, ""};
    if (!x0) {
      h2.detail = x0_problem;
    } else {
      h2.value = scan.min_f - x0->f;
      h2.pass = h2.value > 0.0;
      std::ostringstream detail;
      detail << "min over boundary of f minus f(x0) = " << h2.value;
      h2.detail = detail.str();
    }
    report.entries.push_back(h2);
  }
  {
    HypothesisEntry h3{"H3", scan.min_dn_f > 0.0, scan.min_dn_f, ""};
    std::ostringstream detail;
    detail << "min normal derivative over boundary samples = " << scan.min_dn_f;
    h3.detail = detail.str();
    report.entries.push_back(h3);
  }
  return report;
}

void write_inventory_csv(const CriticalInventory& inv, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"i", "z_x", "z_y", "f_z", "dn_f", "det_hess_boundary", "basin_id"});
  for (std::size_t i = 0; i < inv.boundary_minima.size(); ++i) {
    const auto& m = inv.boundary_minima[i];
    csv.field(i + 1).field(m.z[0]).field(m.z.size() > 1 ? m.z[1] : std::nan(""));
    csv.field(m.f_z).field(m.dn_f).field(m.det_hess_boundary).field(m.basin_id);
    csv.end_row();
  }
}

}  // namespace exitlab

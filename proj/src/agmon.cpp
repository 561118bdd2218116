#include "exitlab/agmon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <sstream>

namespace exitlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOnBoundary = 1e-9;

double full_g(const Landscape& land, const Vec& p) { return land.grad(p).norm(); }

double tangential_g(const Landscape& land, const Vec& p) {
  if (land.dimension() == 1) return 0.0;
  return tangential_gradient(land, p).norm();
}

bool in_closure(const Domain& dom, const Vec& p) { return dom.contains(p) || dom.boundary_distance(p) <= kOnBoundary; }

/// True when the segment [a, b] stays in the closed domain (checked by sampling).
bool segment_admissible(const Domain& dom, const Vec& a, const Vec& b, double spacing) {
  const double len = (b - a).norm();
  if (len == 0.0) return in_closure(dom, a);
  const double da = -dom.boundary_distance(a);
  const double db = -dom.boundary_distance(b);
  // Every point of the segment is within len/2 of an endpoint.
  if (da > 0.5 * len && db > 0.5 * len) return true;
  const int m = std::max(8, static_cast<int>(std::ceil(len / (spacing / 8.0))));
  for (int k = 0; k <= m; ++k) {
    const Vec p = a + (b - a) * (static_cast<double>(k) / m);
    if (dom.boundary_distance(p) > kOnBoundary && !dom.contains(p)) return false;
  }
  return true;
}

struct Simpson {
  double value;
  double error;
};

Simpson simpson3(double len, double ga, double gm, double gb) {
  const double s = len / 6.0 * (ga + 4.0 * gm + gb);
  const double t = len / 2.0 * (ga + gb);
  return {s, std::abs(s - t)};
}

double cyclic_gap(double a, double b, double length) {
  double d = std::fmod(std::abs(a - b), length);
  return std::min(d, length - d);
}

}  // namespace

double path_length(const std::vector<Vec>& path, const Landscape& land, int panels) {
  const Domain& dom = *land.domain;
  if (panels < 2) panels = 2;
  if (panels % 2) ++panels;
  for (const Vec& p : path)
    if (p.size() != land.dimension() || !in_closure(dom, p))
      throw Error(ErrorCode::PointOutsideDomain, "path point outside the closed domain");
  double total = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    const Vec& a = path[k - 1];
    const Vec& b = path[k];
    const double len = (b - a).norm();
    if (len == 0.0) continue;
    std::vector<Vec> pts(static_cast<std::size_t>(panels) + 1);
    bool on_boundary = land.dimension() > 1;
    for (int j = 0; j <= panels; ++j) {
      pts[static_cast<std::size_t>(j)] = a + (b - a) * (static_cast<double>(j) / panels);
      const double bd = dom.boundary_distance(pts[static_cast<std::size_t>(j)]);
      if (bd > kOnBoundary && !dom.contains(pts[static_cast<std::size_t>(j)]))
        throw Error(ErrorCode::PointOutsideDomain, "path segment leaves the closed domain");
      if (std::abs(bd) > kOnBoundary) on_boundary = false;
    }
    double acc = 0.0;
    for (int j = 0; j <= panels; ++j) {
      const Vec& p = pts[static_cast<std::size_t>(j)];
      const double g = on_boundary ? tangential_g(land, p) : full_g(land, p);
      const double w = (j == 0 || j == panels) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      acc += w * g;
    }
    total += acc * len / (3.0 * panels);
  }
  return total;
}

double boundary_arc_length(const Landscape& land, double s0, double s1, int panels) {
  if (panels < 2) panels = 2;
  if (panels % 2) ++panels;
  const double len = s1 - s0;
  double acc = 0.0;
  for (int j = 0; j <= panels; ++j) {
    const double g = std::abs(boundary_jet(land, s0 + len * j / panels).df);
    const double w = (j == 0 || j == panels) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    acc += w * g;
  }
  return std::abs(acc * len / (3.0 * panels));
}

// ---------------------------------------------------------------------- mesh

AgmonMesh::AgmonMesh(const Landscape& land, double resolution, bool unit_weights) : land_(&land), res_(resolution) {
  if (!(resolution > 0.0)) throw Error(ErrorCode::InvalidParams, "resolution must be positive");
  const Domain& dom = *land.domain;
  const auto [lo, hi] = dom.bounding_box();
  const int d = land.dimension();
  auto add_node = [&](const Vec& p, bool boundary) {
    nodes_.push_back(p);
    boundary_.push_back(boundary ? 1 : 0);
    const double g = boundary ? tangential_g(land, p) : full_g(land, p);
    g_.push_back(g);
    max_g_ = std::max(max_g_, g);
    adj_.emplace_back();
    return static_cast<int>(nodes_.size()) - 1;
  };
  auto interior_edge = [&](int a, int b) {
    const Vec& pa = nodes_[static_cast<std::size_t>(a)];
    const Vec& pb = nodes_[static_cast<std::size_t>(b)];
    const double len = (pb - pa).norm();
    if (unit_weights) {
      add_edge(a, b, len, 0.0);
      return;
    }
    const Simpson s = simpson3(len, full_g(land, pa), full_g(land, 0.5 * (pa + pb)), full_g(land, pb));
    add_edge(a, b, s.value, s.error);
  };

  if (d == 1) {
    std::vector<std::pair<double, bool>> xs;
    const auto i0 = static_cast<long>(std::ceil(lo[0] / res_));
    const auto i1 = static_cast<long>(std::floor(hi[0] / res_));
    for (long i = i0; i <= i1; ++i) {
      const double x = static_cast<double>(i) * res_;
      if (dom.contains(vec1(x))) xs.emplace_back(x, false);
    }
    xs.emplace_back(lo[0], true);
    xs.emplace_back(hi[0], true);
    std::sort(xs.begin(), xs.end());
    for (const auto& [x, b] : xs) add_node(vec1(x), b);
    for (int k = 1; k < static_cast<int>(nodes_.size()); ++k) interior_edge(k - 1, k);
    return;
  }
  if (d != 2) throw Error(ErrorCode::InvalidParams, "Agmon meshes are implemented for d = 1 and d = 2");

  const auto i0 = static_cast<long>(std::ceil(lo[0] / res_)), i1 = static_cast<long>(std::floor(hi[0] / res_));
  const auto j0 = static_cast<long>(std::ceil(lo[1] / res_)), j1 = static_cast<long>(std::floor(hi[1] / res_));
  const long nx = i1 - i0 + 1, ny = j1 - j0 + 1;
  std::vector<int> grid(static_cast<std::size_t>(nx * ny), -1);
  auto cell = [&](long i, long j) -> int {
    if (i < i0 || i > i1 || j < j0 || j > j1) return -1;
    return grid[static_cast<std::size_t>((i - i0) * ny + (j - j0))];
  };
  for (long i = i0; i <= i1; ++i)
    for (long j = j0; j <= j1; ++j) {
      const Vec p = vec2(static_cast<double>(i) * res_, static_cast<double>(j) * res_);
      if (dom.contains(p)) grid[static_cast<std::size_t>((i - i0) * ny + (j - j0))] = add_node(p, false);
    }

  // Primitive offsets in a half plane, so each undirected edge is built once.
  std::vector<std::pair<int, int>> offsets;
  for (int dx = 0; dx <= 3; ++dx)
    for (int dy = -3; dy <= 3; ++dy) {
      if (dx == 0 && dy <= 0) continue;
      if (std::gcd(dx, std::abs(dy)) != 1) continue;
      offsets.emplace_back(dx, dy);
    }
  for (long i = i0; i <= i1; ++i)
    for (long j = j0; j <= j1; ++j) {
      const int a = cell(i, j);
      if (a < 0) continue;
      for (const auto& [dx, dy] : offsets) {
        const int b = cell(i + dx, j + dy);
        if (b < 0) continue;
        if (!segment_admissible(dom, nodes_[static_cast<std::size_t>(a)], nodes_[static_cast<std::size_t>(b)], res_))
          continue;
        interior_edge(a, b);
      }
    }

  if (!dom.has_boundary_param()) return;
  const double length = dom.boundary_length();
  const auto count = static_cast<long>(std::ceil(length / res_ - 1e-9));
  for (long k = 0; k < count; ++k) {
    const double s = static_cast<double>(k) * res_;
    chain_s_.push_back(s);
    chain_nodes_.push_back(add_node(dom.boundary_frame(s).point, true));
  }
  for (std::size_t k = 0; k < chain_nodes_.size(); ++k) {
    const double s0 = chain_s_[k];
    const double s1 = k + 1 < chain_s_.size() ? chain_s_[k + 1] : length;
    if (unit_weights) {
      // Arclength, which is at least the chord.
      add_edge(chain_nodes_[k], chain_nodes_[(k + 1) % chain_nodes_.size()], s1 - s0, 0.0);
      continue;
    }
    const Simpson s = simpson3(s1 - s0, std::abs(boundary_jet(land, s0).df),
                               std::abs(boundary_jet(land, 0.5 * (s0 + s1)).df), std::abs(boundary_jet(land, s1).df));
    add_edge(chain_nodes_[k], chain_nodes_[(k + 1) % chain_nodes_.size()], s.value, s.error);
  }
  for (int b : chain_nodes_) {
    const Vec pb = nodes_[static_cast<std::size_t>(b)];
    const auto ci = static_cast<long>(std::floor(pb[0] / res_));
    const auto cj = static_cast<long>(std::floor(pb[1] / res_));
    for (long i = ci - 2; i <= ci + 3; ++i)
      for (long j = cj - 2; j <= cj + 3; ++j) {
        const int a = cell(i, j);
        if (a < 0) continue;
        const Vec& pa = nodes_[static_cast<std::size_t>(a)];
        if ((pa - pb).norm() > 2.0 * res_ * (1.0 + 1e-12)) continue;
        if (!segment_admissible(dom, pb, pa, res_)) continue;
        interior_edge(b, a);
      }
  }
}

void AgmonMesh::add_edge(int a, int b, double w, double err) {
  adj_[static_cast<std::size_t>(a)].push_back({b, w, err});
  adj_[static_cast<std::size_t>(b)].push_back({a, w, err});
}

std::size_t AgmonMesh::edge_count() const {
  std::size_t total = 0;
  for (const auto& row : adj_) total += row.size();
  return total / 2;
}

int AgmonMesh::nearest_node(const Vec& p) const {
  std::vector<int> order(nodes_.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> d2(nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) d2[k] = (nodes_[k] - p).squaredNorm();
  const std::size_t take = std::min<std::size_t>(64, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](int a, int b) { return d2[static_cast<std::size_t>(a)] < d2[static_cast<std::size_t>(b)]; });
  for (std::size_t k = 0; k < take; ++k)
    if (segment_admissible(*land_->domain, p, nodes_[static_cast<std::size_t>(order[k])], res_)) return order[k];
  throw Error(ErrorCode::Disconnected, "no mesh node is visible from the point; refine the resolution");
}

// ------------------------------------------------------------------ dijkstra

ShortestPath shortest_path(const AgmonMesh& mesh, const std::vector<std::pair<int, double>>& sources,
                           const std::function<bool(int)>& is_target) {
  const std::size_t n = mesh.size();
  std::vector<double> dist(n, kInf), qerr(n, 0.0);
  std::vector<int> parent(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (const auto& [s, c] : sources) {
    if (c < dist[static_cast<std::size_t>(s)]) {
      dist[static_cast<std::size_t>(s)] = c;
      queue.emplace(c, s);
    }
  }
  ShortestPath result;
  while (!queue.empty()) {
    const auto [du, u] = queue.top();
    queue.pop();
    if (du > dist[static_cast<std::size_t>(u)]) continue;
    if (is_target(u)) {
      result.target = u;
      result.length = du;
      result.quad_err = qerr[static_cast<std::size_t>(u)];
      for (int v = u; v >= 0; v = parent[static_cast<std::size_t>(v)]) result.nodes.push_back(v);
      std::reverse(result.nodes.begin(), result.nodes.end());
      return result;
    }
    for (const auto& e : mesh.edges(u)) {
      const double nd = du + e.w;
      if (nd < dist[static_cast<std::size_t>(e.to)]) {
        dist[static_cast<std::size_t>(e.to)] = nd;
        parent[static_cast<std::size_t>(e.to)] = u;
        qerr[static_cast<std::size_t>(e.to)] = qerr[static_cast<std::size_t>(u)] + e.quad_err;
        queue.emplace(nd, e.to);
      }
    }
  }
  return result;
}

std::vector<double> distances_from(const AgmonMesh& mesh, const std::vector<std::pair<int, double>>& sources) {
  const std::size_t n = mesh.size();
  std::vector<double> dist(n, kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (const auto& [s, c] : sources)
    if (c < dist[static_cast<std::size_t>(s)]) {
      dist[static_cast<std::size_t>(s)] = c;
      queue.emplace(c, s);
    }
  while (!queue.empty()) {
    const auto [du, u] = queue.top();
    queue.pop();
    if (du > dist[static_cast<std::size_t>(u)]) continue;
    for (const auto& e : mesh.edges(u)) {
      const double nd = du + e.w;
      if (nd < dist[static_cast<std::size_t>(e.to)]) {
        dist[static_cast<std::size_t>(e.to)] = nd;
        queue.emplace(nd, e.to);
      }
    }
  }
  return dist;
}

DistanceBound distance_upper(const AgmonMesh& mesh, const Vec& x, const Vec& y) {
  const Landscape& land = mesh.landscape();
  const Domain& dom = *land.domain;
  if (!in_closure(dom, x) || !in_closure(dom, y))
    throw Error(ErrorCode::PointOutsideDomain, "endpoint outside the closed domain");
  DistanceBound out;
  out.lower = std::abs(land.f(x) - land.f(y));
  const int nx = mesh.nearest_node(x);
  const int ny = mesh.nearest_node(y);
  const double snap_x = path_length({x, mesh.node(nx)}, land);
  const double snap_y = path_length({mesh.node(ny), y}, land);
  const ShortestPath sp = shortest_path(mesh, {{nx, 0.0}}, [ny](int u) { return u == ny; });
  if (sp.target < 0) throw Error(ErrorCode::Disconnected, "the mesh does not connect the two points");
  out.snap_error = snap_x + snap_y;
  out.graph_upper = snap_x + sp.length + snap_y;
  out.quadrature_error = sp.quad_err;
  out.witness.push_back(x);
  for (int v : sp.nodes)
    if ((mesh.node(v) - out.witness.back()).norm() > 0.0) out.witness.push_back(mesh.node(v));
  if ((y - out.witness.back()).norm() > 0.0) out.witness.push_back(y);
  out.upper = out.graph_upper;
  if (segment_admissible(dom, x, y, mesh.resolution())) {
    const double direct = path_length({x, y}, land);
    if (direct < out.upper) {
      out.upper = direct;
      out.witness = {x, y};
      out.quadrature_error = 0.0;
    }
  }
  for (std::size_t k = 1; k < out.witness.size(); ++k) out.witness_length += (out.witness[k] - out.witness[k - 1]).norm();
  return out;
}

DistanceBound distance_upper(const Landscape& land, const Vec& x, const Vec& y, double resolution) {
  if ((x - y).norm() == 0.0) {
    if (!in_closure(*land.domain, x)) throw Error(ErrorCode::PointOutsideDomain, "endpoint outside the closed domain");
    DistanceBound out;
    out.witness = {x};
    return out;
  }
  const AgmonMesh mesh(land, resolution);
  return distance_upper(mesh, x, y);
}

// ------------------------------------------------------------------- annulus

namespace {

double golden_min(const std::function<double(double)>& fn, double a, double b, int iterations = 80) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int it = 0; it < iterations; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = fn(d);
    }
  }
  return std::min(fc, fd);
}

}  // namespace

AnnulusBound lower_bound_annulus(const Landscape& land, const Vec& z, double r_in, double r_out,
                                 const std::vector<Vec>& B, const AnnulusOptions& opt) {
  const Domain& dom = *land.domain;
  const int d = land.dimension();
  if (!(r_out > r_in) || r_in < 0.0) throw Error(ErrorCode::AlphaNonPositive, "need 0 <= r_inner < r_outer");
  for (const Vec& b : B)
    if ((b - z).norm() <= r_out)
      throw Error(ErrorCode::PreconditionViolated, "the set B meets the outer neighbourhood W'");

  AnnulusBound out;
  out.inf_g = kInf;
  auto in_annulus = [&](const Vec& p) {
    const double r = (p - z).norm();
    return r >= r_in && r <= r_out;
  };
  auto consider = [&](const Vec& p, double g) {
    if (g < out.inf_g) {
      out.inf_g = g;
      out.argmin = p;
    }
  };

  if (d == 1) {
    for (int sign : {-1, 1})
      for (int k = 0; k <= opt.radial_samples * 16; ++k) {
        const Vec p = vec1(z[0] + sign * (r_in + (r_out - r_in) * k / (opt.radial_samples * 16.0)));
        if (dom.contains(p)) consider(p, full_g(land, p));
      }
    const auto [lo, hi] = dom.bounding_box();
    for (const Vec& e : {lo, hi})
      if (in_annulus(e)) consider(e, 0.0);
  } else {
    // Interior: polar grid, then alternating golden-section refinement.
    double best_r = -1.0, best_t = 0.0, best_g = kInf;
    for (int ir = 0; ir <= opt.radial_samples; ++ir)
      for (int it = 0; it < opt.angular_samples; ++it) {
        const double r = r_in + (r_out - r_in) * ir / opt.radial_samples;
        const double t = 2.0 * std::numbers::pi * it / opt.angular_samples;
        const Vec p = z + r * vec2(std::cos(t), std::sin(t));
        if (!dom.contains(p)) continue;
        const double g = full_g(land, p);
        consider(p, g);
        if (g < best_g) {
          best_g = g;
          best_r = r;
          best_t = t;
        }
      }
    if (best_r >= 0.0) {
      auto g_at = [&](double r, double t) {
        const Vec p = z + r * vec2(std::cos(t), std::sin(t));
        return dom.contains(p) ? full_g(land, p) : kInf;
      };
      const double dt = 2.0 * std::numbers::pi / opt.angular_samples;
      const double dr = (r_out - r_in) / opt.radial_samples;
      for (int round = 0; round < 3; ++round) {
        best_g = std::min(best_g, golden_min([&](double r) { return g_at(r, best_t); }, std::max(r_in, best_r - dr),
                                             std::min(r_out, best_r + dr)));
        best_g = std::min(best_g,
                          golden_min([&](double t) { return g_at(best_r, t); }, best_t - dt, best_t + dt));
      }
      if (best_g < out.inf_g) out.inf_g = best_g;
    }
    // Boundary: samples in the annulus, the exact circle crossings, and a refinement.
    if (dom.has_boundary_param()) {
      const double length = dom.boundary_length();
      const std::size_t n = opt.boundary_samples;
      const double ds = length / static_cast<double>(n);
      auto point = [&](double s) { return dom.boundary_frame(s).point; };
      auto gt = [&](double s) { return std::abs(boundary_jet(land, s).df); };
      double best_s = -1.0, best_gt = kInf;
      for (std::size_t k = 0; k < n; ++k) {
        const double s = static_cast<double>(k) * ds;
        const Vec p = point(s);
        if (in_annulus(p)) {
          const double g = gt(s);
          consider(p, g);
          if (g < best_gt) {
            best_gt = g;
            best_s = s;
          }
        }
        const double s1 = s + ds;
        const double ra = (p - z).norm(), rb = (point(s1) - z).norm();
        for (double radius : {r_in, r_out}) {
          if ((ra - radius) * (rb - radius) > 0.0) continue;
          double lo = s, hi = s1;
          const bool rising = ra < rb;
          for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            const bool below = (point(mid) - z).norm() < radius;
            ((below == rising) ? lo : hi) = mid;
          }
          const double sc = 0.5 * (lo + hi);
          consider(point(sc), gt(sc));
        }
      }
      if (best_s >= 0.0) {
        const double refined = golden_min(
            [&](double s) { return in_annulus(point(s)) ? gt(s) : kInf; }, best_s - ds, best_s + ds);
        if (refined < out.inf_g) {
          out.inf_g = refined;
        }
      }
    }
  }
  if (!std::isfinite(out.inf_g)) throw Error(ErrorCode::EmptyAnnulus, "no point of the closed domain in the annulus");

  // alpha: r_outer - r_inner when W' is convex, else unit-weight mesh geodesics.
  std::vector<Vec> pts;
  if (d == 1) {
    for (int k = 0; k <= 200; ++k) {
      const Vec p = vec1(z[0] - r_out + 2.0 * r_out * k / 200.0);
      if (in_closure(dom, p)) pts.push_back(p);
    }
  } else {
    for (int i = 0; i <= 24; ++i)
      for (int j = 0; j <= 24; ++j) {
        const Vec p = z + vec2(-r_out + 2.0 * r_out * i / 24.0, -r_out + 2.0 * r_out * j / 24.0);
        if ((p - z).norm() <= r_out && in_closure(dom, p)) pts.push_back(p);
      }
  }
  out.convex = true;
  for (std::size_t a = 0; a < pts.size() && out.convex; ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      if (!segment_admissible(dom, pts[a], pts[b], 0.25 * r_out)) {
        out.convex = false;
        break;
      }
  if (out.convex) {
    out.alpha = r_out - r_in;
  } else {
    const AgmonMesh mesh(land, opt.mesh_resolution, true);
    std::vector<std::pair<int, double>> sources;
    for (int k = 0; k < static_cast<int>(mesh.size()); ++k)
      if ((mesh.node(k) - z).norm() <= r_in) sources.emplace_back(k, 0.0);
    if (sources.empty()) sources.emplace_back(mesh.nearest_node(z), 0.0);
    const ShortestPath sp =
        shortest_path(mesh, sources, [&](int u) { return (mesh.node(u) - z).norm() > r_out; });
    out.alpha = sp.target >= 0 ? sp.length : kInf;
  }
  if (!(out.alpha > 0.0)) throw Error(ErrorCode::AlphaNonPositive, "alpha is not positive");
  out.value = std::isfinite(out.alpha) ? out.alpha * out.inf_g : 0.0;
  return out;
}

// --------------------------------------------------------------- hypotheses

std::string_view to_string(Hypo1Method m) {
  switch (m) {
    case Hypo1Method::automatic: return "auto";
    case Hypo1Method::annulus: return "annulus";
    case Hypo1Method::agmonz1: return "agmonz1";
    case Hypo1Method::dijkstra: return "dijkstra";
  }
  return "unknown";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

Hypo1Method parse_hypo1_method(std::string_view name) {
  for (auto m : {Hypo1Method::automatic, Hypo1Method::annulus, Hypo1Method::agmonz1, Hypo1Method::dijkstra})
    if (to_string(m) == name) return m;
  throw Error(ErrorCode::UnknownName, "unknown hypo1 method '" + std::string(name) + "'");
}

Verdict Hypo1Report::overall() const {
  bool all_pass = !entries.empty();
  bool any_fail = false;
  for (const auto& e : entries) {
    if (e.verdict != Verdict::pass) all_pass = false;
    if (e.verdict == Verdict::fail) any_fail = true;
  }
  if (all_pass) return Verdict::pass;
  return any_fail ? Verdict::fail : Verdict::inconclusive;
}

namespace {

constexpr double kBand = 1e-6;

Verdict lower_bound_verdict(double lower, double threshold) {
  if (lower > threshold + kBand) return Verdict::pass;
  if (lower > threshold) return Verdict::inconclusive;
  return Verdict::fail;
}

}  // namespace

Hypo1Report check_hypo1(const Landscape& land, const CriticalInventory& inv, Hypo1Method method,
                        const Hypo1Options& opt) {
  Hypo1Report report;
  const int n = static_cast<int>(inv.n());
  const double f1 = inv.z(1).f_z, fn = inv.z(n).f_z;

  if (land.dimension() == 1) {
    // d_a(z_i, z_j) = int |f'| = (f(z_i) - f(x0)) + (f(z_j) - f(x0)) through x0.
    for (int i = 1; i <= n; ++i) {
      Hypo1Entry e;
      e.i = i;
      e.threshold = std::max(fn - inv.z(i).f_z, inv.z(i).f_z - f1);
      const int j = n == 1 ? i : (i == 1 ? 2 : 1);
      e.lower = e.upper = (inv.z(i).f_z - inv.f_x0) + (inv.z(j).f_z - inv.f_x0);
      e.verdict = lower_bound_verdict(e.lower, e.threshold);
      e.certified = true;
      e.method = "exact-1d";
      report.entries.push_back(e);
    }
    return report;
  }

  const Domain& dom = *land.domain;
  const double length = dom.boundary_length();
  const std::size_t ns = opt.boundary_samples;
  std::vector<double> s_samples(ns);
  for (std::size_t k = 0; k < ns; ++k) s_samples[k] = length * static_cast<double>(k) / static_cast<double>(ns);
  const std::vector<int> labels = boundary_basin_partition(land, inv, s_samples);
  std::unique_ptr<AgmonMesh> mesh;
  std::vector<int> chain_labels;

  for (int i = 1; i <= n; ++i) {
    const BoundaryMinimum& zi = inv.z(i);
    Hypo1Entry e;
    e.i = i;
    e.threshold = std::max(fn - zi.f_z, zi.f_z - f1);
    e.upper = kInf;
    std::ostringstream detail;
    std::vector<Vec> complement;
    for (std::size_t k = 0; k < ns; ++k)
      if (labels[k] != zi.basin_id) complement.push_back(dom.boundary_frame(s_samples[k]).point);
    if (complement.empty()) {
      e.verdict = Verdict::pass;
      e.certified = true;
      e.lower = kInf;
      e.method = "empty-complement";
      report.entries.push_back(e);
      continue;
    }
    bool decided = false;
    Verdict fallback = Verdict::inconclusive;

    if (method == Hypo1Method::annulus || method == Hypo1Method::automatic) {
      try {
        const AnnulusBound ab = lower_bound_annulus(land, zi.z, opt.r_inner, opt.r_outer, complement, opt.annulus);
        e.lower = ab.value;
        e.method = "annulus";
        const Verdict v = lower_bound_verdict(ab.value, e.threshold);
        detail << "annulus alpha=" << ab.alpha << " inf_g=" << ab.inf_g << " bound=" << ab.value << "; ";
        if (v == Verdict::pass || method == Hypo1Method::annulus) {
          e.verdict = v;
          e.certified = v == Verdict::pass;
          decided = true;
        } else {
          fallback = Verdict::inconclusive;
        }
      } catch (const Error& err) {
        detail << "annulus not applicable (" << err.what() << "); ";
        if (method == Hypo1Method::annulus) {
          e.verdict = Verdict::inconclusive;
          e.method = "annulus";
          decided = true;
        }
      }
    }

    if (!decided && (method == Hypo1Method::agmonz1 || method == Hypo1Method::automatic)) {
      bool applicable = n == 2 && i == 1 && opt.morse_and_outward;
      if (applicable) {
        // z_2 must be the only global minimum of f on the complement of B_{z_1}.
        const BoundaryMinimum& z2 = inv.z(2);
        const double ds = length / static_cast<double>(ns);
        for (std::size_t k = 0; k < ns && applicable; ++k) {
          if (labels[k] == zi.basin_id) continue;
          const double fk = land.f(dom.boundary_frame(s_samples[k]).point);
          if (fk <= z2.f_z + 1e-9 && cyclic_gap(s_samples[k], z2.s, length) > 3.0 * ds) applicable = false;
        }
        if (applicable) {
          e.lower = inv.z(2).f_z - f1;
          e.verdict = Verdict::pass;
          e.certified = true;
          e.method = "agmonz1";
          detail << "z2 is the only global minimum of f on the complement of the basin; strict bound d > f(z2)-f(z1)";
          decided = true;
        }
      }
      if (!decided) {
        detail << "agmonz1 not applicable; ";
        if (method == Hypo1Method::agmonz1) {
          e.verdict = Verdict::inconclusive;
          e.method = "agmonz1";
          decided = true;
        }
      }
    }

    if (!decided && (method == Hypo1Method::dijkstra || method == Hypo1Method::automatic)) {
      if (!mesh) {
        mesh = std::make_unique<AgmonMesh>(land, opt.resolution);
        chain_labels = boundary_basin_partition(land, inv, mesh->chain_s());
      }
      std::vector<char> candidate(mesh->size(), 0);
      for (std::size_t k = 0; k < mesh->chain_nodes().size(); ++k)
        if (chain_labels[k] != zi.basin_id) candidate[static_cast<std::size_t>(mesh->chain_nodes()[k])] = 1;
      const int src = mesh->nearest_node(zi.z);
      const double snap = path_length({zi.z, mesh->node(src)}, land);
      const ShortestPath sp = shortest_path(*mesh, {{src, snap}}, [&](int u) {
        if (!candidate[static_cast<std::size_t>(u)]) return false;
        try {
          return basin_label(land, inv, mesh->node(u)) != zi.basin_id;
        } catch (const Error&) {
          return true;  // on a basin boundary, hence outside the open basin
        }
      });
      e.method = e.method.empty() ? "dijkstra" : e.method + "+dijkstra";
      if (sp.target >= 0) {
        e.upper = sp.length;
        detail << "graph upper bound " << sp.length << " reached (" << mesh->node(sp.target).transpose() << ")";
        if (sp.length < e.threshold) {
          e.verdict = Verdict::fail;
          e.certified = true;
          decided = true;
        }
      } else {
        detail << "mesh did not reach the basin complement";
      }
      if (!decided) e.verdict = method == Hypo1Method::dijkstra ? Verdict::inconclusive : fallback;
      decided = true;
    }
    e.detail = detail.str();
    report.entries.push_back(e);
  }
  return report;
}

Hypo2Result check_hypo2(const CriticalInventory& inv) {
  Hypo2Result r;
  const double f1 = inv.z(1).f_z;
  const double fn = inv.z(static_cast<int>(inv.n())).f_z;
  r.margin = f1 - inv.f_x0 - (fn - f1);
  r.pass = r.margin > 0.0;
  return r;
}

}  // namespace exitlab

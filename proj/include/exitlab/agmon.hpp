#pragma once

// Agmon distance: the geodesic distance of the degenerate metric g |dx|, with
// g = |grad f| inside the domain and g = |grad_T f| (tangential gradient) on
// its boundary.
//
// Upper bounds come from shortest paths on a graph whose edges are straight
// segments (every graph path is an admissible curve). Lower bounds come from
// |f(x) - f(y)| and from the annulus argument: any curve from W to the
// outside of W' crosses W' \ W, so its length is at least
// alpha * inf_{W' \ W} g.

#include "exitlab/landscape.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace exitlab {

/// Length of a polygonal path. Segments lying on a straight piece of the
/// boundary use |grad_T f|, all others |grad f|; each segment is integrated
/// by composite Simpson. Throws PointOutsideDomain.
double path_length(const std::vector<Vec>& path, const Landscape& land, int panels_per_segment = 64);

/// int |d/ds f(gamma(s))| ds over the boundary arc [s0, s1] (d = 2).
double boundary_arc_length(const Landscape& land, double s0, double s1, int panels = 64);

struct AgmonEdge {
  int to = 0;
  double w = 0.0;
  double quad_err = 0.0;  ///< |Simpson - trapezoid| on the edge
};

/// Lattice nodes (spacing `resolution`, aligned to integer multiples so that
/// halving the resolution nests the lattices) inside the domain, boundary
/// chain nodes at arclength spacing `resolution`, and straight edges:
/// lattice-to-lattice along the primitive offsets with max(|i|,|j|) <= 3,
/// consecutive chain nodes along the boundary, and ladder edges from each
/// chain node to lattice nodes within two spacings. Edges are kept only when
/// the segment stays in the closed domain.
class AgmonMesh {
 public:
  AgmonMesh(const Landscape& land, double resolution, bool unit_weights = false);

  const Landscape& landscape() const { return *land_; }
  double resolution() const { return res_; }
  std::size_t size() const { return nodes_.size(); }
  const Vec& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  bool is_boundary(int i) const { return boundary_[static_cast<std::size_t>(i)] != 0; }
  /// g at a node: |grad_T f| on boundary nodes, |grad f| elsewhere.
  double g(int i) const { return g_[static_cast<std::size_t>(i)]; }
  double max_g() const { return max_g_; }
  const std::vector<AgmonEdge>& edges(int i) const { return adj_[static_cast<std::size_t>(i)]; }
  std::size_t edge_count() const;
  /// Boundary coordinate of each chain node (in chain order).
  const std::vector<double>& chain_s() const { return chain_s_; }
  const std::vector<int>& chain_nodes() const { return chain_nodes_; }

  /// Nearest node joined to p by a segment inside the closed domain.
  int nearest_node(const Vec& p) const;

 private:
  void add_edge(int a, int b, double w, double err);

  const Landscape* land_;
  double res_;
  std::vector<Vec> nodes_;
  std::vector<char> boundary_;
  std::vector<double> g_;
  std::vector<std::vector<AgmonEdge>> adj_;
  std::vector<double> chain_s_;
  std::vector<int> chain_nodes_;
  double max_g_ = 0.0;
};

struct ShortestPath {
  int target = -1;  ///< -1 when no target was reached
  double length = 0.0;
  double quad_err = 0.0;
  std::vector<int> nodes;
};

/// Dijkstra from the sources (each with an initial cost) until a node
/// accepted by is_target is settled. is_target may be called lazily and more
/// than once per node.
ShortestPath shortest_path(const AgmonMesh& mesh, const std::vector<std::pair<int, double>>& sources,
                           const std::function<bool(int)>& is_target);

/// Graph distances from the sources to every node (infinity if unreachable).
std::vector<double> distances_from(const AgmonMesh& mesh, const std::vector<std::pair<int, double>>& sources);

struct DistanceBound {
  double lower = 0.0;  ///< |f(x) - f(y)|
  double upper = 0.0;  ///< min(graph_upper, straight segment when admissible)
  double graph_upper = 0.0;
  std::vector<Vec> witness;
  double witness_length = 0.0;  ///< Euclidean length of the witness
  double snap_error = 0.0;      ///< Agmon length of the two snap segments
  double quadrature_error = 0.0;
};

/// Throws PointOutsideDomain and Disconnected.
DistanceBound distance_upper(const AgmonMesh& mesh, const Vec& x, const Vec& y);
DistanceBound distance_upper(const Landscape& land, const Vec& x, const Vec& y, double resolution);

struct AnnulusBound {
  double value = 0.0;  ///< alpha * inf_g
  double alpha = 0.0;
  double inf_g = 0.0;
  Vec argmin;
  bool convex = true;  ///< alpha = r_outer - r_inner
};

struct AnnulusOptions {
  int radial_samples = 64;
  int angular_samples = 720;
  std::size_t boundary_samples = 20000;
  double mesh_resolution = 0.02;  ///< for alpha when W' is not convex
};

/// Lower bound K with inf_{y in B} d_a(z, y) > K, for W, W' the closed
/// Euclidean balls of radii r_inner < r_outer around z, intersected with the
/// closed domain. Throws PreconditionViolated when a point of B lies in W',
/// EmptyAnnulus and AlphaNonPositive.
AnnulusBound lower_bound_annulus(const Landscape& land, const Vec& z, double r_inner, double r_outer,
                                 const std::vector<Vec>& B, const AnnulusOptions& options = {});

enum class Hypo1Method { automatic, annulus, agmonz1, dijkstra };
enum class Verdict { pass, fail, inconclusive };

std::string_view to_string(Hypo1Method m);
std::string_view to_string(Verdict v);
Hypo1Method parse_hypo1_method(std::string_view name);

struct Hypo1Entry {
  int i = 0;
  double threshold = 0.0;  ///< max(f(z_n) - f(z_i), f(z_i) - f(z_1))
  double lower = 0.0;      ///< certified lower bound (0 when none)
  double upper = 0.0;      ///< graph upper bound (infinity when not computed)
  Verdict verdict = Verdict::inconclusive;
  bool certified = false;
  std::string method;
  std::string detail;
};

struct Hypo1Report {
  std::vector<Hypo1Entry> entries;
  Verdict overall() const;
};

struct Hypo1Options {
  double r_inner = 1.0 / 3.0;
  double r_outer = 2.0 / 3.0;
  double resolution = 0.02;
  std::size_t boundary_samples = 4096;
  /// Set to false when H1 or H3 fail; the agmonz1 argument needs both.
  bool morse_and_outward = true;
  AnnulusOptions annulus;
};

/// For each z_i compares a lower bound of inf over the complement of its
/// basin of d_a(., z_i) with the threshold. Bounds within 1e-6 above the
/// threshold are reported inconclusive.
Hypo1Report check_hypo1(const Landscape& land, const CriticalInventory& inv, Hypo1Method method,
                        const Hypo1Options& options = {});

struct Hypo2Result {
  double margin = 0.0;  ///< f(z_1) - f(x0) - (f(z_n) - f(z_1))
  bool pass = false;
};

Hypo2Result check_hypo2(const CriticalInventory& inv);

}  // namespace exitlab

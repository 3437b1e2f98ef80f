#pragma once

// Discrete convexity: eps-segments, the l^{j,eps} iteration and its fixpoint
// co_eps, classical hulls as l^N, the graph G of obstacle components, the
// polygonal set L, and the cross-segment operator T on segment complexes.

#include <string>
#include <vector>

#include "mincurv/core_geometry.hpp"
#include "mincurv/obstacle.hpp"

namespace mincurv {

/// Relative tolerance for |x - y| / eps being an integer.
inline constexpr double kRatioTol = 1e-9;

struct Segment {
  VecN a, b;
};

/// M + 1 equally spaced points from x to y when |x - y| / eps = M is an
/// integer, otherwise {x, y}.
PointSet eps_segment(const VecN& x, const VecN& y, double eps);

/// A together with the eps-segments of all its pairs.
PointSet ell_one_eps(const PointSet& A, double eps);

struct EpsHullResult {
  PointSet points;
  /// Smallest j >= 1 with l^{j,eps}(A) equal to the returned set.
  int iterations = 0;
  bool converged = false;
};

/// Iterates ell_one_eps to a fixpoint or max_iter applications.
EpsHullResult eps_convex_hull(const PointSet& A, double eps, int max_iter = 50);

/// Every commensurable pair of A regenerates only points of A.
bool is_eps_convex(const PointSet& A, double eps);

/// Points of the segment [a, b] at spacing at most delta, endpoints included.
std::vector<VecN> sample_segment(const VecN& a, const VecN& b, double delta);

/// Sampled l^N(A) = co(A): l^1(A) from all pairs, then N - 1 joins with A
/// (every point of co(A) lies in a simplex over at most N + 1 points of A).
/// Intermediate sets are thinned to one point per cell of side delta / 2.
PointSet hull_via_ellN(const PointSet& A, double delta);

/// Vertices of G are connected components of K (overlapping primitives);
/// edges carry a witness segment along which u0 > 0.
struct GraphG {
  struct Edge {
    int u = 0;
    int v = 0;
    Segment witness;
  };
  std::vector<std::vector<int>> components;  // primitive indices
  std::vector<int> component_of;             // per primitive
  std::vector<Edge> edges;
  bool connected = false;
};

/// Throws EmptyObstacleError when K is empty. `samples_per_pair` bounds the
/// number of candidate endpoint pairs tried per component pair.
GraphG build_graph_G(const ObstacleSpec& spec, const GridField& u0, int samples_per_pair = 64);

/// Whether u0 > 0 at points of [a, b] spaced at most half a grid cell apart.
bool segment_positive(const GridField& u0, const VecN& a, const VecN& b);

std::string graph_to_dot(const GraphG& g);

/// Union of convex pieces, each given by its generators. Segments are
/// two-generator pieces. Pieces that share a generator are adjacent.
class SegmentComplex {
 public:
  explicit SegmentComplex(int dim = 2) : dim_(dim) {}

  int dim() const { return dim_; }
  void add_segment(const VecN& a, const VecN& b);
  /// Adds conv(generators) unless an existing piece already contains it.
  void add_piece(std::vector<VecN> generators);
  const std::vector<std::vector<VecN>>& pieces() const { return pieces_; }
  std::vector<Segment> segments() const;
  bool empty() const { return pieces_.empty(); }

  /// Connected pieces under generator sharing; label per piece.
  std::vector<int> component_labels() const;
  int component_count() const;
  bool polygonally_connected() const { return component_count() <= 1; }

  /// Distance from x to the union of the pieces.
  double distance(const VecN& x) const;
  /// Points of every piece at spacing at most delta (vertices, edges, faces, interior).
  PointSet sample(double delta) const;
  /// All generators, deduplicated.
  PointSet vertices() const;

 private:
  int dim_;
  std::vector<std::vector<VecN>> pieces_;
  std::vector<Polytope> hulls_;
};

/// Witness segments, connectors from witness endpoints to primitive centers,
/// center-to-center segments of overlapping primitives, and each primitive center.
SegmentComplex build_L(const GraphG& g, const ObstacleSpec& spec, const GridField& u0);

/// One application of T: for every pair of adjacent pieces P, Q adds the
/// union of segments between their points, conv(P u Q).
SegmentComplex t_operator(const SegmentComplex& gamma);

struct TClosureResult {
  SegmentComplex complex;
  int iterations = 0;
  bool converged = false;
  /// Hausdorff growth of the last iteration.
  double last_growth = 0.0;
};

/// Iterates t_operator until the growth (sup over samples at spacing delta of
/// the new set of the distance to the old one) is at most 2 delta, or k_max.
/// Throws PreconditionError unless gamma is polygonally connected.
TClosureResult t_closure(const SegmentComplex& gamma, int k_max, double delta);

/// h with h^2 = N (N - 1) eps^2.
double overlap_radius(double eps, int dim);

}  // namespace mincurv

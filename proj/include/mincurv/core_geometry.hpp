#pragma once

// Uniform grids, sampled fields, positivity masks, point sets, classical
// convex hulls and set distances.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mincurv/linalg.hpp"

namespace mincurv {

/// Deduplication tolerance for point sets, in spatial units.
inline constexpr double kSnapTolerance = 1e-9;
/// Orientation tolerance for the hull oracle.
inline constexpr double kHullTolerance = 1e-12;

/// Geometry of a uniform isotropic node grid. Unused trailing axes have one node.
struct GridSpec {
  int dim = 2;
  VecN origin;
  double spacing = 1.0;
  std::array<int, kMaxDim> dims{1, 1, 1};

  /// Smallest grid with the given spacing whose box starts at `lower` and reaches `upper`.
  static GridSpec from_bounds(const VecN& lower, const VecN& upper, double spacing);

  std::size_t size() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
           static_cast<std::size_t>(dims[2]);
  }
  std::size_t index(int i, int j, int k = 0) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(k));
  }
  std::array<int, kMaxDim> multi_index(std::size_t flat) const;
  VecN node(int i, int j, int k = 0) const;
  VecN node(std::size_t flat) const;
  VecN upper() const;
  bool in_box(const VecN& x) const;
  void validate() const;

  friend bool operator==(const GridSpec& a, const GridSpec& b);
};

/// Scalar field sampled on a GridSpec. Immutable once built; reads outside
/// the box see `far_value`.
class GridField {
 public:
  GridField() = default;
  GridField(GridSpec spec, std::vector<double> values, double far_value);

  static GridField constant(const GridSpec& spec, double value, double far_value);
  static GridField sample(const GridSpec& spec, double far_value, const std::function<double(const VecN&)>& fn);

  const GridSpec& spec() const { return spec_; }
  std::span<const double> values() const { return values_; }
  double far_value() const { return far_value_; }
  double at(std::size_t flat) const { return values_[flat]; }
  double at(int i, int j, int k = 0) const { return values_[spec_.index(i, j, k)]; }
  /// Node value, or far_value for indices outside the grid.
  double at_or_far(int i, int j, int k = 0) const;

  double min() const;
  double max() const;
  double sup_abs() const;

 private:
  GridSpec spec_;
  std::vector<double> values_;
  double far_value_ = 0.0;
};

/// Multilinear interpolation; far_value outside the grid box.
double interpolate(const GridField& field, const VecN& x);
/// Same, with the position given in (fractional) index coordinates.
double interpolate_index(const GridField& field, const std::array<double, kMaxDim>& s);

/// Node-wise flags on a grid.
class BoolMask {
 public:
  BoolMask() = default;
  explicit BoolMask(GridSpec spec) : spec_(std::move(spec)), bits_(spec_.size(), 0) {}
  BoolMask(GridSpec spec, std::vector<std::uint8_t> bits);

  const GridSpec& spec() const { return spec_; }
  bool test(std::size_t flat) const { return bits_[flat] != 0; }
  void set(std::size_t flat, bool v = true) { bits_[flat] = v ? 1 : 0; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }
  /// Every set node of *this is set in `other`.
  bool subset_of(const BoolMask& other) const;

 private:
  GridSpec spec_;
  std::vector<std::uint8_t> bits_;
};

BoolMask positivity_set(const GridField& field);
BoolMask mask_from(const GridSpec& spec, const std::function<bool(const VecN&)>& inside);

/// Squared Euclidean distance (in spatial units) from each node to the
/// nearest set node of `mask`. Exact separable transform.
std::vector<double> squared_distance_to(const BoolMask& mask);

/// Symmetric Hausdorff distance between the node sets. Throws EmptySetError.
double hausdorff_distance(const BoolMask& a, const BoolMask& b, double h);
/// sup over set nodes of `a` of the distance to the node set of `b`.
double directed_hausdorff(const BoolMask& a, const BoolMask& b);

/// Points where the field changes sign along grid edges (positive vs not),
/// placed by linear interpolation between the two nodes.
std::vector<VecN> zero_crossings(const GridField& field);
/// Symmetric Hausdorff distance between the zero crossings of two fields.
/// Resolves interface offsets below the grid spacing. Throws EmptySetError.
double interface_hausdorff(const GridField& a, const GridField& b);

/// Finite point set, deduplicated at kSnapTolerance; insertion order preserved.
class PointSet {
 public:
  explicit PointSet(int dim = 2) : dim_(dim) {}
  PointSet(int dim, std::span<const VecN> points);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<VecN>& points() const { return points_; }
  const VecN& operator[](std::size_t i) const { return points_[i]; }

  /// Inserts unless a point within the snap tolerance already exists.
  bool insert(const VecN& p);
  bool contains(const VecN& p) const;
  /// Index of a stored point within the snap tolerance, or -1.
  long find(const VecN& p) const;

 private:
  using Key = std::array<long long, kMaxDim>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  Key key_of(const VecN& p) const;

  int dim_;
  std::vector<VecN> points_;
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> buckets_;
};

/// Convex polytope produced by convex_hull. Full-dimensional hulls carry
/// outward facet half-spaces; lower-dimensional inputs are flagged degenerate.
struct Polytope {
  int dim = 2;
  std::vector<VecN> vertices;
  /// 2D: edges (pairs, counter-clockwise); 3D: outward triangles.
  std::vector<std::vector<int>> facets;
  std::vector<std::pair<VecN, double>> halfspaces;  // <n, x> <= offset
  bool degenerate = false;
  int affine_dim = 0;

  bool contains(const VecN& x, double tol = kHullTolerance) const;
  /// Euclidean distance from x to the polytope (0 inside).
  double distance(const VecN& x) const;
};

Polytope convex_hull(const PointSet& pts);
Polytope convex_hull(int dim, std::span<const VecN> pts);

/// Central second-order differences at a node; out-of-grid neighbours read far_value.
struct GradHess {
  VecN grad;
  SymMatrixN hess;
};
GradHess grad_hess(const GridField& field, int i, int j, int k = 0);

double point_segment_distance(const VecN& x, const VecN& a, const VecN& b);
double point_triangle_distance(const VecN& x, const VecN& a, const VecN& b, const VecN& c);
/// Distance from x to conv(points); exact for up to a few dozen points.
double distance_to_hull(std::span<const VecN> points, const VecN& x);

/// Volume of the unit ball in R^N.
double unit_ball_volume(int dim);

}  // namespace mincurv

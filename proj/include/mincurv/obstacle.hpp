#pragma once

// Obstacle K as a union of balls and boxes, its enlargement K_eps = K + B_{N eps},
// and the regularized obstacle psi_eps.

#include <memory>
#include <vector>

#include "mincurv/core_geometry.hpp"

namespace mincurv {

/// Value used for "no obstacle" (psi identically -infinity).
inline constexpr double kNoObstacle = -1e30;

/// Open ball or open axis-aligned box.
struct Primitive {
  enum class Kind { Ball, Box };
  Kind kind = Kind::Ball;
  VecN center;  // ball center, or box midpoint
  double radius = 0.0;
  VecN lower, upper;  // box corners (balls: bounding box)

  static Primitive ball(const VecN& center, double radius);
  static Primitive box(const VecN& lower, const VecN& upper);

  /// Signed distance, positive inside. 1-Lipschitz.
  double psi(const VecN& x) const;
  int dim() const { return center.dim(); }
};

/// Open primitives share an interior point.
bool primitives_overlap(const Primitive& a, const Primitive& b);

class ObstacleSpec {
 public:
  ObstacleSpec() = default;
  /// Throws PreconditionError on dimension mismatch, nonpositive radius or modulus.
  ObstacleSpec(int dim, std::vector<Primitive> primitives, double modulus = 1.0);

  int dim() const { return dim_; }
  bool empty() const { return primitives_.empty(); }
  const std::vector<Primitive>& primitives() const { return primitives_; }
  double modulus() const { return modulus_; }

  /// max over primitives of the signed distance; kNoObstacle when K is empty.
  double psi(const VecN& x) const;
  /// omega(s) = modulus * s.
  double omega(double s) const { return modulus_ * s; }

 private:
  int dim_ = 2;
  std::vector<Primitive> primitives_;
  double modulus_ = 1.0;
};

/// Boundary samples of K_eps with their psi values, indexed for
/// branch-and-bound min/max queries.
class BoundaryIndex;

class EnlargedObstacle {
 public:
  /// Samples the boundary of K_eps with mesh width <= eps/4 and at least
  /// `min_samples` points overall (when K is nonempty).
  EnlargedObstacle(ObstacleSpec base, double eps, int min_samples = 100);
  ~EnlargedObstacle();
  EnlargedObstacle(EnlargedObstacle&&) noexcept;
  EnlargedObstacle& operator=(EnlargedObstacle&&) noexcept;

  const ObstacleSpec& base() const { return base_; }
  double eps() const { return eps_; }
  /// r(eps) = N eps.
  double enlarge_radius() const { return radius_; }
  /// C_eps = 2 omega(2 N eps).
  double c_eps() const { return c_eps_; }

  bool in_K_eps(const VecN& x) const { return base_.psi(x) > -radius_; }
  const std::vector<VecN>& boundary_samples() const { return samples_; }

  /// Throws EmptyObstacleError when K is empty.
  double h_eps(const VecN& x) const;
  double psi_eps(const VecN& x) const;

 private:
  ObstacleSpec base_;
  double eps_;
  double radius_;
  double c_eps_;
  std::vector<VecN> samples_;
  std::unique_ptr<BoundaryIndex> index_;
};

/// psi sampled on the grid.
GridField psi_field(const ObstacleSpec& spec, const GridSpec& grid);
/// psi_eps sampled on the grid. Throws CoverageError unless the grid box contains K_eps.
GridField psi_eps_field(const EnlargedObstacle& enlarged, const GridSpec& grid);
/// Field identically kNoObstacle.
GridField no_obstacle_field(const GridSpec& grid);

}  // namespace mincurv

#include "mincurv/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "mincurv/errors.hpp"

namespace mincurv {

Primitive Primitive::ball(const VecN& center, double radius) {
  if (!(radius > 0.0)) throw PreconditionError("ball radius must be positive");
  Primitive p;
  p.kind = Kind::Ball;
  p.center = center;
  p.radius = radius;
  p.lower = center;
  p.upper = center;
  for (int a = 0; a < center.dim(); ++a) {
    p.lower[a] -= radius;
    p.upper[a] += radius;
  }
  return p;
}

Primitive Primitive::box(const VecN& lower, const VecN& upper) {
  if (lower.dim() != upper.dim()) throw PreconditionError("box corner dimension mismatch");
  for (int a = 0; a < lower.dim(); ++a) {
    if (!(upper[a] > lower[a])) throw PreconditionError("box must have positive extent on every axis");
  }
  Primitive p;
  p.kind = Kind::Box;
  p.lower = lower;
  p.upper = upper;
  p.center = (lower + upper) * 0.5;
  return p;
}

double Primitive::psi(const VecN& x) const {
  if (kind == Kind::Ball) return radius - distance(x, center);
  double outside2 = 0.0;
  double inside = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < x.dim(); ++a) {
    const double q = std::abs(x[a] - center[a]) - 0.5 * (upper[a] - lower[a]);
    if (q > 0.0) outside2 += q * q;
    inside = std::max(inside, q);
  }
  return -(std::sqrt(outside2) + std::min(inside, 0.0));
}

namespace {

double box_distance(const VecN& x, const VecN& lo, const VecN& hi) {
  double s = 0.0;
  for (int a = 0; a < x.dim(); ++a) {
    const double d = std::max({lo[a] - x[a], 0.0, x[a] - hi[a]});
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

bool primitives_overlap(const Primitive& a, const Primitive& b) {
  using K = Primitive::Kind;
  if (a.kind == K::Ball && b.kind == K::Ball) return distance(a.center, b.center) < a.radius + b.radius;
  if (a.kind == K::Box && b.kind == K::Box) {
    for (int d = 0; d < a.dim(); ++d) {
      if (!(a.lower[d] < b.upper[d] && b.lower[d] < a.upper[d])) return false;
    }
    return true;
  }
  const Primitive& ball = a.kind == K::Ball ? a : b;
  const Primitive& box = a.kind == K::Ball ? b : a;
  return box_distance(ball.center, box.lower, box.upper) < ball.radius;
}

ObstacleSpec::ObstacleSpec(int dim, std::vector<Primitive> primitives, double modulus)
    : dim_(dim), primitives_(std::move(primitives)), modulus_(modulus) {
  require_dimension(dim);
  if (!(modulus > 0.0)) throw PreconditionError("modulus constant must be positive");
  for (const auto& p : primitives_) {
    if (p.dim() != dim) throw PreconditionError("obstacle primitive dimension mismatch");
  }
}

double ObstacleSpec::psi(const VecN& x) const {
  double v = kNoObstacle;
  for (const auto& p : primitives_) v = std::max(v, p.psi(x));
  return v;
}

// ---------------------------------------------------------------------------
// k-d tree over boundary samples; each node stores its bounding box and the
// range of psi over its points.

class BoundaryIndex {
 public:
  BoundaryIndex(const std::vector<VecN>& pts, std::vector<double> psi) : pts_(pts), psi_(std::move(psi)) {
    order_.resize(pts_.size());
    std::iota(order_.begin(), order_.end(), 0u);
    if (!pts_.empty()) build(0, order_.size());
  }

  // min over y of psi(y) + w |x - y|
  double min_plus(const VecN& x, double w) const {
    double best = std::numeric_limits<double>::infinity();
    if (!nodes_.empty()) min_rec(0, x, w, best);
    return best;
  }
  // max over y of psi(y) - w |x - y|
  double max_minus(const VecN& x, double w) const {
    double best = -std::numeric_limits<double>::infinity();
    if (!nodes_.empty()) max_rec(0, x, w, best);
    return best;
  }

 private:
  struct Node {
    VecN lo, hi;
    double psi_min, psi_max;
    std::size_t begin, end;
    int left = -1, right = -1;
  };
  static constexpr std::size_t kLeaf = 16;

  int build(std::size_t begin, std::size_t end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    Node n;
    n.begin = begin;
    n.end = end;
    n.lo = pts_[order_[begin]];
    n.hi = n.lo;
    n.psi_min = std::numeric_limits<double>::infinity();
    n.psi_max = -n.psi_min;
    for (std::size_t i = begin; i < end; ++i) {
      const VecN& p = pts_[order_[i]];
      for (int a = 0; a < p.dim(); ++a) {
        n.lo[a] = std::min(n.lo[a], p[a]);
        n.hi[a] = std::max(n.hi[a], p[a]);
      }
      n.psi_min = std::min(n.psi_min, psi_[order_[i]]);
      n.psi_max = std::max(n.psi_max, psi_[order_[i]]);
    }
    if (end - begin > kLeaf) {
      int axis = 0;
      for (int a = 1; a < n.lo.dim(); ++a) {
        if (n.hi[a] - n.lo[a] > n.hi[axis] - n.lo[axis]) axis = a;
      }
      const std::size_t mid = begin + (end - begin) / 2;
      std::nth_element(order_.begin() + static_cast<long>(begin), order_.begin() + static_cast<long>(mid),
                       order_.begin() + static_cast<long>(end),
                       [&](std::size_t a, std::size_t b) { return pts_[a][axis] < pts_[b][axis]; });
      n.left = build(begin, mid);
      n.right = build(mid, end);
    }
    nodes_[static_cast<std::size_t>(id)] = n;
    return id;
  }

  void min_rec(int id, const VecN& x, double w, double& best) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.psi_min + w * box_distance(x, n.lo, n.hi) >= best) return;
    if (n.left < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const std::size_t k = order_[i];
        best = std::min(best, psi_[k] + w * distance(x, pts_[k]));
      }
      return;
    }
    const double dl = box_distance(x, nodes_[static_cast<std::size_t>(n.left)].lo, nodes_[static_cast<std::size_t>(n.left)].hi);
    const double dr = box_distance(x, nodes_[static_cast<std::size_t>(n.right)].lo, nodes_[static_cast<std::size_t>(n.right)].hi);
    if (dl <= dr) {
      min_rec(n.left, x, w, best);
      min_rec(n.right, x, w, best);
    } else {
      min_rec(n.right, x, w, best);
      min_rec(n.left, x, w, best);
    }
  }

  void max_rec(int id, const VecN& x, double w, double& best) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.psi_max - w * box_distance(x, n.lo, n.hi) <= best) return;
    if (n.left < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const std::size_t k = order_[i];
        best = std::max(best, psi_[k] - w * distance(x, pts_[k]));
      }
      return;
    }
    const double dl = box_distance(x, nodes_[static_cast<std::size_t>(n.left)].lo, nodes_[static_cast<std::size_t>(n.left)].hi);
    const double dr = box_distance(x, nodes_[static_cast<std::size_t>(n.right)].lo, nodes_[static_cast<std::size_t>(n.right)].hi);
    if (dl <= dr) {
      max_rec(n.left, x, w, best);
      max_rec(n.right, x, w, best);
    } else {
      max_rec(n.right, x, w, best);
      max_rec(n.left, x, w, best);
    }
  }

  const std::vector<VecN>& pts_;
  std::vector<double> psi_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

namespace {

void sample_ball(const Primitive& p, double r, double width, std::vector<VecN>& out) {
  const double R = p.radius + r;
  if (p.dim() == 2) {
    const int n = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * R / width)));
    for (int k = 0; k < n; ++k) {
      const double t = 2.0 * std::numbers::pi * k / n;
      out.push_back(p.center + VecN{R * std::cos(t), R * std::sin(t)});
    }
    return;
  }
  const int n = std::max(32, static_cast<int>(std::ceil(2.0 * 4.0 * std::numbers::pi * R * R / (width * width))));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / n;
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * k;
    out.push_back(p.center + VecN{R * s * std::cos(phi), R * s * std::sin(phi), R * z});
  }
}

// Samples the surface of the outer box [lower - r, upper + r] and projects
// each point onto the rounded boundary of box + B_r.
void sample_box(const Primitive& p, double r, double width, std::vector<VecN>& out) {
  const int n = p.dim();
  VecN lo = p.lower, hi = p.upper;
  for (int a = 0; a < n; ++a) {
    lo[a] -= r;
    hi[a] += r;
  }
  std::array<int, kMaxDim> counts{1, 1, 1};
  for (int a = 0; a < n; ++a) counts[a] = static_cast<int>(std::ceil((hi[a] - lo[a]) / width)) + 1;
  auto project = [&](VecN q) {
    VecN c = q;
    for (int a = 0; a < n; ++a) c[a] = std::clamp(q[a], p.lower[a], p.upper[a]);
    const VecN d = normalized(q - c);
    out.push_back(c + d * r);
  };
  for (int face_axis = 0; face_axis < n; ++face_axis) {
    for (int side = 0; side < 2; ++side) {
      const int u = (face_axis + 1) % n;
      const int v = (face_axis + 2) % n;
      const int nu = counts[u];
      const int nv = n == 3 ? counts[v] : 1;
      for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
          VecN q = lo;
          q[face_axis] = side == 0 ? lo[face_axis] : hi[face_axis];
          q[u] = lo[u] + (hi[u] - lo[u]) * i / (nu - 1);
          if (n == 3) q[v] = lo[v] + (hi[v] - lo[v]) * j / (nv - 1);
          project(q);
        }
      }
    }
  }
}

std::vector<VecN> sample_enlarged_boundary(const ObstacleSpec& spec, double r, double width) {
  std::vector<VecN> kept;
  const auto& prims = spec.primitives();
  for (std::size_t i = 0; i < prims.size(); ++i) {
    std::vector<VecN> raw;
    if (prims[i].kind == Primitive::Kind::Ball) {
      sample_ball(prims[i], r, width, raw);
    } else {
      sample_box(prims[i], r, width, raw);
    }
    for (const auto& y : raw) {
      bool exposed = true;
      for (std::size_t j = 0; j < prims.size() && exposed; ++j) {
        if (j != i && prims[j].psi(y) > -r + 1e-12) exposed = false;
      }
      if (exposed) kept.push_back(y);
    }
  }
  return kept;
}

}  // namespace

EnlargedObstacle::EnlargedObstacle(ObstacleSpec base, double eps, int min_samples)
    : base_(std::move(base)), eps_(eps) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  if (min_samples < 100) throw PreconditionError("at least 100 boundary samples are required");
  radius_ = base_.dim() * eps_;
  c_eps_ = 2.0 * base_.omega(2.0 * base_.dim() * eps_);
  if (!base_.empty()) {
    double width = eps_ / 4.0;
    samples_ = sample_enlarged_boundary(base_, radius_, width);
    while (samples_.size() < static_cast<std::size_t>(min_samples)) {
      width *= 0.5;
      samples_ = sample_enlarged_boundary(base_, radius_, width);
    }
  }
  std::vector<double> psi(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) psi[i] = base_.psi(samples_[i]);
  index_ = std::make_unique<BoundaryIndex>(samples_, std::move(psi));
}

EnlargedObstacle::~EnlargedObstacle() = default;

EnlargedObstacle::EnlargedObstacle(EnlargedObstacle&& o) noexcept
    : base_(std::move(o.base_)),
      eps_(o.eps_),
      radius_(o.radius_),
      c_eps_(o.c_eps_),
      samples_(std::move(o.samples_)) {
  // The index refers to samples_ by reference; rebuild against the moved storage.
  std::vector<double> psi(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) psi[i] = base_.psi(samples_[i]);
  index_ = std::make_unique<BoundaryIndex>(samples_, std::move(psi));
}

EnlargedObstacle& EnlargedObstacle::operator=(EnlargedObstacle&& o) noexcept {
  if (this != &o) {
    base_ = std::move(o.base_);
    eps_ = o.eps_;
    radius_ = o.radius_;
    c_eps_ = o.c_eps_;
    samples_ = std::move(o.samples_);
    std::vector<double> psi(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) psi[i] = base_.psi(samples_[i]);
    index_ = std::make_unique<BoundaryIndex>(samples_, std::move(psi));
  }
  return *this;
}

double EnlargedObstacle::h_eps(const VecN& x) const {
  if (samples_.empty()) throw EmptyObstacleError("h_eps: obstacle is empty");
  const double w = 2.0 * base_.modulus();
  return in_K_eps(x) ? index_->min_plus(x, w) : index_->max_minus(x, w);
}

double EnlargedObstacle::psi_eps(const VecN& x) const {
  if (base_.empty()) return kNoObstacle;
  const double psi = base_.psi(x);
  // Away from the band |psi| < C_eps both branches reduce to psi.
  if (std::abs(psi) >= c_eps_) return psi;
  const double h = h_eps(x);
  if (psi > -radius_) return std::max(psi, std::min(h - psi, c_eps_));
  return std::min(psi, std::max(h - psi, -c_eps_));
}

GridField psi_field(const ObstacleSpec& spec, const GridSpec& grid) {
  return GridField::sample(grid, kNoObstacle, [&](const VecN& x) { return spec.psi(x); });
}

GridField psi_eps_field(const EnlargedObstacle& enlarged, const GridSpec& grid) {
  const double r = enlarged.enlarge_radius();
  const VecN top = grid.upper();
  for (const auto& p : enlarged.base().primitives()) {
    for (int a = 0; a < grid.dim; ++a) {
      if (p.lower[a] - r < grid.origin[a] || p.upper[a] + r > top[a]) {
        throw CoverageError("grid box does not contain the enlarged obstacle K_eps");
      }
    }
  }
  return GridField::sample(grid, kNoObstacle, [&](const VecN& x) { return enlarged.psi_eps(x); });
}

GridField no_obstacle_field(const GridSpec& grid) { return GridField::constant(grid, kNoObstacle, kNoObstacle); }

}  // namespace mincurv

#include "mincurv/core_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "mincurv/errors.hpp"

namespace mincurv {

// ---------------------------------------------------------------------------
// GridSpec / GridField

GridSpec GridSpec::from_bounds(const VecN& lower, const VecN& upper, double spacing) {
  GridSpec g;
  g.dim = lower.dim();
  g.origin = lower;
  g.spacing = spacing;
  for (int a = 0; a < g.dim; ++a) {
    const double n = (upper[a] - lower[a]) / spacing;
    g.dims[a] = static_cast<int>(std::ceil(n - 1e-9)) + 1;
  }
  g.validate();
  return g;
}

std::array<int, kMaxDim> GridSpec::multi_index(std::size_t flat) const {
  std::array<int, kMaxDim> ijk{0, 0, 0};
  ijk[0] = static_cast<int>(flat % static_cast<std::size_t>(dims[0]));
  flat /= static_cast<std::size_t>(dims[0]);
  ijk[1] = static_cast<int>(flat % static_cast<std::size_t>(dims[1]));
  ijk[2] = static_cast<int>(flat / static_cast<std::size_t>(dims[1]));
  return ijk;
}

VecN GridSpec::node(int i, int j, int k) const {
  VecN x = origin;
  const int idx[3] = {i, j, k};
  for (int a = 0; a < dim; ++a) x[a] += spacing * idx[a];
  return x;
}

VecN GridSpec::node(std::size_t flat) const {
  const auto ijk = multi_index(flat);
  return node(ijk[0], ijk[1], ijk[2]);
}

VecN GridSpec::upper() const {
  VecN x = origin;
  for (int a = 0; a < dim; ++a) x[a] += spacing * (dims[a] - 1);
  return x;
}

bool GridSpec::in_box(const VecN& x) const {
  for (int a = 0; a < dim; ++a) {
    const double s = (x[a] - origin[a]) / spacing;
    if (s < -1e-9 || s > dims[a] - 1 + 1e-9) return false;
  }
  return true;
}

void GridSpec::validate() const {
  require_dimension(dim);
  if (dim < 2) throw PreconditionError("grids must be 2D or 3D");
  if (origin.dim() != dim) throw PreconditionError("grid origin dimension mismatch");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw PreconditionError("grid spacing must be positive");
  for (int a = 0; a < kMaxDim; ++a) {
    if (a < dim && dims[a] < 2) throw PreconditionError("grid needs at least two nodes per axis");
    if (a >= dim && dims[a] != 1) throw PreconditionError("unused grid axes must have one node");
  }
}

bool operator==(const GridSpec& a, const GridSpec& b) {
  return a.dim == b.dim && a.origin == b.origin && a.spacing == b.spacing && a.dims == b.dims;
}

GridField::GridField(GridSpec spec, std::vector<double> values, double far_value)
    : spec_(std::move(spec)), values_(std::move(values)), far_value_(far_value) {
  spec_.validate();
  if (values_.size() != spec_.size()) {
    throw PreconditionError("GridField: values size " + std::to_string(values_.size()) +
                            " does not match grid size " + std::to_string(spec_.size()));
  }
}

GridField GridField::constant(const GridSpec& spec, double value, double far_value) {
  return GridField(spec, std::vector<double>(spec.size(), value), far_value);
}

GridField GridField::sample(const GridSpec& spec, double far_value, const std::function<double(const VecN&)>& fn) {
  std::vector<double> v(spec.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = fn(spec.node(n));
  return GridField(spec, std::move(v), far_value);
}

double GridField::at_or_far(int i, int j, int k) const {
  if (i < 0 || j < 0 || k < 0 || i >= spec_.dims[0] || j >= spec_.dims[1] || k >= spec_.dims[2]) {
    return far_value_;
  }
  return values_[spec_.index(i, j, k)];
}

double GridField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double GridField::sup_abs() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

double interpolate_index(const GridField& field, const std::array<double, kMaxDim>& s) {
  const GridSpec& g = field.spec();
  int base[kMaxDim] = {0, 0, 0};
  double frac[kMaxDim] = {0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) {
    const int n = g.dims[a];
    double c = s[a];
    if (!(c >= -1e-9 && c <= n - 1 + 1e-9)) return field.far_value();
    c = std::clamp(c, 0.0, static_cast<double>(n - 1));
    int i0 = static_cast<int>(std::floor(c));
    if (i0 >= n - 1) {
      i0 = n - 1;
      frac[a] = 0.0;
    } else {
      frac[a] = c - i0;
    }
    base[a] = i0;
  }
  const auto& values = field.values();
  const std::size_t sx = 1;
  const std::size_t sy = static_cast<std::size_t>(g.dims[0]);
  const std::size_t sz = sy * static_cast<std::size_t>(g.dims[1]);
  const std::size_t b0 = g.index(base[0], base[1], base[2]);
  if (g.dim == 2) {
    const double fx = frac[0];
    const double fy = frac[1];
    double v = (1.0 - fx) * (1.0 - fy) * values[b0];
    if (fx > 0.0) v += fx * (1.0 - fy) * values[b0 + sx];
    if (fy > 0.0) {
      v += (1.0 - fx) * fy * values[b0 + sy];
      if (fx > 0.0) v += fx * fy * values[b0 + sx + sy];
    }
    return v;
  }
  double v = 0.0;
  for (int corner = 0; corner < 8; ++corner) {
    double w = 1.0;
    std::size_t off = 0;
    bool skip = false;
    for (int a = 0; a < 3; ++a) {
      const bool up = (corner >> a) & 1;
      if (up) {
        if (frac[a] == 0.0) {
          skip = true;
          break;
        }
        w *= frac[a];
        off += a == 0 ? sx : (a == 1 ? sy : sz);
      } else {
        w *= 1.0 - frac[a];
      }
    }
    if (!skip) v += w * values[b0 + off];
  }
  return v;
}

double interpolate(const GridField& field, const VecN& x) {
  const GridSpec& g = field.spec();
  std::array<double, kMaxDim> s{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) s[a] = (x[a] - g.origin[a]) / g.spacing;
  return interpolate_index(field, s);
}

// ---------------------------------------------------------------------------
// Masks and distances

BoolMask::BoolMask(GridSpec spec, std::vector<std::uint8_t> bits) : spec_(std::move(spec)), bits_(std::move(bits)) {
  if (bits_.size() != spec_.size()) throw PreconditionError("BoolMask: size mismatch");
}

std::size_t BoolMask::count() const {
  return static_cast<std::size_t>(std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

bool BoolMask::subset_of(const BoolMask& other) const {
  if (!(spec_ == other.spec_)) throw PreconditionError("BoolMask::subset_of: grid mismatch");
  for (std::size_t n = 0; n < bits_.size(); ++n) {
    if (bits_[n] && !other.bits_[n]) return false;
  }
  return true;
}

BoolMask positivity_set(const GridField& field) {
  std::vector<std::uint8_t> bits(field.spec().size());
  const auto v = field.values();
  for (std::size_t n = 0; n < bits.size(); ++n) bits[n] = v[n] > 0.0 ? 1 : 0;
  return BoolMask(field.spec(), std::move(bits));
}

BoolMask mask_from(const GridSpec& spec, const std::function<bool(const VecN&)>& inside) {
  BoolMask m(spec);
  for (std::size_t n = 0; n < spec.size(); ++n) m.set(n, inside(spec.node(n)));
  return m;
}

namespace {

constexpr double kFar = 1e30;

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher), unit spacing.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -kFar;
  z[1] = kFar;
  for (int q = 1; q < n; ++q) {
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) / (2.0 * q - 2.0 * p);
      if (s <= z[k] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    if (s <= z[k]) {  // k == 0
      v[0] = q;
      z[0] = -kFar;
      z[1] = kFar;
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kFar;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

std::vector<double> squared_index_distance(const BoolMask& mask) {
  const GridSpec& g = mask.spec();
  std::vector<double> dist(g.size());
  for (std::size_t n = 0; n < dist.size(); ++n) dist[n] = mask.test(n) ? 0.0 : kFar;
  const int maxn = std::max({g.dims[0], g.dims[1], g.dims[2]});
  std::vector<double> f(static_cast<std::size_t>(maxn));
  std::vector<double> d(static_cast<std::size_t>(maxn));
  std::vector<int> v(static_cast<std::size_t>(maxn));
  std::vector<double> z(static_cast<std::size_t>(maxn) + 1);
  const std::size_t strides[3] = {1, static_cast<std::size_t>(g.dims[0]),
                                  static_cast<std::size_t>(g.dims[0]) * static_cast<std::size_t>(g.dims[1])};
  for (int axis = 0; axis < g.dim; ++axis) {
    const int n = g.dims[axis];
    f.resize(static_cast<std::size_t>(n));
    d.resize(static_cast<std::size_t>(n));
    v.resize(static_cast<std::size_t>(n));
    z.resize(static_cast<std::size_t>(n) + 1);
    for (std::size_t start = 0; start < g.size(); ++start) {
      // Visit each line once: starts are nodes whose index along `axis` is 0.
      const auto ijk = g.multi_index(start);
      if (ijk[axis] != 0) continue;
      for (int q = 0; q < n; ++q) f[q] = dist[start + q * strides[axis]];
      edt_1d(f, d, v, z);
      for (int q = 0; q < n; ++q) dist[start + q * strides[axis]] = std::min(d[q], kFar);
    }
  }
  return dist;
}

}  // namespace

std::vector<double> squared_distance_to(const BoolMask& mask) {
  auto d = squared_index_distance(mask);
  const double h2 = mask.spec().spacing * mask.spec().spacing;
  for (double& x : d) x *= h2;
  return d;
}

namespace {

double directed_index(const BoolMask& a, const BoolMask& b) {
  if (a.empty() || b.empty()) throw EmptySetError("Hausdorff distance of an empty mask");
  const auto db = squared_index_distance(b);
  double worst = 0.0;
  for (std::size_t n = 0; n < db.size(); ++n) {
    if (a.test(n)) worst = std::max(worst, db[n]);
  }
  return std::sqrt(worst);
}

}  // namespace

double directed_hausdorff(const BoolMask& a, const BoolMask& b) {
  if (!(a.spec() == b.spec())) throw PreconditionError("directed_hausdorff: grid mismatch");
  return directed_index(a, b) * a.spec().spacing;
}

double hausdorff_distance(const BoolMask& a, const BoolMask& b, double h) {
  if (a.spec().dims != b.spec().dims) throw PreconditionError("hausdorff_distance: dims mismatch");
  return std::max(directed_index(a, b), directed_index(b, a)) * h;
}

std::vector<VecN> zero_crossings(const GridField& field) {
  const GridSpec& s = field.spec();
  std::vector<VecN> out;
  for (int k = 0; k < s.dims[2]; ++k) {
    for (int j = 0; j < s.dims[1]; ++j) {
      for (int i = 0; i < s.dims[0]; ++i) {
        const double v = field.at(i, j, k);
        for (int a = 0; a < s.dim; ++a) {
          std::array<int, kMaxDim> m{i, j, k};
          if (++m[a] >= s.dims[a]) continue;
          const double w = field.at(m[0], m[1], m[2]);
          if ((v > 0.0) == (w > 0.0)) continue;
          // Zero of the linear interpolant, clamped for the v == w == 0 corner case.
          const double f = v == w ? 0.5 : std::clamp(v / (v - w), 0.0, 1.0);
          VecN p = s.node(i, j, k);
          p[a] += f * s.spacing;
          out.push_back(p);
        }
      }
    }
  }
  return out;
}

namespace {

// `b` sorted by first coordinate; prunes on the first-axis gap.
double directed_point_hausdorff(const std::vector<VecN>& a, const std::vector<VecN>& b) {
  double worst = 0.0;
  for (const VecN& p : a) {
    const auto mid = std::lower_bound(b.begin(), b.end(), p[0],
                                      [](const VecN& q, double x) { return q[0] < x; });
    double best = std::numeric_limits<double>::infinity();
    for (auto it = mid; it != b.end() && (*it)[0] - p[0] < best; ++it) best = std::min(best, distance(p, *it));
    for (auto it = mid; it != b.begin();) {
      --it;
      if (p[0] - (*it)[0] >= best) break;
      best = std::min(best, distance(p, *it));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double interface_hausdorff(const GridField& a, const GridField& b) {
  std::vector<VecN> pa = zero_crossings(a);
  std::vector<VecN> pb = zero_crossings(b);
  if (pa.empty() || pb.empty()) throw EmptySetError("interface_hausdorff: a field has no sign change");
  const auto by_x = [](const VecN& p, const VecN& q) { return p[0] < q[0]; };
  std::sort(pa.begin(), pa.end(), by_x);
  std::sort(pb.begin(), pb.end(), by_x);
  return std::max(directed_point_hausdorff(pa, pb), directed_point_hausdorff(pb, pa));
}

// ---------------------------------------------------------------------------
// PointSet

std::size_t PointSet::KeyHash::operator()(const Key& k) const {
  std::size_t h = 1469598103934665603ull;
  for (long long x : k) {
    h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

PointSet::PointSet(int dim, std::span<const VecN> points) : dim_(dim) {
  for (const auto& p : points) insert(p);
}

PointSet::Key PointSet::key_of(const VecN& p) const {
  Key k{0, 0, 0};
  for (int a = 0; a < dim_; ++a) k[a] = static_cast<long long>(std::floor(p[a] / kSnapTolerance));
  return k;
}

long PointSet::find(const VecN& p) const {
  const Key base = key_of(p);
  const int span = dim_ == 2 ? 9 : 27;
  for (int c = 0; c < span; ++c) {
    Key k = base;
    int code = c;
    for (int a = 0; a < dim_; ++a) {
      k[a] += code % 3 - 1;
      code /= 3;
    }
    const auto it = buckets_.find(k);
    if (it == buckets_.end()) continue;
    for (std::size_t idx : it->second) {
      if (distance(points_[idx], p) <= kSnapTolerance) return static_cast<long>(idx);
    }
  }
  return -1;
}

bool PointSet::contains(const VecN& p) const { return find(p) >= 0; }

bool PointSet::insert(const VecN& p) {
  if (p.dim() != dim_) throw PreconditionError("PointSet: dimension mismatch");
  if (find(p) >= 0) return false;
  buckets_[key_of(p)].push_back(points_.size());
  points_.push_back(p);
  return true;
}

// ---------------------------------------------------------------------------
// Distances to simple shapes

double point_segment_distance(const VecN& x, const VecN& a, const VecN& b) {
  const VecN ab = b - a;
  const double len2 = norm2(ab);
  if (len2 == 0.0) return distance(x, a);
  const double t = std::clamp(dot(x - a, ab) / len2, 0.0, 1.0);
  return distance(x, a + ab * t);
}

double point_triangle_distance(const VecN& p, const VecN& a, const VecN& b, const VecN& c) {
  // Closest point on triangle (Ericson, Real-Time Collision Detection 5.1.5).
  const VecN ab = b - a;
  const VecN ac = c - a;
  const VecN ap = p - a;
  const double d1 = dot(ab, ap);
  const double d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return distance(p, a);
  const VecN bp = p - b;
  const double d3 = dot(ab, bp);
  const double d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return distance(p, b);
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return distance(p, a + ab * (d1 / (d1 - d3)));
  const VecN cp = p - c;
  const double d5 = dot(ab, cp);
  const double d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return distance(p, c);
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return distance(p, a + ac * (d2 / (d2 - d6)));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return distance(p, b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6))));
  }
  const double denom = 1.0 / (va + vb + vc);
  return distance(p, a + ab * (vb * denom) + ac * (vc * denom));
}

// ---------------------------------------------------------------------------
// Convex hull

namespace {

double cross2(const VecN& o, const VecN& a, const VecN& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Andrew's monotone chain on 2D points; returns indices counter-clockwise.
std::vector<int> hull_2d_indices(const std::vector<VecN>& p, double tol) {
  std::vector<int> idx(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return p[a][0] < p[b][0] || (p[a][0] == p[b][0] && p[a][1] < p[b][1]);
  });
  if (idx.size() < 3) return idx;
  std::vector<int> h(2 * idx.size());
  std::size_t k = 0;
  for (int i : idx) {
    while (k >= 2 && cross2(p[h[k - 2]], p[h[k - 1]], p[i]) <= tol) --k;
    h[k++] = i;
  }
  for (std::size_t t = idx.size() - 1, lower = k + 1; t-- > 0;) {
    const int i = idx[t];
    while (k >= lower && cross2(p[h[k - 2]], p[h[k - 1]], p[i]) <= tol) --k;
    h[k++] = i;
  }
  h.resize(k - 1);
  return h;
}

struct AffineFrame {
  int dim = 0;
  VecN origin;
  std::vector<VecN> basis;  // orthonormal
  std::vector<int> seeds;   // indices of affinely independent points
};

AffineFrame affine_frame(int dim, std::span<const VecN> pts, double diam) {
  AffineFrame f;
  f.origin = pts[0];
  f.seeds.push_back(0);
  const double tol = 1e-10 * std::max(diam, 1.0);
  for (int d = 0; d < dim; ++d) {
    double best = -1.0;
    int best_i = -1;
    VecN best_r;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      VecN r = pts[i] - f.origin;
      for (const auto& e : f.basis) r -= e * dot(r, e);
      const double n = norm(r);
      if (n > best) {
        best = n;
        best_i = static_cast<int>(i);
        best_r = r;
      }
    }
    if (best <= tol) break;
    f.basis.push_back(best_r * (1.0 / best));
    f.seeds.push_back(best_i);
    ++f.dim;
  }
  return f;
}

void finalize_2d(Polytope& poly) {
  const std::size_t n = poly.vertices.size();
  // The hull was built in a local frame that may be mirrored; restore counter-clockwise order.
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const VecN& a = poly.vertices[i];
    const VecN& b = poly.vertices[(i + 1) % n];
    area2 += a[0] * b[1] - a[1] * b[0];
  }
  if (area2 < 0.0) std::reverse(poly.vertices.begin(), poly.vertices.end());
  for (std::size_t i = 0; i < n; ++i) {
    const VecN& a = poly.vertices[i];
    const VecN& b = poly.vertices[(i + 1) % n];
    poly.facets.push_back({static_cast<int>(i), static_cast<int>((i + 1) % n)});
    VecN nrm = normalized(VecN{b[1] - a[1], -(b[0] - a[0])});
    poly.halfspaces.emplace_back(nrm, dot(nrm, a));
  }
}

struct Face {
  int a, b, c;
  VecN n;
  double off;
  bool alive = true;
};

Polytope hull_3d(std::span<const VecN> pts, const AffineFrame& frame, double diam) {
  const double tol = kHullTolerance * std::max(diam, 1.0);
  std::vector<Face> faces;
  const VecN interior =
      (pts[frame.seeds[0]] + pts[frame.seeds[1]] + pts[frame.seeds[2]] + pts[frame.seeds[3]]) * 0.25;
  auto make_face = [&](int a, int b, int c) {
    Face f{a, b, c, VecN{}, 0.0};
    f.n = normalized(cross(pts[b] - pts[a], pts[c] - pts[a]));
    f.off = dot(f.n, pts[a]);
    if (dot(f.n, interior) - f.off > 0.0) {
      std::swap(f.b, f.c);
      f.n = -f.n;
      f.off = -f.off;
    }
    return f;
  };
  const int s0 = frame.seeds[0], s1 = frame.seeds[1], s2 = frame.seeds[2], s3 = frame.seeds[3];
  faces.push_back(make_face(s0, s1, s2));
  faces.push_back(make_face(s0, s1, s3));
  faces.push_back(make_face(s0, s2, s3));
  faces.push_back(make_face(s1, s2, s3));

  for (std::size_t pi = 0; pi < pts.size(); ++pi) {
    const int p = static_cast<int>(pi);
    if (p == s0 || p == s1 || p == s2 || p == s3) continue;
    std::vector<std::size_t> visible;
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
      if (faces[fi].alive && dot(faces[fi].n, pts[pi]) - faces[fi].off > tol) visible.push_back(fi);
    }
    if (visible.empty()) continue;
    std::map<std::pair<int, int>, int> edges;
    for (std::size_t fi : visible) {
      const Face& f = faces[fi];
      ++edges[{f.a, f.b}];
      ++edges[{f.b, f.c}];
      ++edges[{f.c, f.a}];
    }
    for (std::size_t fi : visible) faces[fi].alive = false;
    for (const auto& [e, cnt] : edges) {
      if (edges.count({e.second, e.first}) != 0) continue;  // interior edge of the visible region
      Face f{e.first, e.second, p, VecN{}, 0.0};
      f.n = normalized(cross(pts[f.b] - pts[f.a], pts[f.c] - pts[f.a]));
      f.off = dot(f.n, pts[f.a]);
      faces.push_back(f);
    }
  }

  Polytope poly;
  poly.dim = 3;
  poly.affine_dim = 3;
  std::map<int, int> remap;
  for (const Face& f : faces) {
    if (!f.alive) continue;
    for (int v : {f.a, f.b, f.c}) {
      if (remap.emplace(v, static_cast<int>(remap.size())).second) {
      }
    }
  }
  poly.vertices.resize(remap.size());
  for (const auto& [orig, local] : remap) poly.vertices[local] = pts[orig];
  for (const Face& f : faces) {
    if (!f.alive) continue;
    poly.facets.push_back({remap[f.a], remap[f.b], remap[f.c]});
    poly.halfspaces.emplace_back(f.n, f.off);
  }
  return poly;
}

}  // namespace

Polytope convex_hull(const PointSet& pts) { return convex_hull(pts.dim(), pts.points()); }

Polytope convex_hull(int dim, std::span<const VecN> pts) {
  if (pts.empty()) throw EmptySetError("convex_hull of an empty point set");
  double diam = 0.0;
  {
    VecN lo = pts[0], hi = pts[0];
    for (const auto& p : pts) {
      for (int a = 0; a < dim; ++a) {
        lo[a] = std::min(lo[a], p[a]);
        hi[a] = std::max(hi[a], p[a]);
      }
    }
    diam = distance(lo, hi);
  }
  const AffineFrame frame = affine_frame(dim, pts, diam);
  Polytope poly;
  poly.dim = dim;
  poly.affine_dim = frame.dim;
  poly.degenerate = frame.dim < dim;

  if (frame.dim == 0) {
    poly.vertices = {pts[0]};
    return poly;
  }
  if (frame.dim == 1) {
    double lo = 0.0, hi = 0.0;
    VecN plo = pts[0], phi = pts[0];
    for (const auto& p : pts) {
      const double t = dot(p - frame.origin, frame.basis[0]);
      if (t < lo) lo = t, plo = p;
      if (t > hi) hi = t, phi = p;
    }
    poly.vertices = {plo, phi};
    poly.facets = {{0, 1}};
    return poly;
  }
  if (frame.dim == 2) {
    std::vector<VecN> local;
    local.reserve(pts.size());
    for (const auto& p : pts) {
      const VecN r = p - frame.origin;
      local.push_back(VecN{dot(r, frame.basis[0]), dot(r, frame.basis[1])});
    }
    const auto idx = hull_2d_indices(local, kHullTolerance * std::max(diam * diam, 1.0));
    for (int i : idx) poly.vertices.push_back(pts[i]);
    if (dim == 2) {
      finalize_2d(poly);
    } else {
      for (std::size_t i = 0; i < idx.size(); ++i) {
        poly.facets.push_back({static_cast<int>(i), static_cast<int>((i + 1) % idx.size())});
      }
    }
    return poly;
  }
  return hull_3d(pts, frame, diam);
}

bool Polytope::contains(const VecN& x, double tol) const {
  if (!degenerate) {
    for (const auto& [n, off] : halfspaces) {
      if (dot(n, x) - off > tol) return false;
    }
    return true;
  }
  return distance(x) <= tol;
}

double Polytope::distance(const VecN& x) const {
  if (vertices.empty()) return std::numeric_limits<double>::infinity();
  if (affine_dim == 0) return mincurv::distance(x, vertices[0]);
  if (affine_dim == 1) return point_segment_distance(x, vertices[0], vertices[1]);
  if (!degenerate) {
    bool inside = true;
    for (const auto& [n, off] : halfspaces) {
      if (dot(n, x) - off > 0.0) {
        inside = false;
        break;
      }
    }
    if (inside) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : facets) {
      const double d = f.size() == 2 ? point_segment_distance(x, vertices[f[0]], vertices[f[1]])
                                     : point_triangle_distance(x, vertices[f[0]], vertices[f[1]], vertices[f[2]]);
      best = std::min(best, d);
    }
    return best;
  }
  // Planar polygon in 3D: fan triangulation covers it exactly.
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < vertices.size(); ++i) {
    best = std::min(best, point_triangle_distance(x, vertices[0], vertices[i], vertices[i + 1]));
  }
  return best;
}

double distance_to_hull(std::span<const VecN> points, const VecN& x) {
  return convex_hull(x.dim(), points).distance(x);
}

// ---------------------------------------------------------------------------
// Finite differences

GradHess grad_hess(const GridField& field, int i, int j, int k) {
  const GridSpec& g = field.spec();
  const int n = g.dim;
  const double h = g.spacing;
  GradHess out{VecN::zeros(n), SymMatrixN::zeros(n)};
  const int idx[3] = {i, j, k};
  auto val = [&](int di, int dj, int dk) { return field.at_or_far(i + di, j + dj, k + dk); };
  const double c = val(0, 0, 0);
  for (int a = 0; a < n; ++a) {
    int d[3] = {0, 0, 0};
    d[a] = 1;
    const double up = val(d[0], d[1], d[2]);
    const double dn = val(-d[0], -d[1], -d[2]);
    out.grad[a] = (up - dn) / (2.0 * h);
    out.hess.set(a, a, (up - 2.0 * c + dn) / (h * h));
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      int pa[3] = {0, 0, 0};
      int pb[3] = {0, 0, 0};
      pa[a] = 1;
      pb[b] = 1;
      const double pp = val(pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]);
      const double pm = val(pa[0] - pb[0], pa[1] - pb[1], pa[2] - pb[2]);
      const double mp = val(-pa[0] + pb[0], -pa[1] + pb[1], -pa[2] + pb[2]);
      const double mm = val(-pa[0] - pb[0], -pa[1] - pb[1], -pa[2] - pb[2]);
      out.hess.set(a, b, (pp - pm - mp + mm) / (4.0 * h * h));
    }
  }
  (void)idx;
  return out;
}

double unit_ball_volume(int dim) {
  switch (dim) {
    case 1:
      return 2.0;
    case 2:
      return std::numbers::pi;
    case 3:
      return 4.0 * std::numbers::pi / 3.0;
    default:
      throw PreconditionError("unit_ball_volume: unsupported dimension");
  }
}

}  // namespace mincurv

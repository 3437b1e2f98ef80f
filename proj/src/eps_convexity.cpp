#include "mincurv/eps_convexity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "mincurv/errors.hpp"

namespace mincurv {

PointSet eps_segment(const VecN& x, const VecN& y, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  PointSet out(x.dim());
  const double len = distance(x, y);
  out.insert(x);
  if (len <= kSnapTolerance) return out;
  const double ratio = len / eps;
  const double m = std::round(ratio);
  if (m >= 1.0 && std::abs(ratio - m) <= kRatioTol * std::max(1.0, ratio)) {
    const long steps = static_cast<long>(m);
    for (long k = 1; k < steps; ++k) out.insert(x + (y - x) * (static_cast<double>(k) / static_cast<double>(steps)));
  }
  out.insert(y);
  return out;
}

namespace {

// Adds the eps-segments of pairs (i, j), i < j < end, with j >= fresh_begin.
void add_pairs(PointSet& set, std::size_t fresh_begin, std::size_t end, double eps) {
  for (std::size_t j = fresh_begin; j < end; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const VecN a = set[i];
      const VecN b = set[j];
      const PointSet seg = eps_segment(a, b, eps);
      for (const auto& p : seg.points()) set.insert(p);
    }
  }
}

}  // namespace

PointSet ell_one_eps(const PointSet& A, double eps) {
  PointSet out = A;
  add_pairs(out, 0, A.size(), eps);
  return out;
}

EpsHullResult eps_convex_hull(const PointSet& A, double eps, int max_iter) {
  if (max_iter < 1) throw PreconditionError("max_iter must be at least 1");
  EpsHullResult r{A, 0, false};
  std::size_t processed = 0;  // pairs among points [0, processed) are done
  for (int pass = 1; pass <= max_iter; ++pass) {
    const std::size_t n = r.points.size();
    add_pairs(r.points, processed, n, eps);
    processed = n;
    if (r.points.size() == n) {
      r.converged = true;
      r.iterations = std::max(1, pass - 1);
      return r;
    }
    r.iterations = pass;
  }
  return r;
}

bool is_eps_convex(const PointSet& A, double eps) {
  for (std::size_t j = 0; j < A.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const PointSet seg = eps_segment(A[i], A[j], eps);
      for (const auto& p : seg.points()) {
        if (!A.contains(p)) return false;
      }
    }
  }
  return true;
}

std::vector<VecN> sample_segment(const VecN& a, const VecN& b, double delta) {
  if (!(delta > 0.0)) throw PreconditionError("sampling width must be positive");
  const double len = distance(a, b);
  const long n = std::max(1L, static_cast<long>(std::ceil(len / delta - 1e-12)));
  std::vector<VecN> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / static_cast<double>(n)));
  return out;
}

namespace {

// Keeps the first point seen in each cubical cell of the given side.
class CellThinner {
 public:
  CellThinner(int dim, double cell) : out_(dim), cell_(cell) {}

  void add(const VecN& p) {
    std::array<long long, kMaxDim> key{0, 0, 0};
    for (int a = 0; a < p.dim(); ++a) key[a] = static_cast<long long>(std::floor(p[a] / cell_));
    const std::size_t h = (static_cast<std::size_t>(key[0]) * 73856093u) ^ (static_cast<std::size_t>(key[1]) * 19349663u) ^
                          (static_cast<std::size_t>(key[2]) * 83492791u);
    auto& bucket = seen_[h];
    for (const auto& k : bucket) {
      if (k == key) return;
    }
    bucket.push_back(key);
    out_.insert(p);
  }
  PointSet take() { return std::move(out_); }
  const PointSet& points() const { return out_; }

 private:
  PointSet out_;
  double cell_;
  std::unordered_map<std::size_t, std::vector<std::array<long long, kMaxDim>>> seen_;
};

}  // namespace

PointSet hull_via_ellN(const PointSet& A, double delta) {
  if (A.empty()) throw EmptySetError("hull_via_ellN of an empty set");
  const int dim = A.dim();
  const double cell = delta / 4.0;
  CellThinner level(dim, cell);
  for (const auto& a : A.points()) level.add(a);
  for (std::size_t j = 0; j < A.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      for (const auto& p : sample_segment(A[i], A[j], delta)) level.add(p);
    }
  }
  PointSet current = level.take();
  for (int iter = 2; iter <= dim; ++iter) {
    CellThinner next(dim, cell);
    for (const auto& x : current.points()) next.add(x);
    for (const auto& x : current.points()) {
      for (const auto& a : A.points()) {
        for (const auto& p : sample_segment(x, a, delta)) next.add(p);
      }
    }
    current = next.take();
  }
  return current;
}

// ---------------------------------------------------------------------------
// Graph G

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

std::vector<VecN> candidate_points(const Primitive& p) {
  std::vector<VecN> out;
  const int n = p.dim();
  if (p.kind == Primitive::Kind::Ball) {
    const double r = 0.5 * p.radius;
    if (n == 2) {
      for (int k = 0; k < 8; ++k) {
        const double t = 2.0 * std::numbers::pi * k / 8.0;
        out.push_back(p.center + VecN{r * std::cos(t), r * std::sin(t)});
      }
    } else {
      for (int a = 0; a < 3; ++a) {
        for (double s : {1.0, -1.0}) out.push_back(p.center + VecN::unit(3, a) * (s * r));
      }
      const double d = r / std::sqrt(3.0);
      for (int c = 0; c < 8; ++c) {
        out.push_back(p.center + VecN{(c & 1 ? d : -d), (c & 2 ? d : -d), (c & 4 ? d : -d)});
      }
    }
  } else {
    for (int c = 0; c < (1 << n); ++c) {
      VecN corner = p.center;
      for (int a = 0; a < n; ++a) corner[a] = (c >> a) & 1 ? p.upper[a] : p.lower[a];
      out.push_back(p.center + (corner - p.center) * 0.5);
    }
  }
  return out;
}

}  // namespace

bool segment_positive(const GridField& u0, const VecN& a, const VecN& b) {
  for (const auto& p : sample_segment(a, b, 0.5 * u0.spec().spacing)) {
    if (!(interpolate(u0, p) > 0.0)) return false;
  }
  return true;
}

GraphG build_graph_G(const ObstacleSpec& spec, const GridField& u0, int samples_per_pair) {
  if (spec.empty()) throw EmptyObstacleError("graph G needs a nonempty obstacle");
  const auto& prims = spec.primitives();
  UnionFind uf(prims.size());
  for (std::size_t i = 0; i < prims.size(); ++i) {
    for (std::size_t j = i + 1; j < prims.size(); ++j) {
      if (primitives_overlap(prims[i], prims[j])) uf.unite(static_cast<int>(i), static_cast<int>(j));
    }
  }
  GraphG g;
  g.component_of.assign(prims.size(), -1);
  for (std::size_t i = 0; i < prims.size(); ++i) {
    const int root = uf.find(static_cast<int>(i));
    if (g.component_of[static_cast<std::size_t>(root)] < 0) {
      g.component_of[static_cast<std::size_t>(root)] = static_cast<int>(g.components.size());
      g.components.emplace_back();
    }
    const int c = g.component_of[static_cast<std::size_t>(root)];
    g.component_of[i] = c;
    g.components[static_cast<std::size_t>(c)].push_back(static_cast<int>(i));
  }

  // Candidate endpoints per component: all centers first, then interior samples.
  std::vector<std::vector<VecN>> candidates(g.components.size());
  for (std::size_t c = 0; c < g.components.size(); ++c) {
    for (int p : g.components[c]) candidates[c].push_back(prims[static_cast<std::size_t>(p)].center);
    for (int p : g.components[c]) {
      for (const auto& q : candidate_points(prims[static_cast<std::size_t>(p)])) candidates[c].push_back(q);
    }
  }

  UnionFind cuf(g.components.size());
  for (std::size_t c1 = 0; c1 < g.components.size(); ++c1) {
    for (std::size_t c2 = c1 + 1; c2 < g.components.size(); ++c2) {
      int tries = 0;
      bool found = false;
      for (std::size_t i = 0; i < candidates[c1].size() && !found && tries < samples_per_pair; ++i) {
        for (std::size_t j = 0; j < candidates[c2].size() && !found && tries < samples_per_pair; ++j) {
          ++tries;
          const VecN& x = candidates[c1][i];
          const VecN& y = candidates[c2][j];
          if (segment_positive(u0, x, y)) {
            g.edges.push_back({static_cast<int>(c1), static_cast<int>(c2), Segment{x, y}});
            cuf.unite(static_cast<int>(c1), static_cast<int>(c2));
            found = true;
          }
        }
      }
    }
  }
  g.connected = true;
  for (std::size_t c = 1; c < g.components.size(); ++c) {
    if (cuf.find(static_cast<int>(c)) != cuf.find(0)) g.connected = false;
  }
  return g;
}

std::string graph_to_dot(const GraphG& g) {
  std::ostringstream os;
  os << "graph G {\n";
  os << "  // connected: " << (g.connected ? "true" : "false") << "\n";
  for (std::size_t c = 0; c < g.components.size(); ++c) {
    os << "  c" << c << " [label=\"component " << c << ": primitives";
    for (int p : g.components[c]) os << ' ' << p;
    os << "\"];\n";
  }
  for (const auto& e : g.edges) {
    os << "  c" << e.u << " -- c" << e.v << " [label=\"" << e.witness.a << " - " << e.witness.b << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Segment complexes

void SegmentComplex::add_segment(const VecN& a, const VecN& b) { add_piece({a, b}); }

void SegmentComplex::add_piece(std::vector<VecN> generators) {
  PointSet gens(dim_);
  for (const auto& v : generators) {
    if (v.dim() != dim_) throw PreconditionError("segment complex: dimension mismatch");
    gens.insert(v);
  }
  if (gens.empty()) return;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    bool inside = true;
    for (const auto& v : gens.points()) {
      if (hulls_[i].distance(v) > 1e-9) {
        inside = false;
        break;
      }
    }
    if (inside) {
      // Keep the generators so adjacency through them is preserved.
      PointSet merged(dim_, pieces_[i]);
      for (const auto& v : gens.points()) merged.insert(v);
      pieces_[i] = merged.points();
      return;
    }
  }
  Polytope hull = convex_hull(gens);
  std::vector<VecN> merged = gens.points();
  PointSet merged_set(dim_, merged);
  std::vector<std::vector<VecN>> kept_pieces;
  std::vector<Polytope> kept_hulls;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    bool covered = true;
    for (const auto& v : pieces_[i]) {
      if (hull.distance(v) > 1e-9) {
        covered = false;
        break;
      }
    }
    if (covered) {
      for (const auto& v : pieces_[i]) merged_set.insert(v);
    } else {
      kept_pieces.push_back(std::move(pieces_[i]));
      kept_hulls.push_back(std::move(hulls_[i]));
    }
  }
  kept_pieces.push_back(merged_set.points());
  kept_hulls.push_back(std::move(hull));
  pieces_ = std::move(kept_pieces);
  hulls_ = std::move(kept_hulls);
}

std::vector<Segment> SegmentComplex::segments() const {
  std::vector<Segment> out;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (hulls_[i].affine_dim == 1) out.push_back({hulls_[i].vertices[0], hulls_[i].vertices[1]});
  }
  return out;
}

std::vector<int> SegmentComplex::component_labels() const {
  PointSet ids(dim_);
  std::vector<std::vector<long>> piece_ids(pieces_.size());
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    for (const auto& v : pieces_[i]) {
      ids.insert(v);
      piece_ids[i].push_back(ids.find(v));
    }
  }
  UnionFind uf(pieces_.size());
  std::unordered_map<long, int> owner;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    for (long id : piece_ids[i]) {
      const auto [it, fresh] = owner.emplace(id, static_cast<int>(i));
      if (!fresh) uf.unite(it->second, static_cast<int>(i));
    }
  }
  std::vector<int> labels(pieces_.size());
  std::unordered_map<int, int> remap;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const int root = uf.find(static_cast<int>(i));
    const auto [it, fresh] = remap.emplace(root, static_cast<int>(remap.size()));
    labels[i] = it->second;
  }
  return labels;
}

int SegmentComplex::component_count() const {
  const auto labels = component_labels();
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

double SegmentComplex::distance(const VecN& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : hulls_) {
    best = std::min(best, h.distance(x));
    if (best == 0.0) break;
  }
  return best;
}

namespace {

void sample_triangle(const VecN& a, const VecN& b, const VecN& c, double delta, PointSet& out) {
  const double longest = std::max({distance(a, b), distance(a, c), distance(b, c)});
  const long n = std::max(1L, static_cast<long>(std::ceil(longest / delta - 1e-12)));
  for (long i = 0; i <= n; ++i) {
    for (long j = 0; i + j <= n; ++j) {
      out.insert(a + (b - a) * (static_cast<double>(i) / n) + (c - a) * (static_cast<double>(j) / n));
    }
  }
}

}  // namespace

PointSet SegmentComplex::sample(double delta) const {
  if (!(delta > 0.0)) throw PreconditionError("sampling width must be positive");
  PointSet out(dim_);
  for (const auto& h : hulls_) {
    const auto& v = h.vertices;
    if (h.affine_dim == 0) {
      out.insert(v[0]);
    } else if (h.affine_dim == 1) {
      for (const auto& p : sample_segment(v[0], v[1], delta)) out.insert(p);
    } else if (h.affine_dim == 2) {
      for (std::size_t i = 1; i + 1 < v.size(); ++i) sample_triangle(v[0], v[i], v[i + 1], delta, out);
    } else {
      for (const auto& f : h.facets) sample_triangle(v[f[0]], v[f[1]], v[f[2]], delta, out);
      VecN lo = v[0], hi = v[0];
      for (const auto& p : v) {
        for (int a = 0; a < 3; ++a) {
          lo[a] = std::min(lo[a], p[a]);
          hi[a] = std::max(hi[a], p[a]);
        }
      }
      const GridSpec box = GridSpec::from_bounds(lo, hi, delta);
      for (std::size_t n = 0; n < box.size(); ++n) {
        const VecN x = box.node(n);
        if (h.contains(x, 1e-12)) out.insert(x);
      }
    }
  }
  return out;
}

PointSet SegmentComplex::vertices() const {
  PointSet out(dim_);
  for (const auto& p : pieces_) {
    for (const auto& v : p) out.insert(v);
  }
  return out;
}

SegmentComplex build_L(const GraphG& g, const ObstacleSpec& spec, const GridField& u0) {
  (void)u0;
  const auto& prims = spec.primitives();
  SegmentComplex L(spec.dim());
  auto host_center = [&](int component, const VecN& x) {
    int best = g.components[static_cast<std::size_t>(component)].front();
    for (int p : g.components[static_cast<std::size_t>(component)]) {
      if (prims[static_cast<std::size_t>(p)].psi(x) > prims[static_cast<std::size_t>(best)].psi(x)) best = p;
    }
    return prims[static_cast<std::size_t>(best)].center;
  };
  for (const auto& p : prims) L.add_piece({p.center});
  for (std::size_t i = 0; i < prims.size(); ++i) {
    for (std::size_t j = i + 1; j < prims.size(); ++j) {
      if (primitives_overlap(prims[i], prims[j])) L.add_segment(prims[i].center, prims[j].center);
    }
  }
  for (const auto& e : g.edges) {
    L.add_segment(e.witness.a, e.witness.b);
    const VecN ca = host_center(e.u, e.witness.a);
    const VecN cb = host_center(e.v, e.witness.b);
    if (distance(ca, e.witness.a) > kSnapTolerance) L.add_segment(ca, e.witness.a);
    if (distance(cb, e.witness.b) > kSnapTolerance) L.add_segment(cb, e.witness.b);
  }
  return L;
}

SegmentComplex t_operator(const SegmentComplex& gamma) {
  SegmentComplex out = gamma;
  const auto& pieces = gamma.pieces();
  PointSet ids(gamma.dim());
  std::vector<std::vector<long>> piece_ids(pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    for (const auto& v : pieces[i]) {
      ids.insert(v);
      piece_ids[i].push_back(ids.find(v));
    }
    std::sort(piece_ids[i].begin(), piece_ids[i].end());
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    for (std::size_t j = i + 1; j < pieces.size(); ++j) {
      std::vector<long> common;
      std::set_intersection(piece_ids[i].begin(), piece_ids[i].end(), piece_ids[j].begin(), piece_ids[j].end(),
                            std::back_inserter(common));
      if (common.empty()) continue;
      std::vector<VecN> gens = pieces[i];
      gens.insert(gens.end(), pieces[j].begin(), pieces[j].end());
      out.add_piece(std::move(gens));
    }
  }
  return out;
}

TClosureResult t_closure(const SegmentComplex& gamma, int k_max, double delta) {
  if (!gamma.polygonally_connected()) throw PreconditionError("t_closure needs a polygonally connected complex");
  if (k_max < 1) throw PreconditionError("k_max must be at least 1");
  TClosureResult r{gamma, 0, false, 0.0};
  for (int k = 1; k <= k_max; ++k) {
    SegmentComplex next = t_operator(r.complex);
    double growth = 0.0;
    const PointSet samples = next.sample(delta);
    for (const auto& p : samples.points()) growth = std::max(growth, r.complex.distance(p));
    r.last_growth = growth;
    r.complex = std::move(next);
    if (growth <= 2.0 * delta) {
      r.converged = true;
      r.iterations = std::max(1, k - 1);
      return r;
    }
    r.iterations = k;
  }
  return r;
}

double overlap_radius(double eps, int dim) {
  if (dim < 2) throw PreconditionError("overlap_radius needs N >= 2");
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  return std::sqrt(static_cast<double>(dim) * (dim - 1)) * eps;
}

}  // namespace mincurv

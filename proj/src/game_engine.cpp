#include "mincurv/game_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mincurv/errors.hpp"
#include "mincurv/parallel.hpp"

namespace mincurv {

int GameParams::rounds_for_time(double eps, double t0) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  if (t0 <= 0.0) return 0;
  return static_cast<int>(std::ceil(2.0 * t0 / (eps * eps) - 1e-9));
}

GameParams GameParams::for_time(int dim, double eps, double t0, int direction_count) {
  GameParams p;
  p.dim = dim;
  p.eps = eps;
  p.n_rounds = rounds_for_time(eps, t0);
  p.direction_count = direction_count;
  return p;
}

void GameParams::validate(const GridSpec& grid) const {
  if (grid.dim != dim) throw PreconditionError("game dimension does not match the grid");
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  if (n_rounds < 0) throw PreconditionError("n_rounds must be nonnegative");
  const double diameter = distance(grid.origin, grid.upper());
  if (!(eps < diameter / 4.0)) throw PreconditionError("eps must be smaller than a quarter of the grid diameter");
  const int min_dirs = dim == 2 ? 8 : 64;
  if (direction_count < min_dirs) {
    throw PreconditionError("at least " + std::to_string(min_dirs) + " directions are required in " +
                            std::to_string(dim) + "D");
  }
}

namespace {
double compute_gap(const std::vector<VecN>& dirs);
}  // namespace

DirectionSet::DirectionSet(std::vector<VecN> dirs) : dirs_(std::move(dirs)) {
  for (const auto& d : dirs_) {
    if (std::abs(norm(d) - 1.0) > 1e-12) throw PreconditionError("direction vectors must be unit");
  }
  gap_ = compute_gap(dirs_);
}

DirectionSet DirectionSet::hemisphere(int dim, int count) {
  if (count < 1) throw PreconditionError("direction count must be positive");
  std::vector<VecN> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double t = std::numbers::pi * k / count;
      dirs.push_back(VecN{std::cos(t), std::sin(t)});
    }
  } else if (dim == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = (k + 0.5) / count;
      const double s = std::sqrt(1.0 - z * z);
      const double phi = golden * k;
      dirs.push_back(normalized(VecN{s * std::cos(phi), s * std::sin(phi), z}));
    }
  } else {
    throw PreconditionError("direction sets exist for N = 2 and N = 3 only");
  }
  return DirectionSet(std::move(dirs));
}

namespace {

double compute_gap(const std::vector<VecN>& dirs) {
  if (dirs.empty()) return std::numbers::pi;
  if (dirs.front().dim() == 2) {
    std::vector<double> t;
    for (const auto& d : dirs) {
      double a = std::atan2(d[1], d[0]);
      if (a < 0.0) a += std::numbers::pi;
      if (a >= std::numbers::pi) a -= std::numbers::pi;
      t.push_back(a);
    }
    std::sort(t.begin(), t.end());
    double gap = t.front() + std::numbers::pi - t.back();
    for (std::size_t i = 1; i < t.size(); ++i) gap = std::max(gap, t[i] - t[i - 1]);
    return 0.5 * gap;
  }
  // Covering radius estimated on a fine Fibonacci probe of the hemisphere.
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  constexpr int kProbe = 4000;
  double worst = 0.0;
  for (int k = 0; k < kProbe; ++k) {
    const double z = (k + 0.5) / kProbe;
    const double s = std::sqrt(1.0 - z * z);
    const VecN q{s * std::cos(golden * k), s * std::sin(golden * k), z};
    double best = 0.0;
    for (const auto& d : dirs) best = std::max(best, std::abs(dot(q, d)));
    worst = std::max(worst, std::acos(std::min(1.0, best)));
  }
  return worst;
}

}  // namespace

namespace {

// Multilinear interpolation weights for a fixed displacement (in index units)
// applied to any node whose stencil stays inside the grid.
struct Stencil {
  std::array<long, 8> offset{};
  std::array<double, 8> weight{};
  int corners = 0;
  std::array<int, kMaxDim> lo{0, 0, 0};
  std::array<int, kMaxDim> hi{0, 0, 0};
};

Stencil make_stencil(const GridSpec& g, const std::array<double, kMaxDim>& disp) {
  Stencil st;
  int base[kMaxDim] = {0, 0, 0};
  double frac[kMaxDim] = {0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) {
    base[a] = static_cast<int>(std::floor(disp[a]));
    frac[a] = disp[a] - base[a];
    st.lo[a] = base[a];
    st.hi[a] = base[a] + (frac[a] > 0.0 ? 1 : 0);
  }
  const long strides[3] = {1, g.dims[0], static_cast<long>(g.dims[0]) * g.dims[1]};
  for (int corner = 0; corner < (1 << g.dim); ++corner) {
    double w = 1.0;
    long off = 0;
    for (int a = 0; a < g.dim; ++a) {
      const bool up = (corner >> a) & 1;
      w *= up ? frac[a] : 1.0 - frac[a];
      off += (base[a] + (up ? 1 : 0)) * strides[a];
    }
    if (w == 0.0) continue;
    st.offset[st.corners] = off;
    st.weight[st.corners] = w;
    ++st.corners;
  }
  return st;
}

inline double apply(const double* at, const Stencil& st) {
  double v = 0.0;
  for (int c = 0; c < st.corners; ++c) v += st.weight[c] * at[st.offset[c]];
  return v;
}

std::array<double, kMaxDim> displacement(const VecN& v, double scale, int dim) {
  std::array<double, kMaxDim> d{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) d[a] = scale * v[a];
  return d;
}

// Nodes whose every stencil corner lies inside the grid.
struct SafeBox {
  std::array<int, kMaxDim> lo{0, 0, 0};
  std::array<int, kMaxDim> hi{0, 0, 0};
  bool contains(const std::array<int, kMaxDim>& ijk, int dim) const {
    for (int a = 0; a < dim; ++a) {
      if (ijk[a] < lo[a] || ijk[a] > hi[a]) return false;
    }
    return true;
  }
};

SafeBox safe_box(const GridSpec& g, const std::vector<Stencil>& stencils) {
  SafeBox box;
  for (int a = 0; a < g.dim; ++a) {
    int lo = 0;
    int hi = 0;
    for (const auto& st : stencils) {
      lo = std::min(lo, st.lo[a]);
      hi = std::max(hi, st.hi[a]);
    }
    box.lo[a] = -lo;
    box.hi[a] = g.dims[a] - 1 - hi;
  }
  return box;
}

double interp_at(const GridField& f, const std::array<int, kMaxDim>& ijk, const std::array<double, kMaxDim>& disp) {
  return interpolate_index(f, {ijk[0] + disp[0], ijk[1] + disp[1], ijk[2] + disp[2]});
}

void check_same_grid(const GridField& a, const GridField& b) {
  if (!(a.spec() == b.spec())) throw PreconditionError("fields must share a grid");
}

// Continuation value min(U(x + eps v), U(x - eps v)) for an arbitrary unit v.
double continuation(const GridField& prev, const std::array<int, kMaxDim>& ijk, const VecN& v, double scale) {
  const auto d = displacement(v, scale, prev.spec().dim);
  const std::array<double, kMaxDim> m{-d[0], -d[1], -d[2]};
  return std::min(interp_at(prev, ijk, d), interp_at(prev, ijk, m));
}

// The continuation min(f+, f-) with f+-(t) = U(x +- eps v(t)) peaks where
// f+ = f-. The best sampled angle brackets that crossing within one angular
// step on either side; regula falsi (Illinois) locates it.
double polish_2d(const GridField& prev, const std::array<int, kMaxDim>& ijk, const VecN& best_dir, double scale,
                 double half_width, double best) {
  const double center = std::atan2(best_dir[1], best_dir[0]);
  auto branches = [&](double t, double& fp, double& fm) {
    const auto d = displacement(VecN{std::cos(t), std::sin(t)}, scale, 2);
    fp = interp_at(prev, ijk, d);
    fm = interp_at(prev, ijk, {-d[0], -d[1], 0.0});
  };
  double a = center - half_width;
  double b = center + half_width;
  double pa, ma, pb, mb;
  branches(a, pa, ma);
  branches(b, pb, mb);
  best = std::max({best, std::min(pa, ma), std::min(pb, mb)});
  double da = pa - ma;
  double db = pb - mb;
  if (!(da * db < 0.0)) return best;
  int side = 0;
  for (int it = 0; it < 8; ++it) {
    const double c = (a * db - b * da) / (db - da);
    double pc, mc;
    branches(c, pc, mc);
    best = std::max(best, std::min(pc, mc));
    const double dc = pc - mc;
    if (dc == 0.0) break;
    if (dc * db < 0.0) {
      a = b;
      da = db;
      b = c;
      db = dc;
      side = 0;
    } else {
      b = c;
      db = dc;
      if (side == 1) da *= 0.5;
      side = 1;
    }
  }
  return best;
}

double polish_3d(const GridField& prev, const std::array<int, kMaxDim>& ijk, VecN v, double scale, double step,
                 double best) {
  for (int it = 0; it < 16; ++it) {
    const auto basis = orthogonal_complement(v);
    bool moved = false;
    for (int k = 0; k < 4 && !moved; ++k) {
      const VecN& t = basis[static_cast<std::size_t>(k / 2)];
      const double s = (k % 2 == 0 ? 1.0 : -1.0) * step;
      const VecN cand = normalized(v * std::cos(s) + t * std::sin(s));
      const double val = continuation(prev, ijk, cand, scale);
      if (val > best) {
        best = val;
        v = cand;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

}  // namespace

GridField dpp_step(const GridField& prev, const GridField& psi_field, const GameParams& params,
                   const DirectionSet& dirs) {
  check_same_grid(prev, psi_field);
  const GridSpec& g = prev.spec();
  if (dirs.size() == 0 || dirs.dim() != g.dim) throw PreconditionError("direction set does not match the grid");
  const double scale = params.eps / g.spacing;
  std::vector<Stencil> plus, minus;
  std::vector<std::array<double, kMaxDim>> dplus, dminus;
  for (const auto& v : dirs.vectors()) {
    dplus.push_back(displacement(v, scale, g.dim));
    dminus.push_back(displacement(-v, scale, g.dim));
    plus.push_back(make_stencil(g, dplus.back()));
    minus.push_back(make_stencil(g, dminus.back()));
  }
  std::vector<Stencil> all = plus;
  all.insert(all.end(), minus.begin(), minus.end());
  const SafeBox safe = safe_box(g, all);
  const double polish_width = g.dim == 2 ? std::numbers::pi / static_cast<double>(dirs.size()) : 0.0;
  const double polish_step = g.dim == 3 ? dirs.angular_gap() : 0.0;

  const auto pv = prev.values();
  const auto psi = psi_field.values();
  std::vector<double> out(g.size());
  parallel_for(g.size(), params.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      const auto ijk = g.multi_index(n);
      const bool fast = safe.contains(ijk, g.dim);
      const double* at = pv.data() + n;
      double best = -std::numeric_limits<double>::infinity();
      std::size_t best_k = 0;
      for (std::size_t k = 0; k < plus.size(); ++k) {
        double a, b;
        if (fast) {
          a = apply(at, plus[k]);
          b = apply(at, minus[k]);
        } else {
          a = interp_at(prev, ijk, dplus[k]);
          b = interp_at(prev, ijk, dminus[k]);
        }
        const double m = std::min(a, b);
        if (m > best) {
          best = m;
          best_k = k;
        }
      }
      if (params.polish) {
        best = g.dim == 2 ? polish_2d(prev, ijk, dirs[best_k], scale, polish_width, best)
                          : polish_3d(prev, ijk, dirs[best_k], scale, polish_step, best);
      }
      out[n] = std::max(psi[n], best);
    }
  });
  return GridField(g, std::move(out), prev.far_value());
}

GridField alt_dpp_step(const GridField& prev, const GridField& psi_field, const GameParams& params,
                       const DirectionSet& normal_dirs) {
  check_same_grid(prev, psi_field);
  const GridSpec& g = prev.spec();
  if (normal_dirs.size() == 0 || normal_dirs.dim() != g.dim) {
    throw PreconditionError("direction set does not match the grid");
  }
  const double scale = params.eps / g.spacing;
  const int tangents = params.tangent_count > 0 ? params.tangent_count : (g.dim == 2 ? 2 : 32);
  // tangent stencils grouped by normal
  std::vector<Stencil> stencils;
  std::vector<std::array<double, kMaxDim>> disps;
  std::vector<std::size_t> group_begin;
  for (const auto& nrm : normal_dirs.vectors()) {
    group_begin.push_back(stencils.size());
    const auto basis = orthogonal_complement(nrm);
    if (g.dim == 2) {
      for (double s : {1.0, -1.0}) {
        disps.push_back(displacement(basis[0] * s, scale, 2));
        stencils.push_back(make_stencil(g, disps.back()));
      }
    } else {
      for (int k = 0; k < tangents; ++k) {
        const double t = 2.0 * std::numbers::pi * k / tangents;
        disps.push_back(displacement(normalized(basis[0] * std::cos(t) + basis[1] * std::sin(t)), scale, 3));
        stencils.push_back(make_stencil(g, disps.back()));
      }
    }
  }
  group_begin.push_back(stencils.size());
  const SafeBox safe = safe_box(g, stencils);
  const auto pv = prev.values();
  const auto psi = psi_field.values();
  std::vector<double> out(g.size());
  parallel_for(g.size(), params.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      const auto ijk = g.multi_index(n);
      const bool fast = safe.contains(ijk, g.dim);
      const double* at = pv.data() + n;
      double inf_over_normals = std::numeric_limits<double>::infinity();
      for (std::size_t grp = 0; grp + 1 < group_begin.size(); ++grp) {
        double sup = -std::numeric_limits<double>::infinity();
        for (std::size_t s = group_begin[grp]; s < group_begin[grp + 1]; ++s) {
          sup = std::max(sup, fast ? apply(at, stencils[s]) : interp_at(prev, ijk, disps[s]));
        }
        inf_over_normals = std::min(inf_over_normals, sup);
      }
      out[n] = std::max(psi[n], inf_over_normals);
    }
  });
  return GridField(g, std::move(out), prev.far_value());
}

GridField run_game(const GridField& u0, const GridField& psi_field, const GameParams& params,
                   const DirectionSet& dirs, int snapshot_every, const SnapshotObserver& observer, GameKind kind) {
  check_same_grid(u0, psi_field);
  if (params.n_rounds < 0) throw PreconditionError("n_rounds must be nonnegative");
  GridField current = u0;
  auto emit = [&](int round) {
    if (observer) observer(Snapshot{round, params.time_of_round(round), current});
  };
  emit(0);
  for (int k = 1; k <= params.n_rounds; ++k) {
    current = kind == GameKind::Standard ? dpp_step(current, psi_field, params, dirs)
                                         : alt_dpp_step(current, psi_field, params, dirs);
    if ((snapshot_every > 0 && k % snapshot_every == 0) || k == params.n_rounds) emit(k);
  }
  return current;
}

std::vector<Snapshot> run_game(const GridField& u0, const GridField& psi_field, const GameParams& params,
                               const DirectionSet& dirs, int snapshot_every, GameKind kind) {
  std::vector<Snapshot> snaps;
  run_game(u0, psi_field, params, dirs, snapshot_every, [&](const Snapshot& s) { snaps.push_back(s); }, kind);
  return snaps;
}

namespace {

int checked_sign(int s) {
  if (s != 1 && s != -1) throw PreconditionError("signs must be +1 or -1");
  return s;
}

}  // namespace

Trajectory play_concentric_paul(const VecN& x0, const VecN& z, const GameParams& params,
                                std::span<const int> carol_signs) {
  if (norm(x0 - z) <= kSnapTolerance) throw PreconditionError("concentric strategy: start coincides with the center");
  if (carol_signs.size() < static_cast<std::size_t>(params.n_rounds)) {
    throw PreconditionError("concentric strategy: one sign per round is required");
  }
  Trajectory tr;
  tr.start_time = params.time_of_round(params.n_rounds);
  tr.positions.push_back(x0);
  for (int k = 0; k < params.n_rounds; ++k) {
    const VecN& x = tr.positions.back();
    const VecN v = orthogonal_complement(x - z)[0];
    const int b = checked_sign(carol_signs[static_cast<std::size_t>(k)]);
    tr.choices.push_back({v, b, false});
    tr.positions.push_back(x + v * (b * params.eps));
  }
  return tr;
}

Trajectory play_concentric_carol(const VecN& x0, const VecN& z, const GameParams& params,
                                 std::span<const VecN> paul_dirs) {
  if (norm(x0 - z) <= kSnapTolerance) throw PreconditionError("concentric strategy: start coincides with the center");
  if (paul_dirs.size() < static_cast<std::size_t>(params.n_rounds)) {
    throw PreconditionError("concentric strategy: one direction per round is required");
  }
  Trajectory tr;
  tr.start_time = params.time_of_round(params.n_rounds);
  tr.positions.push_back(x0);
  for (int k = 0; k < params.n_rounds; ++k) {
    const VecN& x = tr.positions.back();
    const VecN v = normalized(paul_dirs[static_cast<std::size_t>(k)]);
    const int b = dot(x - z, v) >= 0.0 ? 1 : -1;
    tr.choices.push_back({v, b, false});
    tr.positions.push_back(x + v * (b * params.eps));
  }
  return tr;
}

Trajectory play_segment_paul(const VecN& x0, const VecN& a, const VecN& b, const EnlargedObstacle& enlarged,
                             const GameParams& params, std::span<const int> carol_signs) {
  if (distance(a, b) <= kSnapTolerance) throw PreconditionError("segment strategy: endpoints coincide");
  if (point_segment_distance(x0, a, b) > 1e-9) throw PreconditionError("segment strategy: start is not on the segment");
  const VecN v = normalized(b - a);
  Trajectory tr;
  tr.start_time = params.time_of_round(params.n_rounds);
  tr.positions.push_back(x0);
  for (int k = 0; k <= params.n_rounds; ++k) {
    const VecN& x = tr.positions.back();
    if (enlarged.psi_eps(x) > 0.0) {
      tr.choices.push_back({v, 0, true});
      break;
    }
    if (k == params.n_rounds) break;
    if (static_cast<std::size_t>(k) >= carol_signs.size()) {
      throw PreconditionError("segment strategy: one sign per round is required");
    }
    const int s = checked_sign(carol_signs[static_cast<std::size_t>(k)]);
    tr.choices.push_back({v, s, false});
    tr.positions.push_back(x + v * (s * params.eps));
  }
  return tr;
}

}  // namespace mincurv

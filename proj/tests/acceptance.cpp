// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Optional arguments select criteria by number, e.g. `acceptance 5 6 7`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "mincurv/config.hpp"
#include "mincurv/eps_convexity.hpp"
#include "mincurv/experiments.hpp"
#include "mincurv/game_engine.hpp"
#include "mincurv/properties.hpp"
#include "oracles.hpp"

using namespace mincurv;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

RunConfig shipped(const std::string& name) { return load_config(fs::path(MINCURV_CONFIG_DIR) / (name + ".toml")); }

void info(const std::string& text) { std::printf("INFO %s\n", text.c_str()); std::fflush(stdout); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------

Verdict shrinking_circle() {
  auto t0 = Clock::now();
  const ShrinkingBallReport game = experiment_shrinking_ball(shipped("disc2d_game"));
  const double game_s = seconds_since(t0);
  t0 = Clock::now();
  const ShrinkingBallReport pde = experiment_shrinking_ball(shipped("disc2d_pde"));
  const double pde_s = seconds_since(t0);
  const bool ok = game.sup_rel_error <= 0.05 && game.window_samples > 0 && game_s <= 300.0 &&
                  pde.sup_rel_error <= 0.05 && pde.window_samples > 0;
  return {ok, fmt::format("game eps=0.02 h=0.01: sup rel error {:.4f} over {} snapshots in {:.1f} s; "
                          "pde h=0.005: {:.5f} over {} snapshots in {:.1f} s",
                          game.sup_rel_error, game.window_samples, game_s, pde.sup_rel_error, pde.window_samples,
                          pde_s)};
}

Verdict sphere_extinction() {
  const auto t0 = Clock::now();
  const ShrinkingBallReport r = experiment_shrinking_ball(shipped("sphere3d_pde"));
  const double s = seconds_since(t0);
  const bool ok = std::isfinite(r.extinction_time) && r.extinction_time >= 0.45 && r.extinction_time <= 0.55 &&
                  s <= 900.0;
  return {ok, fmt::format("extinction at t = {:.4f} (expected 0.5) in {:.1f} s", r.extinction_time, s)};
}

Verdict convex_hull_recovery() {
  info("3D two-ball run (B_5 start, eps=0.1, h=0.05) exceeds the 60 min budget on this machine; "
       "running the 2D stadium version at h=0.01");
  const RunConfig cfg = shipped("stadium2d_game");
  const auto t0 = Clock::now();
  const ConvexHullReport r = experiment_convex_hull(cfg);
  const double s = seconds_since(t0);
  for (const auto& row : r.series.rows()) {
    if (std::abs(row.time - r.plateau_time) < 1e-9) {
      info(fmt::format("at plateau detection t = {:.2f}: distance to co(K) {:.3f}, to co(K_eps) {:.3f}", row.time,
                       row.dist_coK, row.dist_coKeps));
    }
  }
  const bool ok = r.graph.connected && std::isfinite(r.plateau_time) && r.plateau_time < 3.0 && r.sandwich_lower &&
                  r.sandwich_upper;
  return {ok, fmt::format("G connected: {}; plateau from t = {:.2f}; at t = {:.2f}: co(K) inside Omega: {}, "
                          "Omega inside co(K) + B_{:.2f}: {} (distance to co(K) {:.3f}); {:.1f} s",
                          r.graph.connected, r.plateau_time, r.final_time, r.sandwich_lower, r.sandwich_radius,
                          r.sandwich_upper, r.final_dist_coK, s)};
}

Verdict min_vs_mean() {
  const RunConfig cfg = shipped("capsule3d_mean_vs_min");
  const double h = cfg.grid.spacing;
  const MeanVsMinReport r = experiment_mean_vs_min(cfg);
  double min_neck = std::numeric_limits<double>::infinity();
  for (const auto& s : r.minimal) {
    if (s.time >= 1.0 - 1e-9 && s.time <= 2.0 + 1e-9) min_neck = std::min(min_neck, s.neck);
  }
  // Strictly decreasing until pinch-off; after that the neck stays at 0.
  bool decreasing = true;
  double mean_at_2 = std::numeric_limits<double>::infinity();
  double pinch = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 1; i < r.mean.size(); ++i) {
    if (r.mean[i].time > 2.0 + 1e-9) break;
    const double prev = r.mean[i - 1].neck;
    const double cur = r.mean[i].neck;
    if (prev > 0.0 ? !(cur < prev) : cur != 0.0) decreasing = false;
    if (cur == 0.0 && prev > 0.0) pinch = r.mean[i].time;
    mean_at_2 = cur;
  }
  const bool ok = std::isfinite(min_neck) && min_neck >= 1.0 - 3.0 * h && decreasing && mean_at_2 < 1.0 - 5.0 * h;
  return {ok, fmt::format("h = {}: min-curvature neck >= {:.3f} on [1,2] (bound {:.2f}); mean-curvature neck "
                          "strictly decreasing: {}, {:.3f} at t = 2 (bound {:.2f}), pinch-off at t = {:.2f}",
                          h, min_neck, 1.0 - 3.0 * h, decreasing, mean_at_2, 1.0 - 5.0 * h, pinch)};
}

// Suites from the property runner with the given name prefix.
Verdict property_group(const std::vector<PropertyResult>& all, const std::string& prefix) {
  bool ok = true;
  int count = 0;
  std::string detail;
  for (const auto& r : all) {
    if (r.name.rfind(prefix, 0) != 0) continue;
    ++count;
    ok = ok && r.passed();
    detail += fmt::format("{}{} {}/{}", detail.empty() ? "" : "; ", r.name, r.trials - r.failures, r.trials);
    if (!r.passed() && !r.detail.empty()) detail += " [" + r.detail + "]";
  }
  return {ok && count > 0, detail};
}

GridSpec random_grid(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(0.04, 0.08);
  const double h = u(rng);
  return dim == 2 ? GridSpec::from_bounds(VecN{-1.0, -1.0}, VecN{1.0, 1.0}, h)
                  : GridSpec::from_bounds(VecN{-1.0, -1.0, -1.0}, VecN{1.0, 1.0, 1.0}, 2 * h);
}

bool away_from_boundary(const GridSpec& g, std::size_t f, double margin) {
  const VecN x = g.node(f);
  const VecN top = g.upper();
  for (int a = 0; a < g.dim; ++a) {
    if (x[a] - g.origin[a] < margin || top[a] - x[a] < margin) return false;
  }
  return true;
}

// Affine fixed point and quadratic decrease of the DPP step on random data.
Verdict dpp_shapes(int trials) {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ue(0.05, 0.15);
  int affine_fail = 0, quad_fail = 0;
  double worst_affine = 0.0, worst_quad = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int dim = t % 2 == 0 ? 2 : 3;
    const GridSpec g = random_grid(rng, dim);
    GameParams p;
    p.dim = dim;
    p.eps = ue(rng);
    p.direction_count = dim == 2 ? 32 : 256;
    p.polish = t % 4 < 2;
    const DirectionSet dirs = DirectionSet::hemisphere(dim, p.direction_count);
    const GridField none = GridField::constant(g, -1e30, -1e30);
    VecN a = VecN::zeros(dim);
    for (int i = 0; i < dim; ++i) a[i] = u(rng);
    const double c = u(rng);
    const GridField aff = GridField::sample(g, -10.0, [&](const VecN& x) { return dot(a, x) + c; });
    const GridField quad = GridField::sample(g, -10.0, [&](const VecN& x) { return -norm2(x); });
    const GridField na = dpp_step(aff, none, p, dirs);
    const GridField nq = dpp_step(quad, none, p, dirs);
    const double h = g.spacing;
    const double affine_tol = norm(a) * p.eps * dirs.angular_gap() + 1e-12;
    bool fa = false, fq = false;
    for (std::size_t f = 0; f < g.size(); ++f) {
      if (!away_from_boundary(g, f, p.eps + h)) continue;
      const VecN x = g.node(f);
      const double ea = std::abs(na.at(f) - aff.at(f));
      worst_affine = std::max(worst_affine, ea / affine_tol);
      fa = fa || ea > affine_tol;
      // Multilinear interpolation of -|x|^2 errs by at most N h^2 / 4.
      const double quad_tol = dim * h * h / 4.0 + 2.0 * p.eps * norm(x) * std::sin(dirs.angular_gap()) + 1e-12;
      const double eq = std::abs(nq.at(f) - (-norm2(x) - p.eps * p.eps));
      worst_quad = std::max(worst_quad, eq / quad_tol);
      fq = fq || eq > quad_tol;
    }
    affine_fail += fa;
    quad_fail += fq;
  }
  return {affine_fail == 0 && quad_fail == 0,
          fmt::format("affine fixed point {}/{} (worst error/tolerance {:.3f}); quadratic decrease {}/{} ({:.3f})",
                      trials - affine_fail, trials, worst_affine, trials - quad_fail, trials, worst_quad)};
}

// Segment strategy from every lattice start on the two-ball axis.
Verdict segment_strategy() {
  int starts = 0, failures = 0, worst = 0;
  for (int dim : {2, 3}) {
    const VecN a = VecN::unit(dim, 0) * -2.0;
    const VecN b = VecN::unit(dim, 0) * 2.0;
    const ObstacleSpec k(dim, {Primitive::ball(a, 1.0), Primitive::ball(b, 1.0)});
    for (double eps : {0.1, 0.05}) {
      const EnlargedObstacle e(k, eps);
      const int bound = static_cast<int>(std::ceil(distance(a, b) / eps - 1e-9));
      GameParams p;
      p.dim = dim;
      p.eps = eps;
      p.n_rounds = bound;
      const int lattice = static_cast<int>(std::lround(distance(a, b) / eps));
      for (int i = 0; i <= lattice; ++i) {
        const VecN x0 = a + (b - a) * (static_cast<double>(i) / lattice);
        // Carol keeps pushing toward one end; both ends are tried.
        for (int sgn : {1, -1}) {
          ++starts;
          const std::vector<int> signs(static_cast<std::size_t>(bound), sgn);
          const Trajectory tr = play_segment_paul(x0, a, b, e, p, signs);
          const int rounds = static_cast<int>(tr.positions.size()) - 1;
          worst = std::max(worst, rounds);
          const bool stopped = !tr.choices.empty() && tr.choices.back().stopped;
          bool on_segment = true;
          for (const auto& x : tr.positions) on_segment = on_segment && point_segment_distance(x, a, b) < 1e-9;
          if (!stopped || rounds > bound || !(e.psi_eps(tr.positions.back()) > 0.0) || !on_segment) ++failures;
        }
      }
    }
  }
  return {failures == 0, fmt::format("segment strategy reached K_eps from {}/{} lattice starts, at most {} rounds",
                                     starts - failures, starts, worst)};
}

Verdict strategy_invariants(const std::vector<PropertyResult>& all) {
  Verdict props = property_group(all, "strategy.");
  Verdict seg = segment_strategy();
  return {props.pass && seg.pass, props.detail + "; " + seg.detail};
}

Verdict dpp_properties(const std::vector<PropertyResult>& all) {
  Verdict props = property_group(all, "dpp.");
  Verdict shapes = dpp_shapes(100);
  return {props.pass && shapes.pass, props.detail + "; " + shapes.detail};
}

// Closure under eps-segments by plain repeated pair scans.
std::vector<VecN> brute_closure(std::vector<VecN> pts, double eps) {
  auto has = [&](const VecN& p) {
    return std::any_of(pts.begin(), pts.end(), [&](const VecN& q) { return oracle::plain_distance(p, q) < 1e-9; });
  };
  for (bool grew = true; grew;) {
    grew = false;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double ratio = oracle::plain_distance(pts[i], pts[j]) / eps;
        const double m = std::round(ratio);
        if (m < 2.0 || std::abs(ratio - m) > 1e-9 * std::max(1.0, ratio)) continue;
        for (int k = 1; k < static_cast<int>(m); ++k) {
          const VecN p = pts[i] + (pts[j] - pts[i]) * (k / m);
          if (!has(p)) {
            pts.push_back(p);
            grew = true;
          }
        }
      }
    }
  }
  return pts;
}

double complex_hull_gap(const std::vector<VecN>& hull_pts, const SegmentComplex& c, double delta) {
  const PointSet s = c.sample(delta);
  for (const auto& p : s.points()) {
    if (!oracle::in_hull(hull_pts, p, 1e-9)) return std::numeric_limits<double>::infinity();
  }
  return oracle::coverage_gap(hull_pts, s.points(), delta / 2.0);
}

Verdict eps_convexity_suite() {
  std::vector<std::string> failed;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) failed.push_back(what);
  };

  expect(eps_segment(VecN{0.0, 0.0}, VecN{1.0, 0.0}, 0.5).size() == 3, "eps_segment M=2");
  expect(eps_segment(VecN{0.0, 0.0}, VecN{1.0, 0.0}, 0.4).size() == 2, "eps_segment endpoint branch");
  expect(eps_segment(VecN{0.0, 0.0}, VecN{0.3, 0.4}, 0.1).size() == 6, "eps_segment M=5");

  const std::vector<VecN> sq{VecN{0.0, 0.0}, VecN{1.0, 0.0}, VecN{1.0, 1.0}, VecN{0.0, 1.0}};
  const EpsHullResult square = eps_convex_hull(PointSet(2, sq), 0.5);
  expect(square.converged && square.points.size() == 9, "square closure = 9 points");
  info(fmt::format("square corners, eps 0.5: one l^1 pass gives {} points, the closure {} after {} iterations",
                   ell_one_eps(PointSet(2, sq), 0.5).size(), square.points.size(), square.iterations));

  std::mt19937_64 rng(808);
  std::uniform_int_distribution<int> coord(0, 4);
  std::uniform_int_distribution<int> count(3, 12);
  int lattice_ok = 0;
  const int lattice_trials = 60;
  for (int t = 0; t < lattice_trials; ++t) {
    const int dim = t % 3 == 0 ? 3 : 2;
    PointSet a(dim);
    const int n = count(rng);
    while (static_cast<int>(a.size()) < n) {
      a.insert(dim == 2 ? VecN{1.0 * coord(rng), 1.0 * coord(rng)}
                        : VecN{1.0 * coord(rng), 1.0 * coord(rng), 1.0 * coord(rng)});
    }
    const EpsHullResult r = eps_convex_hull(a, 1.0);
    const auto ref = brute_closure(a.points(), 1.0);
    bool same = r.points.size() == ref.size();
    for (const auto& p : ref) same = same && r.points.contains(p);
    if (r.converged && is_eps_convex(r.points, 1.0) && same) ++lattice_ok;
  }
  expect(lattice_ok == lattice_trials, "lattice closures");

  std::uniform_real_distribution<double> u(0.0, 1.0);
  int hull_ok = 0;
  double worst_gap = 0.0;
  for (int t = 0; t < 50; ++t) {
    for (int dim : {2, 3}) {
      const double delta = dim == 2 ? 0.05 : 0.1;
      std::vector<VecN> pts;
      for (int i = 0; i < 6; ++i) pts.push_back(dim == 2 ? VecN{u(rng), u(rng)} : VecN{u(rng), u(rng), u(rng)});
      const PointSet s = hull_via_ellN(PointSet(dim, pts), delta);
      bool inside = true;
      for (const auto& p : s.points()) inside = inside && oracle::in_hull(pts, p, 1e-9);
      const double gap = oracle::coverage_gap(pts, s.points(), delta);
      worst_gap = std::max(worst_gap, gap / delta);
      if (inside && gap <= delta) ++hull_ok;
    }
  }
  expect(hull_ok == 100, "hull_via_ellN");

  const double delta = 0.01;
  SegmentComplex v(2);
  v.add_segment(VecN{0.0, 0.0}, VecN{1.0, 0.0});
  v.add_segment(VecN{0.0, 0.0}, VecN{0.3, 1.0});
  const double gv = complex_hull_gap({VecN{0.0, 0.0}, VecN{1.0, 0.0}, VecN{0.3, 1.0}}, t_closure(v, 5, delta).complex,
                                     delta);
  SegmentComplex sqc(2);
  for (int i = 0; i < 4; ++i) sqc.add_segment(sq[i], sq[(i + 1) % 4]);
  const double gs = complex_hull_gap(sq, t_closure(sqc, 5, delta).complex, delta);
  const std::vector<VecN> zig{VecN{0.0, 0.0}, VecN{1.0, 0.6}, VecN{2.0, 0.0}, VecN{3.0, 0.7}};
  SegmentComplex path(2);
  for (int i = 0; i < 3; ++i) path.add_segment(zig[i], zig[i + 1]);
  const double gz = complex_hull_gap(zig, t_closure(path, 3, delta).complex, delta);
  expect(gv <= 2 * delta && gs <= 2 * delta && gz <= 2 * delta, "t_closure");

  bool overlap = true;
  for (int n = 2; n <= 6; ++n) {
    for (double eps : {0.1, 0.05, 0.3}) {
      const double d = n * eps - eps / 2;
      overlap = overlap && std::abs(overlap_radius(eps, n) - std::sqrt(d * d - eps * eps / 4)) <= 1e-15 &&
                std::abs(overlap_radius(eps, n) * overlap_radius(eps, n) - n * (n - 1) * eps * eps) <= 1e-15;
    }
  }
  expect(overlap, "overlap_radius");

  std::string detail = fmt::format(
      "lattice closures {}/{}; hull_via_ellN {}/100 (worst gap {:.2f} delta); t_closure gaps V {:.4f}, square "
      "{:.4f}, zig-zag {:.4f} (bound {})",
      lattice_ok, lattice_trials, hull_ok, worst_gap, gv, gs, gz, 2 * delta);
  for (const auto& f : failed) detail += "; failed: " + f;
  return {failed.empty(), detail};
}

Verdict eps_refinement() {
  const EpsRefinementReport r = experiment_eps_refinement(shipped("disc2d_refinement"));
  std::string d;
  for (std::size_t i = 0; i < r.eps.size(); ++i) {
    d += fmt::format("{}eps {}: {:.5f} (mask {:.4f}, t = {:.4f})", i ? ", " : "", r.eps[i], r.interface_distance[i],
                     r.distance[i], r.game_time[i]);
  }
  return {r.strictly_decreasing && r.eps.size() >= 3, "Hausdorff to the PDE interface: " + d};
}

Verdict counterexample() {
  const RunConfig cfg = shipped("disconnected2d_game");
  const ConvexHullReport r = experiment_convex_hull(cfg);
  const bool ok = !r.graph.connected && std::isfinite(r.plateau_time) && r.final_dist_coK >= 0.5 &&
                  r.final_dist_components <= r.sandwich_radius;
  return {ok, fmt::format("G connected: {}; plateau from t = {:.2f}; at t = {:.2f} distance to co(K) {:.3f} "
                          "(needs >= 0.5), to the union of component hulls {:.3f} (bound {:.2f})",
                          r.graph.connected, r.plateau_time, r.final_time, r.final_dist_coK, r.final_dist_components,
                          r.sandwich_radius)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto wanted = [&](int n) { return only.empty() || only.count(n) > 0; };

  std::vector<PropertyResult> props;
  if (wanted(5) || wanted(6) || wanted(7)) props = run_property_suites(1000, 7);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"shrinking-circle law (2D game and PDE)", shrinking_circle},
      {"3D sphere extinction", sphere_extinction},
      {"convex-hull recovery", convex_hull_recovery},
      {"minimal vs mean curvature neck", min_vs_mean},
      {"operator axioms", [&] { return property_group(props, "operator."); }},
      {"DPP properties", [&] { return dpp_properties(props); }},
      {"strategy invariants", [&] { return strategy_invariants(props); }},
      {"eps-convexity suite", eps_convexity_suite},
      {"eps-refinement consistency", eps_refinement},
      {"counterexample fidelity (disconnected G)", counterexample},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!wanted(n)) continue;
    Verdict v;
    const auto t0 = Clock::now();
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::printf("%s criterion %d: %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", n, criteria[i].first.c_str(),
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

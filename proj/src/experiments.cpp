#include "mincurv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "mincurv/errors.hpp"
#include "mincurv/game_engine.hpp"
#include "mincurv/io.hpp"
#include "mincurv/obstacle.hpp"
#include "mincurv/pde_solver.hpp"

namespace mincurv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

PdeParams pde_params(const RunConfig& cfg, CurvatureKind kind, double t_end) {
  PdeParams p;
  p.dt = cfg.solver.dt;
  p.t_end = t_end;
  p.cfl_safety = cfg.solver.cfl_safety;
  p.grad_threshold = cfg.solver.grad_threshold;
  p.kind = kind;
  p.threads = cfg.solver.threads;
  return p;
}

GameParams game_params(const RunConfig& cfg, double eps, double t_end) {
  GameParams p = GameParams::for_time(cfg.dimension, eps, t_end, cfg.solver.directions);
  p.polish = cfg.solver.polish;
  p.tangent_count = cfg.solver.tangent_count;
  p.threads = cfg.solver.threads;
  return p;
}

GridField game_obstacle(const RunConfig& cfg, double eps) {
  if (cfg.obstacle.empty()) return no_obstacle_field(cfg.grid);
  return psi_eps_field(EnlargedObstacle(cfg.obstacle, eps), cfg.grid);
}

GridField pde_obstacle(const RunConfig& cfg) {
  return cfg.obstacle.empty() ? no_obstacle_field(cfg.grid) : psi_field(cfg.obstacle, cfg.grid);
}

GridField run_game_kind(const RunConfig& cfg, const GridField& u0, double eps, GameKind kind,
                        const FieldObserver& observer) {
  const GameParams params = game_params(cfg, eps, cfg.solver.t_end);
  params.validate(cfg.grid);
  const DirectionSet dirs = DirectionSet::hemisphere(cfg.dimension, params.direction_count);
  const GridField psi = game_obstacle(cfg, eps);
  const double interval = cfg.solver.snapshot_interval;
  const int every =
      interval > 0.0 ? std::max(1, static_cast<int>(std::lround(interval / params.dt()))) : params.n_rounds;
  GridField u = u0;
  if (observer && !observer(0.0, u)) return u;
  for (int k = 1; k <= params.n_rounds; ++k) {
    u = kind == GameKind::Standard ? dpp_step(u, psi, params, dirs) : alt_dpp_step(u, psi, params, dirs);
    if ((k % every == 0 || k == params.n_rounds) && observer && !observer(params.time_of_round(k), u)) break;
  }
  return u;
}

GridField run_pde_kind(const RunConfig& cfg, const GridField& u0, CurvatureKind kind, const FieldObserver& observer) {
  PdeSolver solver(u0, pde_obstacle(cfg), pde_params(cfg, kind, cfg.solver.t_end), cfg.solver.snapshot_interval);
  if (observer && !observer(0.0, solver.field())) return solver.field();
  while (!solver.done()) {
    if (solver.step() && observer && !observer(solver.time(), solver.field())) break;
  }
  return solver.field();
}

struct CoreBall {
  VecN center;
  double radius;
};

std::vector<CoreBall> cores_of(const ObstacleSpec& spec, std::span<const int> members) {
  std::vector<CoreBall> out;
  for (int idx : members) {
    const Primitive& p = spec.primitives()[static_cast<std::size_t>(idx)];
    if (p.kind == Primitive::Kind::Ball) {
      out.push_back({p.center, p.radius});
      continue;
    }
    const int n = spec.dim();
    for (int mask = 0; mask < (1 << n); ++mask) {
      VecN c = VecN::zeros(n);
      for (int a = 0; a < n; ++a) c[a] = (mask >> a) & 1 ? p.upper[a] : p.lower[a];
      out.push_back({c, 0.0});
    }
  }
  return out;
}

std::vector<VecN> sphere_points(int dim, int count) {
  std::vector<VecN> out;
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * k / count;
      out.push_back(VecN{std::cos(a), std::sin(a)});
    }
    return out;
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.push_back(VecN{r * std::cos(golden * k), r * std::sin(golden * k), z});
  }
  return out;
}

// Nodes x with dist(x, co(cores)) < r + extra, or x inside the hull of the
// sampled enlarged cores when radii differ.
void rasterize_hull(const std::vector<CoreBall>& cores, double extra, const GridSpec& grid, BoolMask& mask) {
  const int n = grid.dim;
  bool common = true;
  for (const auto& c : cores) common = common && c.radius == cores.front().radius;
  const double tol = 1e-12;
  if (common) {
    std::vector<VecN> centers;
    for (const auto& c : cores) centers.push_back(c.center);
    const Polytope hull = convex_hull(n, centers);
    const double r = cores.front().radius + extra;
    if (!(r > 0.0)) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (hull.contains(grid.node(i), tol) && !hull.degenerate) mask.set(i);
      }
      return;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!mask.test(i) && hull.distance(grid.node(i)) < r - tol) mask.set(i);
    }
    return;
  }
  const auto dirs = sphere_points(n, n == 2 ? 1440 : 4000);
  std::vector<VecN> samples;
  for (const auto& c : cores) {
    const double r = c.radius + extra;
    if (r > 0.0) {
      for (const auto& d : dirs) samples.push_back(c.center + d * r);
    } else {
      samples.push_back(c.center);
    }
  }
  const Polytope hull = convex_hull(n, samples);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!mask.test(i) && !hull.degenerate && hull.contains(grid.node(i), -tol)) mask.set(i);
  }
}

struct ReferenceMasks {
  BoolMask coK;
  BoolMask coKeps;
};

ReferenceMasks reference_masks(const RunConfig& cfg, double eps) {
  ReferenceMasks m;
  if (cfg.obstacle.empty()) return m;
  m.coK = hull_mask(cfg.obstacle, cfg.grid, 0.0);
  m.coKeps = hull_mask(cfg.obstacle, cfg.grid, cfg.dimension * eps);
  return m;
}

MetricRow metrics_of(double t, const BoolMask& omega, const ReferenceMasks& ref) {
  MetricRow row;
  row.time = t;
  row.volume = mask_volume(omega);
  row.radius = equivalent_radius(row.volume, omega.spec().dim);
  row.dist_coK = ref.coK.spec().size() ? hausdorff_or_nan(omega, ref.coK) : kNaN;
  row.dist_coKeps = ref.coKeps.spec().size() ? hausdorff_or_nan(omega, ref.coKeps) : kNaN;
  return row;
}

double run_eps(const RunConfig& cfg) {
  if (cfg.is_game()) return cfg.game_eps();
  return cfg.eps_list.empty() ? 0.0 : cfg.eps_list.front();
}

}  // namespace

std::string snapshot_stem(const RunConfig& cfg, double t) {
  switch (cfg.solver.kind) {
    case SolverKind::Game:
    case SolverKind::AltGame: {
      const double e = cfg.game_eps();
      const long k = std::lround(2.0 * t / (e * e));
      return std::string(cfg.solver.kind == SolverKind::Game ? "game" : "altgame") + "_round_" + std::to_string(k);
    }
    case SolverKind::Pde:
      return "pde_t_" + format_time(t);
    case SolverKind::PdeMean:
      return "pdemean_t_" + format_time(t);
  }
  return "snapshot";
}

void MetricSeries::add(const MetricRow& row) {
  if (!rows_.empty() && !(row.time > rows_.back().time)) {
    throw PreconditionError("metric times must be strictly increasing");
  }
  rows_.push_back(row);
}

std::string MetricSeries::to_csv() const {
  std::ostringstream os;
  os << "time,volume,radius,dist_coK,dist_coKeps\n";
  for (const auto& r : rows_) {
    os << format_number(r.time) << ',' << format_number(r.volume) << ',' << format_number(r.radius) << ','
       << format_number(r.dist_coK) << ',' << format_number(r.dist_coKeps) << '\n';
  }
  return os.str();
}

void MetricSeries::write_csv(const std::filesystem::path& path) const { write_text(path, to_csv()); }

GridField run_solver(const RunConfig& cfg, const GridField& u0, const FieldObserver& observer) {
  switch (cfg.solver.kind) {
    case SolverKind::Game:
      return run_game_kind(cfg, u0, cfg.game_eps(), GameKind::Standard, observer);
    case SolverKind::AltGame:
      return run_game_kind(cfg, u0, cfg.game_eps(), GameKind::Alternative, observer);
    case SolverKind::Pde:
      return run_pde_kind(cfg, u0, CurvatureKind::Minimal, observer);
    case SolverKind::PdeMean:
      return run_pde_kind(cfg, u0, CurvatureKind::Mean, observer);
  }
  throw PreconditionError("unknown solver kind");
}

std::vector<std::vector<int>> obstacle_components(const ObstacleSpec& spec) {
  const int n = static_cast<int>(spec.primitives().size());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (primitives_overlap(spec.primitives()[static_cast<std::size_t>(i)],
                             spec.primitives()[static_cast<std::size_t>(j)])) {
        parent[static_cast<std::size_t>(find(j))] = find(i);
      }
    }
  }
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (slot[static_cast<std::size_t>(r)] < 0) {
      slot[static_cast<std::size_t>(r)] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(i);
  }
  return groups;
}

BoolMask hull_mask(const ObstacleSpec& spec, const GridSpec& grid, double extra) {
  if (spec.empty()) throw EmptyObstacleError("hull_mask: obstacle is empty");
  BoolMask mask(grid);
  std::vector<int> all(spec.primitives().size());
  std::iota(all.begin(), all.end(), 0);
  rasterize_hull(cores_of(spec, all), extra, grid, mask);
  return mask;
}

BoolMask component_hull_mask(const ObstacleSpec& spec, const GridSpec& grid, double extra) {
  if (spec.empty()) throw EmptyObstacleError("component_hull_mask: obstacle is empty");
  BoolMask mask(grid);
  for (const auto& comp : obstacle_components(spec)) rasterize_hull(cores_of(spec, comp), extra, grid, mask);
  return mask;
}

double mask_volume(const BoolMask& mask) {
  return static_cast<double>(mask.count()) * std::pow(mask.spec().spacing, mask.spec().dim);
}

double equivalent_radius(double volume, int dim) { return std::pow(volume / unit_ball_volume(dim), 1.0 / dim); }

double hausdorff_or_nan(const BoolMask& a, const BoolMask& b) {
  if (a.empty() || b.empty()) return kNaN;
  return hausdorff_distance(a, b, a.spec().spacing);
}

double neck_radius(const GridField& u, int axis, double position) {
  const GridSpec& g = u.spec();
  const int n = g.dim;
  VecN center = VecN::zeros(n);
  center[axis] = position;
  if (!(interpolate(u, center) > 0.0)) return 0.0;
  // In-plane unit directions.
  std::vector<VecN> rays;
  const int a1 = (axis + 1) % n;
  if (n == 2) {
    rays.push_back(VecN::unit(2, a1));
    rays.push_back(VecN::unit(2, a1) * -1.0);
  } else {
    const int a2 = (axis + 2) % n;
    for (int k = 0; k < 16; ++k) {
      const double t = 2.0 * std::numbers::pi * k / 16;
      rays.push_back(VecN::unit(3, a1) * std::cos(t) + VecN::unit(3, a2) * std::sin(t));
    }
  }
  const double step = 0.25 * g.spacing;
  double diag = 0.0;
  for (int a = 0; a < n; ++a) diag += (g.upper()[a] - g.origin[a]) * (g.upper()[a] - g.origin[a]);
  const double reach = std::sqrt(diag);
  double total = 0.0;
  for (const auto& d : rays) {
    double s_prev = 0.0;
    double v_prev = interpolate(u, center);
    double found = reach;
    for (double s = step; s <= reach; s += step) {
      const double v = interpolate(u, center + d * s);
      if (!(v > 0.0)) {
        found = s_prev + (s - s_prev) * v_prev / (v_prev - v);
        break;
      }
      s_prev = s;
      v_prev = v;
    }
    total += found;
  }
  return total / static_cast<double>(rays.size());
}

MetricSeries run_metrics(const RunConfig& cfg, const SnapshotSink& sink) {
  MetricSeries series;
  const ReferenceMasks ref = reference_masks(cfg, run_eps(cfg));
  run_solver(cfg, initial_field(cfg), [&](double t, const GridField& u) {
    if (sink) sink(snapshot_stem(cfg, t), t, u);
    series.add(metrics_of(t, positivity_set(u), ref));
    return true;
  });
  return series;
}

ShrinkingBallReport experiment_shrinking_ball(const RunConfig& cfg, const SnapshotSink& sink) {
  if (!cfg.obstacle.empty()) throw PreconditionError("shrinking ball experiment needs an empty obstacle");
  const ExperimentConfig& ex = cfg.experiment;
  ShrinkingBallReport rep;
  rep.extinction_time = kNaN;
  const ReferenceMasks none;
  const double r0sq = ex.initial_radius * ex.initial_radius;
  run_solver(cfg, initial_field(cfg), [&](double t, const GridField& u) {
    if (sink) sink(snapshot_stem(cfg, t), t, u);
    const BoolMask omega = positivity_set(u);
    rep.series.add(metrics_of(t, omega, none));
    if (t >= ex.window_begin - 1e-12 && t <= ex.window_end + 1e-12 && r0sq - 2.0 * t > 0.0) {
      const double exact = std::sqrt(r0sq - 2.0 * t);
      rep.sup_rel_error = std::max(rep.sup_rel_error, std::abs(rep.series.rows().back().radius - exact) / exact);
      ++rep.window_samples;
    }
    if (omega.empty()) {
      if (std::isnan(rep.extinction_time)) rep.extinction_time = t;
      return !ex.stop_at_extinction;
    }
    return true;
  });
  return rep;
}

ConvexHullReport experiment_convex_hull(const RunConfig& cfg, const SnapshotSink& sink) {
  if (cfg.obstacle.empty()) throw EmptyObstacleError("convex hull experiment needs a nonempty obstacle");
  ConvexHullReport rep;
  rep.plateau_time = kNaN;
  rep.eps = run_eps(cfg);
  const GridField u0 = initial_field(cfg);
  rep.graph = build_graph_G(cfg.obstacle, u0);
  if (!rep.graph.connected) {
    rep.warnings.push_back("graph G is disconnected; the hull need not be recovered");
  }
  const ReferenceMasks ref = reference_masks(cfg, rep.eps);
  std::vector<double> times;
  std::vector<BoolMask> masks;
  run_solver(cfg, u0, [&](double t, const GridField& u) {
    if (sink) sink(snapshot_stem(cfg, t), t, u);
    BoolMask omega = positivity_set(u);
    rep.series.add(metrics_of(t, omega, ref));
    times.push_back(t);
    masks.push_back(std::move(omega));
    return true;
  });
  const double h = cfg.grid.spacing;
  const double delta = cfg.experiment.plateau_delta;
  for (std::size_t i = 0; i < times.size() && std::isnan(rep.plateau_time); ++i) {
    for (std::size_t j = i + 1; j < times.size(); ++j) {
      if (times[j] < times[i] + delta - 1e-9) continue;
      const bool both_empty = masks[i].empty() && masks[j].empty();
      const double d = both_empty ? 0.0 : hausdorff_or_nan(masks[i], masks[j]);
      if (d <= h + 1e-12) rep.plateau_time = times[i];
      break;
    }
  }
  const BoolMask& last = masks.back();
  rep.final_time = times.back();
  rep.final_dist_coK = rep.series.rows().back().dist_coK;
  rep.final_dist_coKeps = rep.series.rows().back().dist_coKeps;
  rep.final_dist_components = hausdorff_or_nan(last, component_hull_mask(cfg.obstacle, cfg.grid));
  rep.sandwich_radius = cfg.dimension * rep.eps + 3.0 * h;
  rep.sandwich_lower = ref.coK.subset_of(last);
  rep.sandwich_upper = last.subset_of(hull_mask(cfg.obstacle, cfg.grid, rep.sandwich_radius));
  return rep;
}

MeanVsMinReport experiment_mean_vs_min(const RunConfig& cfg, const SnapshotSink& sink) {
  MeanVsMinReport rep;
  const GridField u0 = initial_field(cfg);
  const ReferenceMasks ref = reference_masks(cfg, run_eps(cfg));
  const int axis = cfg.experiment.neck_axis;
  const double pos = cfg.experiment.neck_position;
  for (const auto kind : {SolverKind::Pde, SolverKind::PdeMean}) {
    RunConfig run = cfg;
    run.solver.kind = kind;
    auto& necks = kind == SolverKind::Pde ? rep.minimal : rep.mean;
    auto& series = kind == SolverKind::Pde ? rep.minimal_series : rep.mean_series;
    run_solver(run, u0, [&](double t, const GridField& u) {
      if (sink) sink(snapshot_stem(run, t), t, u);
      necks.push_back({t, neck_radius(u, axis, pos)});
      series.add(metrics_of(t, positivity_set(u), ref));
      return true;
    });
  }
  return rep;
}

EpsRefinementReport experiment_eps_refinement(const RunConfig& cfg, const SnapshotSink& sink) {
  const ExperimentConfig& ex = cfg.experiment;
  if (ex.eps_values.empty()) throw PreconditionError("eps refinement needs experiment.eps_values");
  EpsRefinementReport rep;
  rep.compare_time = ex.compare_time;
  rep.eps = ex.eps_values;
  // Each game lands on the first round at or after compare_time; the PDE is
  // stepped to exactly those times.
  std::vector<double> targets;
  for (double e : rep.eps) {
    const GameParams p = GameParams::for_time(cfg.dimension, e, ex.compare_time, cfg.solver.directions);
    rep.game_time.push_back(p.time_of_round(p.n_rounds));
  }
  targets = rep.game_time;
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  const GridField u0 = initial_field(cfg);
  const GridField psi = pde_obstacle(cfg);
  const PdeParams pp = pde_params(cfg, CurvatureKind::Minimal, targets.back());
  const double max_dt = pp.effective_dt(cfg.grid);
  std::vector<GridField> pde_fields;
  GridField u = u0;
  double t = 0.0;
  for (double target : targets) {
    while (t < target - 1e-14) {
      const double dt = std::min(max_dt, target - t);
      u = pde_step(u, psi, pp, dt);
      t = target - t <= max_dt ? target : t + dt;
    }
    if (sink) sink("pde_t_" + format_time(t), t, u);
    pde_fields.push_back(u);
  }
  for (std::size_t i = 0; i < rep.eps.size(); ++i) {
    RunConfig run = cfg;
    run.solver.kind = SolverKind::Game;
    run.solver.eps = rep.eps[i];
    run.solver.t_end = ex.compare_time;
    run.solver.snapshot_interval = 0.0;
    const GridField g = run_solver(run, u0, {});
    if (sink) sink("game_eps_" + format_number(rep.eps[i]) + "_t_" + format_time(rep.game_time[i]), rep.game_time[i], g);
    const auto k = static_cast<std::size_t>(
        std::find(targets.begin(), targets.end(), rep.game_time[i]) - targets.begin());
    rep.distance.push_back(hausdorff_or_nan(positivity_set(g), positivity_set(pde_fields[k])));
    rep.interface_distance.push_back(interface_hausdorff(g, pde_fields[k]));
  }
  rep.strictly_decreasing = true;
  for (std::size_t i = 1; i < rep.distance.size(); ++i) {
    if (!(rep.interface_distance[i] < rep.interface_distance[i - 1])) rep.strictly_decreasing = false;
  }
  return rep;
}

}  // namespace mincurv

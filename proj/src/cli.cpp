#include "mincurv/cli.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mincurv/config.hpp"
#include "mincurv/eps_convexity.hpp"
#include "mincurv/errors.hpp"
#include "mincurv/experiments.hpp"
#include "mincurv/game_engine.hpp"
#include "mincurv/io.hpp"
#include "mincurv/pde_solver.hpp"
#include "mincurv/properties.hpp"

#ifndef MINCURV_CONFIG_DIR
#define MINCURV_CONFIG_DIR "configs"
#endif

namespace mincurv {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

const std::map<std::string, std::pair<std::string, ExperimentKind>>& named_experiments() {
  static const std::map<std::string, std::pair<std::string, ExperimentKind>> table{
      {"shrinking-ball", {"disc2d_game.toml", ExperimentKind::ShrinkingBall}},
      {"sphere-extinction", {"sphere3d_pde.toml", ExperimentKind::ShrinkingBall}},
      {"convex-hull", {"stadium2d_game.toml", ExperimentKind::ConvexHull}},
      {"two-ball", {"twoball3d.toml", ExperimentKind::ConvexHull}},
      {"disconnected", {"disconnected2d_game.toml", ExperimentKind::ConvexHull}},
      {"mean-vs-min", {"capsule3d_mean_vs_min.toml", ExperimentKind::MeanVsMin}},
      {"eps-refinement", {"disc2d_refinement.toml", ExperimentKind::EpsRefinement}},
  };
  return table;
}

json number(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

json vec_json(const VecN& v) {
  json a = json::array();
  for (int i = 0; i < v.dim(); ++i) a.push_back(v[i]);
  return a;
}

VecN parse_point(const std::string& text, int dim) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
  if (static_cast<int>(vals.size()) != dim) {
    throw ConfigError("point '" + text + "' needs " + std::to_string(dim) + " comma-separated coordinates");
  }
  return dim == 2 ? VecN{vals[0], vals[1]} : VecN{vals[0], vals[1], vals[2]};
}

json metadata(const RunConfig& cfg) {
  json j;
  j["config"] = cfg.source.string();
  j["dimension"] = cfg.dimension;
  j["grid"] = {{"origin", vec_json(cfg.grid.origin)},
               {"spacing", cfg.grid.spacing},
               {"dims", json::array({cfg.grid.dims[0], cfg.grid.dims[1], cfg.grid.dims[2]})},
               {"far_value", cfg.far_value}};
  json solver = {{"kind", to_string(cfg.solver.kind)}, {"t_end", cfg.solver.t_end}, {"threads", cfg.solver.threads}};
  if (cfg.is_game()) {
    const double e = cfg.game_eps();
    const GameParams gp = GameParams::for_time(cfg.dimension, e, cfg.solver.t_end, cfg.solver.directions);
    solver["eps"] = e;
    solver["directions"] = cfg.solver.directions;
    solver["polish"] = cfg.solver.polish;
    solver["rounds"] = gp.n_rounds;
    solver["angular_gap"] = DirectionSet::hemisphere(cfg.dimension, cfg.solver.directions).angular_gap();
  } else {
    PdeParams pp;
    pp.dt = cfg.solver.dt;
    pp.cfl_safety = cfg.solver.cfl_safety;
    const double dt = pp.effective_dt(cfg.grid);
    const double h = cfg.grid.spacing;
    solver["dt"] = dt;
    solver["h"] = h;
    solver["cfl_number"] = dt * 2.0 * (cfg.dimension - 1) / (h * h);
    solver["cfl_safety"] = cfg.solver.cfl_safety;
  }
  j["solver"] = solver;
  j["initial_form"] = to_string(cfg.initial.form);
  j["obstacle_primitives"] = cfg.obstacle.primitives().size();
  j["experiment"] = to_string(cfg.experiment.kind);
  return j;
}

SnapshotSink vtk_sink(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.output.write_vtk) return {};
  const fs::path dir = cfg.output.directory / "snapshots";
  return [dir, &out](const std::string& stem, double, const GridField& u) {
    const fs::path path = dir / (stem + ".vtk");
    write_vtk(path, u, "u");
    out << "wrote " << path.string() << '\n';
  };
}

json run_experiment(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const fs::path dir = cfg.output.directory;
  const SnapshotSink sink = vtk_sink(cfg, out);
  json res;
  switch (cfg.experiment.kind) {
    case ExperimentKind::None: {
      const MetricSeries s = run_metrics(cfg, sink);
      s.write_csv(dir / "metrics.csv");
      res["snapshots"] = s.rows().size();
      res["final_volume"] = s.rows().back().volume;
      out << "final volume " << s.rows().back().volume << '\n';
      break;
    }
    case ExperimentKind::ShrinkingBall: {
      const ShrinkingBallReport r = experiment_shrinking_ball(cfg, sink);
      r.series.write_csv(dir / "metrics.csv");
      res["sup_rel_error"] = r.sup_rel_error;
      res["window"] = json::array({cfg.experiment.window_begin, cfg.experiment.window_end});
      res["window_samples"] = r.window_samples;
      res["extinction_time"] = number(r.extinction_time);
      out << "sup relative radius error " << r.sup_rel_error << " over " << r.window_samples << " snapshots\n";
      out << "extinction time " << format_number(r.extinction_time) << '\n';
      break;
    }
    case ExperimentKind::ConvexHull: {
      const ConvexHullReport r = experiment_convex_hull(cfg, sink);
      for (const auto& w : r.warnings) err << "warning: " << w << '\n';
      r.series.write_csv(dir / "metrics.csv");
      write_text(dir / "graph_G.dot", graph_to_dot(r.graph));
      res["graph_connected"] = r.graph.connected;
      res["eps"] = r.eps;
      res["plateau_time"] = number(r.plateau_time);
      res["final_time"] = r.final_time;
      res["final_dist_coK"] = number(r.final_dist_coK);
      res["final_dist_coKeps"] = number(r.final_dist_coKeps);
      res["final_dist_component_hulls"] = number(r.final_dist_components);
      res["sandwich_radius"] = r.sandwich_radius;
      res["sandwich_lower"] = r.sandwich_lower;
      res["sandwich_upper"] = r.sandwich_upper;
      out << "graph G " << (r.graph.connected ? "connected" : "disconnected") << ", plateau at t = "
          << format_number(r.plateau_time) << '\n';
      out << "final distance to co(K) " << format_number(r.final_dist_coK) << ", to co(K_eps) "
          << format_number(r.final_dist_coKeps) << ", to component hulls " << format_number(r.final_dist_components)
          << '\n';
      out << "sandwich co(K) <= Omega: " << (r.sandwich_lower ? "yes" : "no")
          << ", Omega <= co(K) + B_" << r.sandwich_radius << ": " << (r.sandwich_upper ? "yes" : "no") << '\n';
      break;
    }
    case ExperimentKind::MeanVsMin: {
      const MeanVsMinReport r = experiment_mean_vs_min(cfg, sink);
      r.minimal_series.write_csv(dir / "metrics.csv");
      r.mean_series.write_csv(dir / "metrics_mean.csv");
      std::ostringstream necks;
      necks << "time,neck_minimal,neck_mean\n";
      for (std::size_t i = 0; i < r.minimal.size() && i < r.mean.size(); ++i) {
        necks << format_number(r.minimal[i].time) << ',' << format_number(r.minimal[i].neck) << ','
              << format_number(r.mean[i].neck) << '\n';
      }
      write_text(dir / "necks.csv", necks.str());
      res["final_neck_minimal"] = r.minimal.back().neck;
      res["final_neck_mean"] = r.mean.back().neck;
      out << "final neck: minimal " << r.minimal.back().neck << ", mean " << r.mean.back().neck << '\n';
      break;
    }
    case ExperimentKind::EpsRefinement: {
      const EpsRefinementReport r = experiment_eps_refinement(cfg, sink);
      std::ostringstream table;
      table << "eps,game_time,hausdorff_to_pde,interface_hausdorff_to_pde\n";
      json rows = json::array();
      for (std::size_t i = 0; i < r.eps.size(); ++i) {
        table << format_number(r.eps[i]) << ',' << format_number(r.game_time[i]) << ','
              << format_number(r.distance[i]) << ',' << format_number(r.interface_distance[i]) << '\n';
        rows.push_back({{"eps", r.eps[i]},
                        {"time", r.game_time[i]},
                        {"distance", number(r.distance[i])},
                        {"interface_distance", number(r.interface_distance[i])}});
        out << "eps " << r.eps[i] << ": Hausdorff to PDE " << format_number(r.distance[i]) << " (masks), "
            << format_number(r.interface_distance[i]) << " (interfaces)\n";
      }
      write_text(dir / "refinement.csv", table.str());
      res["rows"] = rows;
      res["strictly_decreasing"] = r.strictly_decreasing;
      break;
    }
  }
  return res;
}

int do_run(RunConfig cfg, const std::string& out_dir, int threads, bool vtk, std::ostream& out, std::ostream& err) {
  if (!out_dir.empty()) cfg.output.directory = out_dir;
  if (threads > 0) cfg.solver.threads = threads;
  if (vtk) cfg.output.write_vtk = true;
  const auto start = std::chrono::steady_clock::now();
  json meta = metadata(cfg);
  json results = run_experiment(cfg, out, err);
  meta["results"] = results;
  meta["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_text(cfg.output.directory / "run.json", meta.dump(2) + "\n");
  out << "outputs in " << cfg.output.directory.string() << '\n';
  return kExitOk;
}

std::vector<int> make_signs(const std::string& mode, int rounds, std::mt19937_64& rng) {
  std::vector<int> s(static_cast<std::size_t>(rounds));
  for (int k = 0; k < rounds; ++k) {
    if (mode == "plus") {
      s[static_cast<std::size_t>(k)] = 1;
    } else if (mode == "minus") {
      s[static_cast<std::size_t>(k)] = -1;
    } else if (mode == "alternating") {
      s[static_cast<std::size_t>(k)] = k % 2 == 0 ? 1 : -1;
    } else {
      s[static_cast<std::size_t>(k)] = std::uniform_int_distribution<int>(0, 1)(rng) ? 1 : -1;
    }
  }
  return s;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream os;
  const int n = tr.positions.front().dim();
  os << "round";
  const char* axes[] = {"x", "y", "z"};
  for (int a = 0; a < n; ++a) os << ',' << axes[a];
  for (int a = 0; a < n; ++a) os << ",v" << axes[a];
  os << ",sign,stopped\n";
  for (std::size_t k = 0; k < tr.positions.size(); ++k) {
    os << k;
    for (int a = 0; a < n; ++a) os << ',' << format_number(tr.positions[k][a]);
    if (k < tr.choices.size()) {
      const Choice& c = tr.choices[k];
      for (int a = 0; a < n; ++a) os << ',' << (c.direction.dim() == n ? format_number(c.direction[a]) : "");
      os << ',' << c.sign << ',' << (c.stopped ? 1 : 0) << '\n';
    } else {
      for (int a = 0; a < n; ++a) os << ',';
      os << ",,\n";
    }
  }
  return os.str();
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal curvature flow with obstacles: games, PDE and discrete convexity"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;
  bool vtk = false;
  auto* run = app.add_subcommand("run", "Solve the configured problem and write snapshots and metrics");
  run->add_option("--config", config_path, "TOML run configuration")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--threads", threads, "Worker threads");
  run->add_flag("--vtk", vtk, "Write VTK snapshots");

  double hull_eps = 0.0;
  int max_iter = 50;
  std::string points_path, hull_out;
  auto* hull = app.add_subcommand("eps-hull", "Eps-convex hull of a point set read from CSV");
  hull->add_option("--eps", hull_eps, "Lattice step")->required()->check(CLI::PositiveNumber);
  hull->add_option("--max-iter", max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  hull->add_option("--out", hull_out, "Write the hull CSV here instead of stdout");
  hull->add_option("points", points_path, "CSV with x,y[,z] rows")->required();

  std::string kind = "concentric-paul", signs_mode = "random", x0_text, center_text, a_text, b_text;
  int dim = 2, rounds = 10;
  double s_eps = 0.1, radius = 1.0;
  std::uint64_t seed = 1;
  auto* strat = app.add_subcommand("strategy", "Roll out a strategy and print the trajectory as CSV");
  strat->add_option("--kind", kind, "concentric-paul, concentric-carol or segment")
      ->check(CLI::IsMember({"concentric-paul", "concentric-carol", "segment"}));
  strat->add_option("--dim", dim)->check(CLI::IsMember({2, 3}));
  strat->add_option("--eps", s_eps)->check(CLI::PositiveNumber);
  strat->add_option("--rounds", rounds)->check(CLI::NonNegativeNumber);
  strat->add_option("--x0", x0_text, "Start point, comma separated")->required();
  strat->add_option("--center", center_text, "Center z of the concentric strategies");
  strat->add_option("--a", a_text, "Segment start (segment strategy)");
  strat->add_option("--b", b_text, "Segment end (segment strategy)");
  strat->add_option("--radius", radius, "Radius of the obstacle balls at a and b")->check(CLI::PositiveNumber);
  strat->add_option("--signs", signs_mode, "Carol's signs")
      ->check(CLI::IsMember({"random", "alternating", "plus", "minus"}));
  strat->add_option("--seed", seed);

  std::string dot_path;
  auto* graph = app.add_subcommand("graph-g", "Connectivity of the obstacle components through the initial set");
  graph->add_option("--config", config_path)->required();
  graph->add_option("--dot", dot_path, "Write the graph in DOT format");

  int trials = 1000;
  auto* props = app.add_subcommand("props", "Randomized property sweeps");
  props->add_option("--trials", trials)->check(CLI::PositiveNumber);
  props->add_option("--seed", seed);

  std::string exp_name;
  auto* exper = app.add_subcommand("experiment", "Run a named experiment (default config shipped in configs/)");
  std::vector<std::string> names;
  for (const auto& [k, v] : named_experiments()) names.push_back(k);
  exper->add_option("name", exp_name)->required()->check(CLI::IsMember(names));
  exper->add_option("--config", config_path, "Use this config instead of the shipped one");
  exper->add_option("--out", out_dir);
  exper->add_option("--threads", threads);
  exper->add_flag("--vtk", vtk);

  std::vector<std::string> argv_store{"mincurv"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (run->parsed()) return do_run(load_config(config_path), out_dir, threads, vtk, out, err);

    if (exper->parsed()) {
      const auto& [file, kind_of] = named_experiments().at(exp_name);
      const fs::path path = config_path.empty() ? fs::path(MINCURV_CONFIG_DIR) / file : fs::path(config_path);
      RunConfig cfg = load_config(path);
      cfg.experiment.kind = kind_of;
      if (out_dir.empty() && cfg.output.directory == "out") out_dir = "out/" + exp_name;
      return do_run(std::move(cfg), out_dir, threads, vtk, out, err);
    }

    if (hull->parsed()) {
      const PointSet pts = read_points_csv(points_path);
      const EpsHullResult r = eps_convex_hull(pts, hull_eps, max_iter);
      std::ostringstream os;
      os << "# converged=" << (r.converged ? "true" : "false") << " iterations=" << r.iterations
         << " points=" << r.points.size() << '\n'
         << points_csv(r.points);
      if (hull_out.empty()) {
        out << os.str();
      } else {
        write_text(hull_out, os.str());
        out << "# converged=" << (r.converged ? "true" : "false") << " iterations=" << r.iterations << '\n';
      }
      return kExitOk;
    }

    if (strat->parsed()) {
      std::mt19937_64 rng(seed);
      GameParams gp;
      gp.dim = dim;
      gp.eps = s_eps;
      gp.n_rounds = rounds;
      const VecN x0 = parse_point(x0_text, dim);
      Trajectory tr;
      if (kind == "segment") {
        if (a_text.empty() || b_text.empty()) throw ConfigError("segment strategy needs --a and --b");
        const VecN a = parse_point(a_text, dim);
        const VecN b = parse_point(b_text, dim);
        const EnlargedObstacle enlarged(
            ObstacleSpec(dim, {Primitive::ball(a, radius), Primitive::ball(b, radius)}), s_eps);
        tr = play_segment_paul(x0, a, b, enlarged, gp, make_signs(signs_mode, rounds, rng));
      } else {
        const VecN z = center_text.empty() ? VecN::zeros(dim) : parse_point(center_text, dim);
        if (kind == "concentric-paul") {
          tr = play_concentric_paul(x0, z, gp, make_signs(signs_mode, rounds, rng));
        } else {
          std::normal_distribution<double> g;
          std::vector<VecN> dirs;
          for (int k = 0; k < rounds; ++k) {
            VecN v = VecN::zeros(dim);
            do {
              for (int i = 0; i < dim; ++i) v[i] = g(rng);
            } while (norm(v) < 1e-9);
            dirs.push_back(normalized(v));
          }
          tr = play_concentric_carol(x0, z, gp, dirs);
        }
      }
      out << trajectory_csv(tr);
      return kExitOk;
    }

    if (graph->parsed()) {
      const RunConfig cfg = load_config(config_path);
      const GraphG g = build_graph_G(cfg.obstacle, initial_field(cfg));
      out << "components " << g.components.size() << ", edges " << g.edges.size() << ", "
          << (g.connected ? "connected" : "disconnected") << '\n';
      for (const auto& e : g.edges) {
        out << "edge " << e.u << " - " << e.v << " witness " << e.witness.a << " -> " << e.witness.b << '\n';
      }
      if (!dot_path.empty()) write_text(dot_path, graph_to_dot(g));
      return kExitOk;
    }

    if (props->parsed()) {
      bool all = true;
      for (const auto& r : run_property_suites(trials, seed)) {
        out << (r.passed() ? "PASS " : "FAIL ") << r.name << " (" << r.trials - r.failures << "/" << r.trials << ")";
        if (!r.passed()) out << " first failure: " << r.detail;
        out << '\n';
        all = all && r.passed();
      }
      return all ? kExitOk : kExitRuntime;
    }
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  err << app.help();
  return kExitUsage;
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace mincurv

#include "mincurv/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "mincurv/errors.hpp"
#include "mincurv/game_engine.hpp"

namespace mincurv {

namespace {

// Typed access to one TOML table; rejects keys that were never read.
class TableReader {
 public:
  TableReader(const toml::table* table, std::string path) : table_(table), path_(std::move(path)) {}

  bool present() const { return table_ != nullptr; }

  bool has(const std::string& key) const { return table_ && table_->contains(key); }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const toml::node* n = fetch(key);
    if (!n) return require(fallback, key);
    if (auto v = n->value<double>()) return *v;
    fail(key, "expected a number");
  }

  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) {
    const toml::node* n = fetch(key);
    if (!n) return require(fallback, key);
    if (auto v = n->as_integer()) return static_cast<int>(v->get());
    fail(key, "expected an integer");
  }

  bool boolean(const std::string& key, bool fallback) {
    const toml::node* n = fetch(key);
    if (!n) return fallback;
    if (auto v = n->value<bool>()) return *v;
    fail(key, "expected true or false");
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    const toml::node* n = fetch(key);
    if (!n) return require(fallback, key);
    if (auto v = n->value<std::string>()) return *v;
    fail(key, "expected a string");
  }

  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt) {
    const toml::node* n = fetch(key);
    if (!n) return require(fallback, key);
    const toml::array* arr = n->as_array();
    if (!arr) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& item : *arr) {
      auto v = item.value<double>();
      if (!v) fail(key, "expected an array of numbers");
      out.push_back(*v);
    }
    return out;
  }

  VecN vec(const std::string& key, int dim) {
    const auto v = numbers(key);
    if (static_cast<int>(v.size()) != dim) {
      fail(key, "expected " + std::to_string(dim) + " components, got " + std::to_string(v.size()));
    }
    VecN out = VecN::zeros(dim);
    for (int a = 0; a < dim; ++a) out[a] = v[static_cast<std::size_t>(a)];
    return out;
  }

  TableReader table(const std::string& key) {
    const toml::node* n = fetch(key);
    if (!n) return TableReader(nullptr, child(key));
    if (!n->as_table()) fail(key, "expected a table");
    return TableReader(n->as_table(), child(key));
  }

  std::vector<TableReader> tables(const std::string& key) {
    std::vector<TableReader> out;
    const toml::node* n = fetch(key);
    if (!n) return out;
    const toml::array* arr = n->as_array();
    if (!arr) fail(key, "expected an array of tables");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const toml::table* t = (*arr)[i].as_table();
      if (!t) fail(key, "expected an array of tables");
      out.emplace_back(t, child(key) + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  /// Throws on keys that no accessor asked for.
  void finish() const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      if (!seen_.count(std::string(k.str()))) {
        throw ConfigError("unknown key '" + child(std::string(k.str())) + "'");
      }
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(child(key) + ": " + what);
  }

 private:
  const toml::node* fetch(const std::string& key) {
    seen_.insert(key);
    if (!table_) return nullptr;
    return table_->get(key);
  }

  template <class T>
  T require(const std::optional<T>& fallback, const std::string& key) const {
    if (!fallback) throw ConfigError("missing key '" + child(key) + "'");
    return *fallback;
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const toml::table* table_;
  std::string path_;
  std::set<std::string> seen_;
};

SolverKind parse_solver_kind(const std::string& s, TableReader& r) {
  if (s == "game") return SolverKind::Game;
  if (s == "alt-game") return SolverKind::AltGame;
  if (s == "pde") return SolverKind::Pde;
  if (s == "pde-mean") return SolverKind::PdeMean;
  r.fail("kind", "expected game, alt-game, pde or pde-mean");
}

InitialForm parse_form(const std::string& s, TableReader& r) {
  if (s == "distance") return InitialForm::Distance;
  if (s == "quadratic") return InitialForm::Quadratic;
  if (s == "log") return InitialForm::Log;
  if (s == "power") return InitialForm::Power;
  r.fail("form", "expected distance, quadratic, log or power");
}

void read_grid(TableReader grid, RunConfig& cfg) {
  if (!grid.present()) throw ConfigError("missing table [grid]");
  const int dim = cfg.dimension;
  const double h = grid.number("spacing");
  cfg.far_value = grid.number("far_value", -0.5);
  if (!(h > 0.0)) grid.fail("spacing", "must be positive");
  if (grid.has("lower") || grid.has("upper")) {
    cfg.grid = GridSpec::from_bounds(grid.vec("lower", dim), grid.vec("upper", dim), h);
  } else {
    GridSpec g;
    g.dim = dim;
    g.origin = grid.vec("origin", dim);
    g.spacing = h;
    const auto dims = grid.numbers("dims");
    if (static_cast<int>(dims.size()) != dim) grid.fail("dims", "expected one count per axis");
    for (int a = 0; a < dim; ++a) {
      const double d = dims[static_cast<std::size_t>(a)];
      if (d < 2 || d != std::floor(d)) grid.fail("dims", "counts must be integers >= 2");
      g.dims[static_cast<std::size_t>(a)] = static_cast<int>(d);
    }
    cfg.grid = g;
  }
  cfg.grid.validate();
  grid.finish();
}

void read_obstacle(TableReader obs, RunConfig& cfg) {
  std::vector<Primitive> prims;
  double modulus = 1.0;
  if (obs.present()) {
    modulus = obs.number("modulus", 1.0);
    cfg.eps_list = obs.numbers("eps", std::vector<double>{});
    for (auto& b : obs.tables("balls")) {
      const VecN c = b.vec("center", cfg.dimension);
      const double r = b.number("radius");
      if (!(r > 0.0)) b.fail("radius", "must be positive");
      prims.push_back(Primitive::ball(c, r));
      b.finish();
    }
    for (auto& b : obs.tables("boxes")) {
      const VecN lo = b.vec("lower", cfg.dimension);
      const VecN hi = b.vec("upper", cfg.dimension);
      for (int a = 0; a < cfg.dimension; ++a) {
        if (!(lo[a] < hi[a])) b.fail("upper", "must exceed lower on every axis");
      }
      prims.push_back(Primitive::box(lo, hi));
      b.finish();
    }
    obs.finish();
  }
  for (double e : cfg.eps_list) {
    if (!(e > 0.0)) throw ConfigError("obstacle.eps: values must be positive");
  }
  if (!(modulus > 0.0)) throw ConfigError("obstacle.modulus: must be positive");
  cfg.obstacle = ObstacleSpec(cfg.dimension, std::move(prims), modulus);
}

void read_initial(TableReader init, RunConfig& cfg) {
  if (!init.present()) throw ConfigError("missing table [initial]");
  InitialSpec& s = cfg.initial;
  s.form = parse_form(init.string("form", "distance"), init);
  s.exponent = init.number("exponent", -2.0 / 3.0);
  s.cap = init.number("cap", 10.0);
  if (!(s.exponent < 0.0)) init.fail("exponent", "must be negative");
  if (!(s.cap > 0.0)) init.fail("cap", "must be positive");
  for (auto& b : init.tables("balls")) {
    const VecN c = b.vec("center", cfg.dimension);
    const double r = b.number("radius");
    if (!(r > 0.0)) b.fail("radius", "must be positive");
    s.shapes.push_back(Capsule{c, c, r});
    b.finish();
  }
  for (auto& b : init.tables("capsules")) {
    Capsule cap{b.vec("a", cfg.dimension), b.vec("b", cfg.dimension), b.number("radius")};
    if (!(cap.radius > 0.0)) b.fail("radius", "must be positive");
    s.shapes.push_back(cap);
    b.finish();
  }
  if (s.shapes.empty()) throw ConfigError("initial: at least one ball or capsule is required");
  init.finish();
}

void read_solver(TableReader sol, RunConfig& cfg) {
  if (!sol.present()) throw ConfigError("missing table [solver]");
  SolverConfig& s = cfg.solver;
  s.kind = parse_solver_kind(sol.string("kind"), sol);
  s.eps = sol.number("eps", 0.0);
  s.directions = sol.integer("directions", cfg.dimension == 2 ? 32 : 256);
  s.polish = sol.boolean("polish", true);
  s.tangent_count = sol.integer("tangent_count", 0);
  s.t_end = sol.number("t_end");
  s.dt = sol.number("dt", 0.0);
  s.cfl_safety = sol.number("cfl_safety", 0.9);
  s.grad_threshold = sol.number("grad_threshold", 0.0);
  s.threads = sol.integer("threads", 1);
  s.snapshot_interval = sol.number("snapshot_interval", 0.0);
  if (!(s.t_end > 0.0)) sol.fail("t_end", "must be positive");
  if (s.dt < 0.0) sol.fail("dt", "must be nonnegative");
  if (!(s.cfl_safety > 0.0 && s.cfl_safety <= 1.0)) sol.fail("cfl_safety", "must lie in (0, 1]");
  if (s.threads < 1) sol.fail("threads", "must be at least 1");
  if (s.snapshot_interval < 0.0) sol.fail("snapshot_interval", "must be nonnegative");
  if (s.eps < 0.0) sol.fail("eps", "must be positive");
  sol.finish();
}

void read_experiment(TableReader ex, RunConfig& cfg) {
  if (!ex.present()) return;
  ExperimentConfig& e = cfg.experiment;
  const auto kind = parse_experiment_kind(ex.string("kind", "none"));
  if (!kind) ex.fail("kind", "expected none, shrinking_ball, convex_hull, mean_vs_min or eps_refinement");
  e.kind = *kind;
  e.initial_radius = ex.number("initial_radius", 1.0);
  const auto window = ex.numbers("window", std::vector<double>{0.05, 0.4});
  if (window.size() != 2 || !(window[0] <= window[1])) ex.fail("window", "expected [begin, end]");
  e.window_begin = window[0];
  e.window_end = window[1];
  e.stop_at_extinction = ex.boolean("stop_at_extinction", true);
  e.plateau_delta = ex.number("plateau_delta", 0.1);
  e.neck_axis = ex.integer("neck_axis", 0);
  e.neck_position = ex.number("neck_position", 0.0);
  e.eps_values = ex.numbers("eps_values", std::vector<double>{});
  e.compare_time = ex.number("compare_time", 0.25);
  if (e.neck_axis < 0 || e.neck_axis >= cfg.dimension) ex.fail("neck_axis", "out of range");
  if (!(e.plateau_delta > 0.0)) ex.fail("plateau_delta", "must be positive");
  ex.finish();
}

std::string describe_node(const GridSpec& g, std::size_t flat) {
  const auto ijk = g.multi_index(flat);
  std::ostringstream os;
  os << "node (" << ijk[0] << ", " << ijk[1];
  if (g.dim == 3) os << ", " << ijk[2];
  os << ") at x = " << g.node(flat);
  return os.str();
}

}  // namespace

double RunConfig::game_eps() const {
  if (solver.eps > 0.0) return solver.eps;
  if (!eps_list.empty()) return eps_list.front();
  throw ConfigError("game solver needs solver.eps or obstacle.eps");
}

RunConfig parse_config(std::string_view text, const std::string& origin) {
  toml::table root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << origin << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
    throw ConfigError(os.str());
  }
  TableReader top(&root, "");
  RunConfig cfg;
  cfg.dimension = top.integer("dimension");
  if (cfg.dimension != 2 && cfg.dimension != 3) top.fail("dimension", "must be 2 or 3");
  try {
    read_grid(top.table("grid"), cfg);
    read_obstacle(top.table("obstacle"), cfg);
    read_initial(top.table("initial"), cfg);
    read_solver(top.table("solver"), cfg);
    auto out = top.table("output");
    if (out.present()) {
      cfg.output.directory = out.string("directory", "out");
      cfg.output.write_vtk = out.boolean("write_vtk", false);
      out.finish();
    }
    read_experiment(top.table("experiment"), cfg);
  } catch (const PreconditionError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  top.finish();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << is.rdbuf();
  RunConfig cfg = parse_config(buf.str(), path.string());
  cfg.source = path;
  validate_config(cfg);
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  if (!(cfg.far_value < 0.0)) throw ValidationError("grid.far_value must be negative");
  const GridSpec& g = cfg.grid;
  std::vector<double> eps_all = cfg.eps_list;
  if (cfg.is_game()) {
    const double e = cfg.game_eps();
    if (std::find(eps_all.begin(), eps_all.end(), e) == eps_all.end()) eps_all.push_back(e);
    GameParams gp;
    gp.dim = cfg.dimension;
    gp.eps = e;
    gp.direction_count = cfg.solver.directions;
    try {
      gp.validate(g);
    } catch (const PreconditionError& err) {
      throw ValidationError(err.what());
    }
  }
  if (cfg.obstacle.empty()) return;
  const VecN lo = g.origin;
  const VecN hi = g.upper();
  for (double e : eps_all) {
    const double r = cfg.dimension * e;
    for (const auto& p : cfg.obstacle.primitives()) {
      for (int a = 0; a < cfg.dimension; ++a) {
        if (p.lower[a] - r < lo[a] || p.upper[a] + r > hi[a]) {
          std::ostringstream os;
          os << "grid box does not contain K_eps for eps = " << e << " (axis " << a << ")";
          throw ValidationError(os.str());
        }
      }
    }
    // psi_eps > 0 exactly on K_eps = {psi > -N eps}.
    for (std::size_t n = 0; n < g.size(); ++n) {
      const VecN x = g.node(n);
      if (cfg.obstacle.psi(x) > -r && !(initial_value(cfg.initial, cfg.far_value, x) > 0.0)) {
        std::ostringstream os;
        os << "initial set does not contain K_eps for eps = " << e << ": psi_eps > 0 but u0 <= 0 at "
           << describe_node(g, n);
        throw ValidationError(os.str());
      }
    }
  }
}

double initial_value(const InitialSpec& spec, double far_value, const VecN& x) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : spec.shapes) {
    const double d = s.core_distance(x);
    const double r = s.radius;
    double v = 0.0;
    switch (spec.form) {
      case InitialForm::Distance:
        v = r - d;
        break;
      case InitialForm::Quadratic:
        v = (r * r - d * d) / (2.0 * r);
        break;
      case InitialForm::Log:
        v = d > 0.0 ? r * std::log(r / d) : spec.cap;
        break;
      case InitialForm::Power: {
        const double b = spec.exponent;
        v = d > 0.0 ? r * (std::pow(d / r, 2.0 * b) - 1.0) / (2.0 * std::abs(b)) : spec.cap;
        break;
      }
    }
    best = std::max(best, v);
  }
  return std::clamp(best, far_value, spec.cap);
}

GridField initial_field(const RunConfig& cfg) {
  return GridField::sample(cfg.grid, cfg.far_value,
                           [&](const VecN& x) { return initial_value(cfg.initial, cfg.far_value, x); });
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Game: return "game";
    case SolverKind::AltGame: return "alt-game";
    case SolverKind::Pde: return "pde";
    case SolverKind::PdeMean: return "pde-mean";
  }
  return "?";
}

std::string to_string(InitialForm form) {
  switch (form) {
    case InitialForm::Distance: return "distance";
    case InitialForm::Quadratic: return "quadratic";
    case InitialForm::Log: return "log";
    case InitialForm::Power: return "power";
  }
  return "?";
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::None: return "none";
    case ExperimentKind::ShrinkingBall: return "shrinking_ball";
    case ExperimentKind::ConvexHull: return "convex_hull";
    case ExperimentKind::MeanVsMin: return "mean_vs_min";
    case ExperimentKind::EpsRefinement: return "eps_refinement";
  }
  return "?";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '-', '_');
  for (auto k : {ExperimentKind::None, ExperimentKind::ShrinkingBall, ExperimentKind::ConvexHull,
                 ExperimentKind::MeanVsMin, ExperimentKind::EpsRefinement}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

}  // namespace mincurv

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mincurv/cli.hpp"
#include "mincurv/config.hpp"
#include "mincurv/errors.hpp"
#include "mincurv/experiments.hpp"
#include "mincurv/io.hpp"

using namespace mincurv;
namespace fs = std::filesystem;

namespace {

const char* kDisc = R"(
dimension = 2
[grid]
lower = [-1.2, -1.2]
upper = [1.2, 1.2]
spacing = 0.05
far_value = -0.5
[initial]
form = "distance"
balls = [{ center = [0.0, 0.0], radius = 1.0 }]
[solver]
kind = "pde"
t_end = 0.05
snapshot_interval = 0.01
)";

const char* kTwoBall = R"(
dimension = 2
[grid]
lower = [-3.6, -1.6]
upper = [3.6, 1.6]
spacing = 0.05
far_value = -0.5
[obstacle]
eps = [0.1]
balls = [{ center = [-2.0, 0.0], radius = 1.0 }, { center = [2.0, 0.0], radius = 1.0 }]
[initial]
capsules = [{ a = [-2.0, 0.0], b = [2.0, 0.0], radius = RADIUS }]
[solver]
kind = "game"
eps = 0.1
directions = 16
t_end = 0.05
snapshot_interval = 0.01
)";

std::string two_ball(double radius) {
  std::string s = kTwoBall;
  s.replace(s.find("RADIUS"), 6, std::to_string(radius));
  return s;
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mincurv_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  if (out_text) *out_text = out.str();
  return code;
}

}  // namespace

TEST_CASE("minimal disc config parses and validates") {
  RunConfig cfg = parse_config(kDisc);
  CHECK(cfg.dimension == 2);
  CHECK(cfg.grid.dims[0] == 49);
  CHECK(cfg.obstacle.empty());
  CHECK(cfg.solver.kind == SolverKind::Pde);
  CHECK_NOTHROW(validate_config(cfg));
  const GridField u0 = initial_field(cfg);
  CHECK(interpolate(u0, VecN{0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(interpolate(u0, VecN{0.5, 0.0}) == doctest::Approx(0.5));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("dimension = 2\n[grid]\nlower = [0.0, 0.0]\nupper = [1.0, 1.0]\nspacing = 0.1\nbogus = 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("dimension = = 2"), ConfigError);
  CHECK_THROWS_AS(parse_config("dimension = 4\n"), ConfigError);
  std::string positive_far = kDisc;
  positive_far.replace(positive_far.find("far_value = -0.5"), 16, "far_value = 0.5");
  CHECK_THROWS_AS(validate_config(parse_config(positive_far)), ValidationError);
}

TEST_CASE("Omega_0 must contain K_eps") {
  CHECK_NOTHROW(validate_config(parse_config(two_ball(1.4))));
  try {
    validate_config(parse_config(two_ball(1.1)));
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    // The diagnostic names a node.
    CHECK(std::string(e.what()).find("node") != std::string::npos);
  }
}

TEST_CASE("initial profiles vanish on the boundary of Omega_0") {
  InitialSpec spec;
  spec.shapes.push_back(Capsule{VecN{0.0, 0.0}, VecN{0.0, 0.0}, 1.0});
  for (InitialForm f : {InitialForm::Distance, InitialForm::Quadratic, InitialForm::Log, InitialForm::Power}) {
    spec.form = f;
    CHECK(std::abs(initial_value(spec, -0.5, VecN{1.0, 0.0})) < 1e-12);
    CHECK(initial_value(spec, -0.5, VecN{0.5, 0.0}) > 0.0);
    CHECK(initial_value(spec, -0.5, VecN{1.2, 0.0}) < 0.0);
    CHECK(initial_value(spec, -0.5, VecN{0.0, 0.0}) <= spec.cap);
    CHECK(initial_value(spec, -0.5, VecN{9.0, 0.0}) == -0.5);
  }
}

TEST_CASE("shipped configs load") {
  for (const auto& entry : fs::directory_iterator(MINCURV_CONFIG_DIR)) {
    if (entry.path().extension() != ".toml") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path()));
  }
  const RunConfig two = load_config(fs::path(MINCURV_CONFIG_DIR) / "twoball3d.toml");
  CHECK(two.dimension == 3);
  CHECK(two.obstacle.primitives().size() == 2);
}

TEST_CASE("experiment names") {
  CHECK(parse_experiment_kind("convex-hull") == ExperimentKind::ConvexHull);
  CHECK(parse_experiment_kind("shrinking_ball") == ExperimentKind::ShrinkingBall);
  CHECK_FALSE(parse_experiment_kind("nope").has_value());
  CHECK(to_string(SolverKind::AltGame) == "alt-game");
}

TEST_CASE("metric series times increase strictly") {
  MetricSeries s;
  s.add({0.0, 1.0, 1.0, 0.0, 0.0});
  s.add({0.1, 1.0, 1.0, 0.0, 0.0});
  CHECK_THROWS_AS(s.add({0.1, 1.0, 1.0, 0.0, 0.0}), PreconditionError);
  CHECK(s.to_csv().rfind("time,volume,radius,dist_coK,dist_coKeps\n", 0) == 0);
}

TEST_CASE("mask helpers") {
  const GridSpec g = GridSpec::from_bounds(VecN{-3.6, -1.6}, VecN{3.6, 1.6}, 0.05);
  const ObstacleSpec k(2, {Primitive::ball(VecN{-2.0, 0.0}, 1.0), Primitive::ball(VecN{2.0, 0.0}, 1.0)});
  const BoolMask hull = hull_mask(k, g);
  for (std::size_t f = 0; f < g.size(); ++f) {
    const VecN x = g.node(f);
    const double d = point_segment_distance(x, VecN{-2.0, 0.0}, VecN{2.0, 0.0});
    if (std::abs(d - 1.0) > 1e-9) CHECK(hull.test(f) == (d < 1.0));
  }
  const BoolMask comps = component_hull_mask(k, g);
  CHECK_FALSE(comps.test(g.index(72, 32)));  // origin
  CHECK(obstacle_components(k).size() == 2);
  CHECK(equivalent_radius(M_PI * 4.0, 2) == doctest::Approx(2.0));
  CHECK(equivalent_radius(4.0 / 3.0 * M_PI, 3) == doctest::Approx(1.0));
  CHECK(std::isnan(hausdorff_or_nan(BoolMask(g), hull)));

  const GridField u = GridField::sample(g, -0.5, [](const VecN& x) { return 0.75 - std::abs(x[1]); });
  CHECK(neck_radius(u, 0, 0.0) == doctest::Approx(0.75).epsilon(0.01));
  const GridField neg = GridField::constant(g, -1.0, -1.0);
  CHECK(neck_radius(neg, 0, 0.0) == 0.0);
}

TEST_CASE("io round trips") {
  const fs::path dir = temp_dir("io");
  PointSet pts(3);
  pts.insert(VecN{0.5, -1.0, 2.0});
  pts.insert(VecN{0.1, 0.2, 0.3});
  write_points_csv(dir / "p.csv", pts);
  const PointSet back = read_points_csv(dir / "p.csv");
  REQUIRE(back.size() == 2);
  CHECK(back.contains(VecN{0.1, 0.2, 0.3}));

  write_text(dir / "bad.csv", "x,y\n1,2\n3\n");
  CHECK_THROWS_AS(read_points_csv(dir / "bad.csv"), ConfigError);

  const GridSpec g = GridSpec::from_bounds(VecN{0.0, 0.0}, VecN{1.0, 1.0}, 0.5);
  write_vtk(dir / "u.vtk", GridField::constant(g, 1.5, -1.0));
  const std::string vtk = slurp(dir / "u.vtk");
  CHECK(vtk.find("DATASET STRUCTURED_POINTS") != std::string::npos);
  CHECK(vtk.find("DIMENSIONS 3 3 1") != std::string::npos);
  CHECK(vtk.find("POINT_DATA 9") != std::string::npos);
  CHECK(format_time(0.25) == "0.2500");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("cli exit codes") {
  CHECK(run_cli({"frobnicate"}) == kExitUsage);
  CHECK(run_cli({}) == kExitUsage);
  CHECK(run_cli({"run", "--config", "/nonexistent/x.toml"}) == kExitValidation);

  const fs::path dir = temp_dir("cli");
  write_text(dir / "bad.toml", two_ball(1.1));
  CHECK(run_cli({"run", "--config", (dir / "bad.toml").string(), "--out", (dir / "bad").string()}) == kExitValidation);
}

TEST_CASE("cli eps-hull") {
  const fs::path dir = temp_dir("hull");
  write_text(dir / "pts.csv", "x,y\n0,0\n1,0\n1,1\n0,1\n");
  std::string out;
  REQUIRE(run_cli({"eps-hull", "--eps", "0.5", (dir / "pts.csv").string()}, &out) == kExitOk);
  CHECK(out.find("converged=true") != std::string::npos);
  CHECK(out.find("points=9") != std::string::npos);
}

TEST_CASE("cli strategy") {
  std::string out;
  REQUIRE(run_cli({"strategy", "--kind", "concentric-paul", "--x0", "1,0", "--center", "0,0", "--eps", "0.1",
                   "--rounds", "7", "--signs", "alternating"},
                  &out) == kExitOk);
  std::istringstream lines(out);
  std::string line, last;
  while (std::getline(lines, line)) {
    if (!line.empty()) last = line;
  }
  double x = 0.0, y = 0.0;
  char comma = 0;
  std::istringstream row(last.substr(last.find(',') + 1));
  row >> x >> comma >> y;
  CHECK(x * x + y * y == doctest::Approx(1.07).epsilon(1e-12));
}

TEST_CASE("cli props") {
  std::string out;
  CHECK(run_cli({"props", "--trials", "50", "--seed", "3"}, &out) == kExitOk);
  CHECK(out.find("FAIL") == std::string::npos);
  CHECK(out.find("PASS operator.bounds") != std::string::npos);
}

TEST_CASE("cli run writes metrics, metadata and snapshots deterministically") {
  const fs::path dir = temp_dir("run");
  write_text(dir / "disc.toml", kDisc);
  REQUIRE(run_cli({"run", "--config", (dir / "disc.toml").string(), "--out", (dir / "a").string(), "--vtk"}) ==
          kExitOk);
  REQUIRE(run_cli({"run", "--config", (dir / "disc.toml").string(), "--out", (dir / "b").string(), "--threads",
                   "3"}) == kExitOk);
  CHECK(fs::exists(dir / "a" / "metrics.csv"));
  CHECK(fs::exists(dir / "a" / "snapshots" / "pde_t_0.0500.vtk"));
  CHECK(slurp(dir / "a" / "metrics.csv") == slurp(dir / "b" / "metrics.csv"));
  const auto meta = nlohmann::json::parse(slurp(dir / "a" / "run.json"));
  CHECK(meta["solver"]["kind"] == "pde");
  CHECK(meta["dimension"] == 2);

  write_text(dir / "two.toml", two_ball(1.4));
  REQUIRE(run_cli({"run", "--config", (dir / "two.toml").string(), "--out", (dir / "g1").string()}) == kExitOk);
  REQUIRE(run_cli({"run", "--config", (dir / "two.toml").string(), "--out", (dir / "g2").string(), "--threads",
                   "2"}) == kExitOk);
  CHECK(slurp(dir / "g1" / "metrics.csv") == slurp(dir / "g2" / "metrics.csv"));
}

TEST_CASE("cli graph-g") {
  const fs::path dir = temp_dir("graph");
  write_text(dir / "two.toml", two_ball(1.4));
  std::string out;
  REQUIRE(run_cli({"graph-g", "--config", (dir / "two.toml").string(), "--dot", (dir / "g.dot").string()}, &out) ==
          kExitOk);
  CHECK(slurp(dir / "g.dot").find("graph") != std::string::npos);
}

TEST_CASE("shrinking ball experiment on a coarse grid") {
  RunConfig cfg = parse_config(kDisc);
  cfg.experiment.kind = ExperimentKind::ShrinkingBall;
  cfg.experiment.window_begin = 0.01;
  cfg.experiment.window_end = 0.05;
  const ShrinkingBallReport r = experiment_shrinking_ball(cfg);
  CHECK(r.window_samples == 5);
  CHECK(r.sup_rel_error < 0.05);
  CHECK(std::isnan(r.extinction_time));
}

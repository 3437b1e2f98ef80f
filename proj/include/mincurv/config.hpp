#pragma once

// Run configuration: TOML schema, parsing and validation.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mincurv/core_geometry.hpp"
#include "mincurv/obstacle.hpp"

namespace mincurv {

enum class SolverKind { Game, AltGame, Pde, PdeMean };
enum class InitialForm { Distance, Quadratic, Log, Power };
enum class ExperimentKind { None, ShrinkingBall, ConvexHull, MeanVsMin, EpsRefinement };

/// Ball (a == b) or capsule: points within `radius` of the segment [a, b].
struct Capsule {
  VecN a, b;
  double radius = 1.0;

  double core_distance(const VecN& x) const { return point_segment_distance(x, a, b); }
};

/// Omega_0 as a union of capsules, and the profile used to turn each
/// capsule into a level-set function positive exactly inside it.
struct InitialSpec {
  InitialForm form = InitialForm::Distance;
  /// Power profile exponent beta < 0: r ((d/r)^{2 beta} - 1) / (2 |beta|).
  double exponent = -2.0 / 3.0;
  /// Upper clamp of u0 (needed by the singular log and power profiles).
  double cap = 10.0;
  std::vector<Capsule> shapes;
};

struct SolverConfig {
  SolverKind kind = SolverKind::Pde;
  /// Game step; defaults to the first obstacle eps.
  double eps = 0.0;
  int directions = 32;
  bool polish = true;
  int tangent_count = 0;
  double t_end = 1.0;
  double dt = 0.0;
  double cfl_safety = 0.9;
  double grad_threshold = 0.0;
  int threads = 1;
  /// Time between snapshots (0: only t = 0 and t_end).
  double snapshot_interval = 0.0;
};

struct OutputConfig {
  std::filesystem::path directory = "out";
  bool write_vtk = false;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::None;
  /// Shrinking ball: R0 and the error window.
  double initial_radius = 1.0;
  double window_begin = 0.05;
  double window_end = 0.4;
  bool stop_at_extinction = true;
  /// Convex hull: plateau lag.
  double plateau_delta = 0.1;
  /// Mean vs min: plane {x_axis = position}.
  int neck_axis = 0;
  double neck_position = 0.0;
  /// Eps refinement.
  std::vector<double> eps_values;
  double compare_time = 0.25;
};

struct RunConfig {
  int dimension = 2;
  GridSpec grid;
  double far_value = -0.5;
  ObstacleSpec obstacle;
  std::vector<double> eps_list;
  InitialSpec initial;
  SolverConfig solver;
  OutputConfig output;
  ExperimentConfig experiment;
  std::filesystem::path source;

  /// Eps used by the game solvers (solver.eps, else the first obstacle eps).
  double game_eps() const;
  bool is_game() const { return solver.kind == SolverKind::Game || solver.kind == SolverKind::AltGame; }
};

/// Parses TOML text. Throws ConfigError on syntax errors, unknown keys or bad values.
RunConfig parse_config(std::string_view text, const std::string& origin = "<string>");
/// Reads, parses and validates. Throws ConfigError or ValidationError.
RunConfig load_config(const std::filesystem::path& path);

/// Checks mu < 0, grid coverage of K_eps and Omega_0 \supseteq K_eps node-wise.
/// Throws ValidationError naming the offending node.
void validate_config(const RunConfig& cfg);

/// u0 from the initial spec, clamped to [far_value, cap].
double initial_value(const InitialSpec& spec, double far_value, const VecN& x);
GridField initial_field(const RunConfig& cfg);

std::string to_string(SolverKind kind);
std::string to_string(InitialForm form);
std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);

}  // namespace mincurv

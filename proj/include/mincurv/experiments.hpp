#pragma once

// Config-driven solver runs and the metric extraction behind the long-time
// experiments (shrinking ball, convex-hull recovery, minimal vs mean
// curvature necks, eps refinement).

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mincurv/config.hpp"
#include "mincurv/core_geometry.hpp"
#include "mincurv/eps_convexity.hpp"

namespace mincurv {

struct MetricRow {
  double time = 0.0;
  double volume = 0.0;
  double radius = 0.0;
  double dist_coK = 0.0;
  double dist_coKeps = 0.0;
};

/// Rows with strictly increasing times.
class MetricSeries {
 public:
  /// Throws PreconditionError unless row.time exceeds the last time.
  void add(const MetricRow& row);
  const std::vector<MetricRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  /// Header time,volume,radius,dist_coK,dist_coKeps.
  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;

 private:
  std::vector<MetricRow> rows_;
};

/// Receives each snapshot; returning false ends the run early.
using FieldObserver = std::function<bool(double time, const GridField& field)>;

/// Runs cfg.solver from u0 to t_end. The observer sees t = 0, each snapshot
/// time (PDE) or round (game) and the final state. Returns the last field.
GridField run_solver(const RunConfig& cfg, const GridField& u0, const FieldObserver& observer);

/// Node mask of co(K) + B_extra, rasterized from the primitives. Exact for
/// balls of a common radius; otherwise from densely sampled boundaries.
BoolMask hull_mask(const ObstacleSpec& spec, const GridSpec& grid, double extra = 0.0);
/// Union over connected components of K of their hulls.
BoolMask component_hull_mask(const ObstacleSpec& spec, const GridSpec& grid, double extra = 0.0);
/// Primitive indices grouped by overlap.
std::vector<std::vector<int>> obstacle_components(const ObstacleSpec& spec);

double mask_volume(const BoolMask& mask);
/// Radius of the N-ball with the given volume.
double equivalent_radius(double volume, int dim);
/// Hausdorff distance, NaN when either set is empty.
double hausdorff_or_nan(const BoolMask& a, const BoolMask& b);
/// Mean distance from the plane center (x_axis = position, other coordinates 0)
/// to the first zero of u along in-plane rays; 0 when u <= 0 at the center.
double neck_radius(const GridField& u, int axis, double position);

/// Called with a file stem, time and field for snapshot export.
using SnapshotSink = std::function<void(const std::string& stem, double time, const GridField& field)>;
/// game_round_{k}, altgame_round_{k}, pde_t_{t:.4f} or pdemean_t_{t:.4f}.
std::string snapshot_stem(const RunConfig& cfg, double t);

/// Plain configured run: one metrics row per snapshot (distances NaN when K is empty).
MetricSeries run_metrics(const RunConfig& cfg, const SnapshotSink& sink = {});

struct ShrinkingBallReport {
  MetricSeries series;
  /// sup over snapshots in the window of |R - sqrt(R0^2 - 2t)| / sqrt(R0^2 - 2t).
  double sup_rel_error = 0.0;
  int window_samples = 0;
  /// First snapshot time with an empty positivity set (NaN if none).
  double extinction_time = 0.0;
};
/// Throws PreconditionError unless K is empty.
ShrinkingBallReport experiment_shrinking_ball(const RunConfig& cfg, const SnapshotSink& sink = {});

struct ConvexHullReport {
  MetricSeries series;
  GraphG graph;
  std::vector<std::string> warnings;
  double eps = 0.0;
  /// First snapshot t with Hausdorff(Omega_t, Omega_{t + delta}) <= h (NaN if none).
  double plateau_time = 0.0;
  double final_time = 0.0;
  double final_dist_coK = 0.0;
  double final_dist_coKeps = 0.0;
  /// Distance to the union of the hulls of the components of K.
  double final_dist_components = 0.0;
  /// co(K) mask within the final mask.
  bool sandwich_lower = false;
  /// Final mask within co(K) + B_{N eps + 3h}.
  bool sandwich_upper = false;
  double sandwich_radius = 0.0;
};
/// Warns (and still runs) when G is disconnected. Throws EmptyObstacleError when K is empty.
ConvexHullReport experiment_convex_hull(const RunConfig& cfg, const SnapshotSink& sink = {});

struct NeckSample {
  double time = 0.0;
  double neck = 0.0;
};
struct MeanVsMinReport {
  std::vector<NeckSample> minimal;
  std::vector<NeckSample> mean;
  MetricSeries minimal_series;
  MetricSeries mean_series;
};
/// Runs the PDE with the minimal and with the mean curvature operator.
MeanVsMinReport experiment_mean_vs_min(const RunConfig& cfg, const SnapshotSink& sink = {});

struct EpsRefinementReport {
  std::vector<double> eps;
  /// Game time actually reached (first round at or after compare_time).
  std::vector<double> game_time;
  /// Hausdorff distance between the game and PDE positivity masks (a multiple of h).
  std::vector<double> distance;
  /// Hausdorff distance between the interpolated zero level sets.
  std::vector<double> interface_distance;
  double compare_time = 0.0;
  /// Judged on interface_distance, since mask distances tie once below h.
  bool strictly_decreasing = false;
};
/// Game runs for each experiment.eps_values against one PDE run on the same grid.
EpsRefinementReport experiment_eps_refinement(const RunConfig& cfg, const SnapshotSink& sink = {});

}  // namespace mincurv

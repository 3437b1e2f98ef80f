#pragma once

// Value iteration for the two-player game (Paul picks a direction, Carol a
// sign, Paul may stop and collect psi_eps), the alternative subspace game, and
// rollouts of the hand-coded strategies.

#include <functional>
#include <span>
#include <vector>

#include "mincurv/core_geometry.hpp"
#include "mincurv/obstacle.hpp"

namespace mincurv {

struct GameParams {
  int dim = 2;
  double eps = 0.1;
  int n_rounds = 1;
  /// Number of sampled directions M (hemisphere of S^{N-1}).
  int direction_count = 32;
  /// Local refinement of the best sampled direction at every node.
  bool polish = false;
  /// Tangent directions per normal in the alternative game (0 = default).
  int tangent_count = 0;
  int threads = 1;

  /// n_rounds = ceil(2 t0 / eps^2).
  static GameParams for_time(int dim, double eps, double t0, int direction_count);
  static int rounds_for_time(double eps, double t0);

  double dt() const { return 0.5 * eps * eps; }
  double time_of_round(int k) const { return k * dt(); }
  /// Throws PreconditionError unless eps < diameter / 4 and M meets the minimum for N.
  void validate(const GridSpec& grid) const;
};

/// Unit vectors covering a hemisphere, no antipodal pairs.
class DirectionSet {
 public:
  DirectionSet() = default;
  explicit DirectionSet(std::vector<VecN> dirs);

  /// 2D: M angles k pi / M. 3D: Fibonacci hemisphere with M points.
  static DirectionSet hemisphere(int dim, int count);

  int dim() const { return dirs_.empty() ? 0 : dirs_.front().dim(); }
  std::size_t size() const { return dirs_.size(); }
  const VecN& operator[](std::size_t i) const { return dirs_[i]; }
  const std::vector<VecN>& vectors() const { return dirs_; }
  /// Largest angle from any unit vector to the nearest direction or its negative
  /// (exact in 2D, probed in 3D).
  double angular_gap() const { return gap_; }

 private:
  std::vector<VecN> dirs_;
  double gap_ = 0.0;
};

struct Choice {
  VecN direction;
  int sign = 0;
  bool stopped = false;
};

struct Trajectory {
  std::vector<VecN> positions;
  std::vector<Choice> choices;
  double start_time = 0.0;
};

/// new(x) = max{psi(x), max_v min(prev(x + eps v), prev(x - eps v))}.
GridField dpp_step(const GridField& prev, const GridField& psi_field, const GameParams& params,
                   const DirectionSet& dirs);

/// new(x) = max{psi(x), min_n max_{v perp n} prev(x + eps v)}.
GridField alt_dpp_step(const GridField& prev, const GridField& psi_field, const GameParams& params,
                       const DirectionSet& normal_dirs);

struct Snapshot {
  int round = 0;
  double time = 0.0;
  GridField field;
};

enum class GameKind { Standard, Alternative };

/// Called with each snapshot (round 0, every `snapshot_every` rounds, and the last round).
using SnapshotObserver = std::function<void(const Snapshot&)>;

/// Iterates the step map n_rounds times from u0 and returns the final field.
GridField run_game(const GridField& u0, const GridField& psi_field, const GameParams& params,
                   const DirectionSet& dirs, int snapshot_every, const SnapshotObserver& observer,
                   GameKind kind = GameKind::Standard);

/// Same, collecting the snapshots.
std::vector<Snapshot> run_game(const GridField& u0, const GridField& psi_field, const GameParams& params,
                               const DirectionSet& dirs, int snapshot_every, GameKind kind = GameKind::Standard);

/// Paul moves orthogonally to x - z every round; Carol's signs are taken from
/// `carol_signs` (one per round, +1 or -1). Throws PreconditionError if x0 == z.
Trajectory play_concentric_paul(const VecN& x0, const VecN& z, const GameParams& params,
                                std::span<const int> carol_signs);

/// Carol answers each of Paul's directions with the sign moving away from z.
Trajectory play_concentric_carol(const VecN& x0, const VecN& z, const GameParams& params,
                                 std::span<const VecN> paul_dirs);

/// Paul always plays (b - a)/|b - a| and stops once psi_eps > 0.
/// Throws PreconditionError unless x0 lies on the segment [a, b].
Trajectory play_segment_paul(const VecN& x0, const VecN& a, const VecN& b, const EnlargedObstacle& enlarged,
                             const GameParams& params, std::span<const int> carol_signs);

}  // namespace mincurv

#pragma once

// Explicit finite-difference scheme for u_t + L(Du, D^2u) = 0 with the
// obstacle constraint u >= psi.

#include <functional>
#include <vector>

#include "mincurv/core_geometry.hpp"
#include "mincurv/game_engine.hpp"

namespace mincurv {

enum class CurvatureKind { Minimal, Mean };

struct PdeParams {
  /// Time step; 0 selects the largest stable step.
  double dt = 0.0;
  double t_end = 1.0;
  double cfl_safety = 0.9;
  /// 0 selects default_grad_threshold per node.
  double grad_threshold = 0.0;
  CurvatureKind kind = CurvatureKind::Minimal;
  int threads = 1;

  /// cfl_safety * h^2 / (2 (N - 1)).
  double max_stable_dt(const GridSpec& grid) const;
  double effective_dt(const GridSpec& grid) const;
};

/// One step of size params.effective_dt(). Interior nodes move by -dt * L(grad, hess)
/// and are projected above psi; the boundary ring holds max(psi, far_value).
/// Throws StabilityError if dt exceeds the stable bound.
GridField pde_step(const GridField& prev, const GridField& psi_field, const PdeParams& params);
/// Same with an explicit step size (used for the shortened final step).
GridField pde_step(const GridField& prev, const GridField& psi_field, const PdeParams& params, double dt);

/// Stepwise driver. Steps are shortened to land exactly on t_end and on the
/// snapshot times k * snapshot_interval.
class PdeSolver {
 public:
  PdeSolver(GridField u0, GridField psi_field, PdeParams params, double snapshot_interval = 0.0);

  double time() const { return time_; }
  const GridField& field() const { return field_; }
  bool done() const;
  /// Advances one step; returns true when the new time is a snapshot time or t_end.
  bool step();

 private:
  GridField field_;
  GridField psi_;
  PdeParams params_;
  double interval_;
  double time_ = 0.0;
  long steps_ = 0;
  int next_snapshot_ = 1;
};

/// Steps until t_end; the observer sees t = 0, every snapshot time and t_end.
GridField run_pde(const GridField& u0, const GridField& psi_field, const PdeParams& params, double snapshot_interval,
                  const SnapshotObserver& observer);
std::vector<Snapshot> run_pde(const GridField& u0, const GridField& psi_field, const PdeParams& params,
                              double snapshot_interval);

}  // namespace mincurv

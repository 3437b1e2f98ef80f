#include "mincurv/pde_solver.hpp"

#include <algorithm>
#include <cmath>

#include "mincurv/curvature_operator.hpp"
#include "mincurv/errors.hpp"
#include "mincurv/parallel.hpp"

namespace mincurv {

double PdeParams::max_stable_dt(const GridSpec& grid) const {
  return cfl_safety * grid.spacing * grid.spacing / (2.0 * (grid.dim - 1));
}

double PdeParams::effective_dt(const GridSpec& grid) const { return dt > 0.0 ? dt : max_stable_dt(grid); }

namespace {

// Speed at an interior node from raw differences; falls back to the generic
// operator when the gradient is below the threshold.
double speed_2d(const double* at, long sy, double h, const PdeParams& params) {
  const double inv2h = 0.5 / h;
  const double invh2 = 1.0 / (h * h);
  const double c = at[0];
  const double px = (at[1] - at[-1]) * inv2h;
  const double py = (at[sy] - at[-sy]) * inv2h;
  const double xx = (at[1] - 2.0 * c + at[-1]) * invh2;
  const double yy = (at[sy] - 2.0 * c + at[-sy]) * invh2;
  const double xy = (at[1 + sy] - at[1 - sy] - at[-1 + sy] + at[-1 - sy]) * 0.25 * invh2;
  const double pp = px * px + py * py;
  double thr = params.grad_threshold;
  if (!(thr > 0.0)) thr = 1e-8 * std::max(1.0, std::sqrt(xx * xx + 2.0 * xy * xy + yy * yy));
  if (pp > thr * thr) {
    const double tangential = (xx * py * py - 2.0 * xy * px * py + yy * px * px) / pp;
    // In 2D the minimal and mean curvature operators coincide.
    return -tangential;
  }
  if (xx == 0.0 && yy == 0.0 && xy == 0.0) return 0.0;
  const SymMatrixN X(2, {xx, xy, xy, yy});
  const VecN p{px, py};
  return params.kind == CurvatureKind::Minimal ? eval_L(p, X, thr).value : mean_curvature_op(p, X, thr);
}

double speed_3d(const double* at, long sy, long sz, double h, const PdeParams& params) {
  const double inv2h = 0.5 / h;
  const double invh2 = 1.0 / (h * h);
  const double c = at[0];
  const double px = (at[1] - at[-1]) * inv2h;
  const double py = (at[sy] - at[-sy]) * inv2h;
  const double pz = (at[sz] - at[-sz]) * inv2h;
  const double xx = (at[1] - 2.0 * c + at[-1]) * invh2;
  const double yy = (at[sy] - 2.0 * c + at[-sy]) * invh2;
  const double zz = (at[sz] - 2.0 * c + at[-sz]) * invh2;
  const double q = 0.25 * invh2;
  const double xy = (at[1 + sy] - at[1 - sy] - at[-1 + sy] + at[-1 - sy]) * q;
  const double xz = (at[1 + sz] - at[1 - sz] - at[-1 + sz] + at[-1 - sz]) * q;
  const double yz = (at[sy + sz] - at[sy - sz] - at[-sy + sz] + at[-sy - sz]) * q;
  const double pp = px * px + py * py + pz * pz;
  double thr = params.grad_threshold;
  if (!(thr > 0.0)) {
    thr = 1e-8 * std::max(1.0, std::sqrt(xx * xx + yy * yy + zz * zz + 2.0 * (xy * xy + xz * xz + yz * yz)));
  }
  if (pp > thr * thr) {
    // T = P X P with P = I - n n^T has eigenvalues {0, a, b} on p-perp;
    // a + b = tr T and a b = sum of the principal 2x2 minors of T.
    const double inv = 1.0 / std::sqrt(pp);
    const double nx = px * inv;
    const double ny = py * inv;
    const double nz = pz * inv;
    const double xn0 = xx * nx + xy * ny + xz * nz;
    const double xn1 = xy * nx + yy * ny + yz * nz;
    const double xn2 = xz * nx + yz * ny + zz * nz;
    const double nxn = nx * xn0 + ny * xn1 + nz * xn2;
    // T_ij = X_ij - n_i (Xn)_j - (Xn)_i n_j + (n.Xn) n_i n_j
    const double t00 = xx - 2.0 * nx * xn0 + nxn * nx * nx;
    const double t11 = yy - 2.0 * ny * xn1 + nxn * ny * ny;
    const double t22 = zz - 2.0 * nz * xn2 + nxn * nz * nz;
    const double tr = t00 + t11 + t22;
    if (params.kind == CurvatureKind::Mean) return -tr;
    const double t01 = xy - nx * xn1 - xn0 * ny + nxn * nx * ny;
    const double t02 = xz - nx * xn2 - xn0 * nz + nxn * nx * nz;
    const double t12 = yz - ny * xn2 - xn1 * nz + nxn * ny * nz;
    const double minors = t00 * t11 - t01 * t01 + t00 * t22 - t02 * t02 + t11 * t22 - t12 * t12;
    const double disc = std::max(0.0, 0.25 * tr * tr - minors);
    return -(0.5 * tr + std::sqrt(disc));
  }
  if (xx == 0.0 && yy == 0.0 && zz == 0.0 && xy == 0.0 && xz == 0.0 && yz == 0.0) return 0.0;
  const SymMatrixN X(3, {xx, xy, xz, xy, yy, yz, xz, yz, zz});
  const VecN p{px, py, pz};
  return params.kind == CurvatureKind::Minimal ? eval_L(p, X, thr).value : mean_curvature_op(p, X, thr);
}

}  // namespace

GridField pde_step(const GridField& prev, const GridField& psi_field, const PdeParams& params) {
  return pde_step(prev, psi_field, params, params.effective_dt(prev.spec()));
}

GridField pde_step(const GridField& prev, const GridField& psi_field, const PdeParams& params, double dt) {
  if (!(prev.spec() == psi_field.spec())) throw PreconditionError("fields must share a grid");
  const GridSpec& g = prev.spec();
  const double bound = params.max_stable_dt(g);
  if (!(dt > 0.0) || dt > bound * (1.0 + 1e-12)) {
    throw StabilityError("time step " + std::to_string(dt) + " exceeds the stable bound " + std::to_string(bound));
  }
  const std::array<long, 3> stride{1, g.dims[0], static_cast<long>(g.dims[0]) * g.dims[1]};
  const auto pv = prev.values();
  const auto psi = psi_field.values();
  const double boundary_value = prev.far_value();
  std::vector<double> out(g.size());
  const int nx = g.dims[0];
  const int ny = g.dims[1];
  const int nz = g.dims[2];
  const std::size_t rows = static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
  parallel_for(rows, params.threads, [&](std::size_t row_begin, std::size_t row_end) {
    for (std::size_t row = row_begin; row < row_end; ++row) {
      const int j = static_cast<int>(row % static_cast<std::size_t>(ny));
      const int k = static_cast<int>(row / static_cast<std::size_t>(ny));
      const std::size_t first = row * static_cast<std::size_t>(nx);
      const bool boundary_row = j == 0 || j == ny - 1 || (g.dim == 3 && (k == 0 || k == nz - 1));
      for (int i = 0; i < nx; ++i) {
        const std::size_t n = first + static_cast<std::size_t>(i);
        if (boundary_row || i == 0 || i == nx - 1) {
          out[n] = std::max(psi[n], boundary_value);
          continue;
        }
        const double speed = g.dim == 2 ? speed_2d(pv.data() + n, stride[1], g.spacing, params)
                                        : speed_3d(pv.data() + n, stride[1], stride[2], g.spacing, params);
        out[n] = std::max(psi[n], pv[n] - dt * speed);
      }
    }
  });
  return GridField(g, std::move(out), prev.far_value());
}

PdeSolver::PdeSolver(GridField u0, GridField psi_field, PdeParams params, double snapshot_interval)
    : field_(std::move(u0)), psi_(std::move(psi_field)), params_(params), interval_(snapshot_interval) {
  if (!(field_.spec() == psi_.spec())) throw PreconditionError("fields must share a grid");
  if (!(params_.t_end > 0.0)) throw PreconditionError("t_end must be positive");
  if (!(params_.cfl_safety > 0.0 && params_.cfl_safety <= 1.0)) throw PreconditionError("cfl_safety must lie in (0, 1]");
  if (params_.dt > params_.max_stable_dt(field_.spec()) * (1.0 + 1e-12)) {
    throw StabilityError("configured dt exceeds the stable bound");
  }
}

bool PdeSolver::done() const { return time_ >= params_.t_end * (1.0 - 1e-12); }

bool PdeSolver::step() {
  if (done()) return false;
  const double dt = params_.effective_dt(field_.spec());
  double target = std::min(params_.t_end, time_ + dt);
  bool snapshot = false;
  if (interval_ > 0.0) {
    const double next = next_snapshot_ * interval_;
    if (next <= target * (1.0 + 1e-12)) {
      target = std::min(target, next);
      snapshot = true;
      ++next_snapshot_;
    }
  }
  // Absorb a tiny remainder into this step rather than taking a sliver step next.
  if (params_.t_end - target < 1e-9 * dt) target = params_.t_end;
  field_ = pde_step(field_, psi_, params_, std::min(target - time_, params_.max_stable_dt(field_.spec())));
  time_ = target;
  ++steps_;
  return snapshot || done();
}

GridField run_pde(const GridField& u0, const GridField& psi_field, const PdeParams& params, double snapshot_interval,
                  const SnapshotObserver& observer) {
  PdeSolver solver(u0, psi_field, params, snapshot_interval);
  int count = 0;
  if (observer) observer(Snapshot{0, 0.0, solver.field()});
  while (!solver.done()) {
    if (solver.step() && observer) observer(Snapshot{++count, solver.time(), solver.field()});
  }
  return solver.field();
}

std::vector<Snapshot> run_pde(const GridField& u0, const GridField& psi_field, const PdeParams& params,
                              double snapshot_interval) {
  std::vector<Snapshot> snaps;
  run_pde(u0, psi_field, params, snapshot_interval, [&](const Snapshot& s) { snaps.push_back(s); });
  return snaps;
}

}  // namespace mincurv

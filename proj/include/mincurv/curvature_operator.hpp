#pragma once

// Minimal-curvature operator L(p, X) = inf over unit v orthogonal to p of -<Xv, v>,
// the mean-curvature comparison operator, and checks of the operator's axioms.

#include "mincurv/linalg.hpp"

namespace mincurv {

struct OperatorResult {
  double value = 0.0;
  /// Unit tangent attaining the infimum.
  VecN argmin_direction;
  /// |p| was at or below the gradient threshold; the infimum ran over all unit vectors.
  bool degenerate_p = false;
};

/// 1e-8 scaled by the Frobenius norm of X (at least 1e-8).
double default_grad_threshold(const SymMatrixN& X);

/// Throws PreconditionError unless grad_threshold > 0.
OperatorResult eval_L(const VecN& p, const SymMatrixN& X, double grad_threshold);
inline OperatorResult eval_L(const VecN& p, const SymMatrixN& X) { return eval_L(p, X, default_grad_threshold(X)); }

/// Value of eval_L only, without the minimizing direction.
double eval_L_value(const VecN& p, const SymMatrixN& X, double grad_threshold);

/// -trace(P X P) with P the projector onto p-perp; -trace(X) for small |p|.
double mean_curvature_op(const VecN& p, const SymMatrixN& X, double grad_threshold);

/// L(alpha p, alpha X + sigma p (x) p) == alpha L(p, X) to 1e-10 relative.
bool check_geometric(const VecN& p, const SymMatrixN& X, double alpha, double sigma);
/// L(p, Y) <= L(p, X) + 1e-12 for X <= Y.
bool check_elliptic(const VecN& p, const SymMatrixN& X, const SymMatrixN& Y);
/// lambda_min(-X) <= L(p, X) <= lambda_max(-X), with 1e-12 slack.
bool check_bounds(const VecN& p, const SymMatrixN& X);

}  // namespace mincurv

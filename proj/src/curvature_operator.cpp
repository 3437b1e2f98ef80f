#include "mincurv/curvature_operator.hpp"

#include <algorithm>
#include <cmath>

#include "mincurv/errors.hpp"

namespace mincurv {

double default_grad_threshold(const SymMatrixN& X) { return 1e-8 * std::max(1.0, X.frobenius()); }

OperatorResult eval_L(const VecN& p, const SymMatrixN& X, double grad_threshold) {
  if (!(grad_threshold > 0.0)) throw PreconditionError("eval_L: grad_threshold must be positive");
  const int n = X.dim();
  OperatorResult r;
  if (norm(p) <= grad_threshold) {
    const SymEigen e = sym_eigen(X);
    r.value = -e.values[n - 1];
    r.argmin_direction = e.vectors[n - 1];
    r.degenerate_p = true;
    return r;
  }
  const auto basis = orthogonal_complement(p);
  if (n == 2) {
    r.value = -X.quad(basis[0]);
    r.argmin_direction = basis[0];
    return r;
  }
  // Restriction of X to span(basis[0], basis[1]).
  const VecN& e1 = basis[0];
  const VecN& e2 = basis[1];
  const VecN xe1 = X.apply(e1);
  const double a = dot(e1, xe1);
  const double b = dot(e2, xe1);
  const double c = X.quad(e2);
  const SymEigen e = sym_eigen(SymMatrixN(2, {a, b, b, c}));
  r.value = -e.values[1];
  r.argmin_direction = normalized(e1 * e.vectors[1][0] + e2 * e.vectors[1][1]);
  return r;
}

double eval_L_value(const VecN& p, const SymMatrixN& X, double grad_threshold) {
  const int n = X.dim();
  const double pp = norm2(p);
  if (pp <= grad_threshold * grad_threshold) return eval_L(p, X, grad_threshold).value;
  if (n == 2) {
    // Tangent (-p1, p0) / |p|.
    return -(X(0, 0) * p[1] * p[1] - 2.0 * X(0, 1) * p[0] * p[1] + X(1, 1) * p[0] * p[0]) / pp;
  }
  if (n == 3) {
    // P X P has eigenvalues 0, m1, m2; recover m1, m2 from its trace and
    // second invariant.
    double P[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) P[i][j] = (i == j ? 1.0 : 0.0) - p[i] * p[j] / pp;
    }
    double XP[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) XP[i][j] = X(i, 0) * P[0][j] + X(i, 1) * P[1][j] + X(i, 2) * P[2][j];
    }
    double M[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) M[i][j] = P[i][0] * XP[0][j] + P[i][1] * XP[1][j] + P[i][2] * XP[2][j];
    }
    const double tr = M[0][0] + M[1][1] + M[2][2];
    const double minors = M[0][0] * M[1][1] - M[0][1] * M[1][0] + M[0][0] * M[2][2] - M[0][2] * M[2][0] +
                          M[1][1] * M[2][2] - M[1][2] * M[2][1];
    const double disc = std::max(0.0, 0.25 * tr * tr - minors);
    return -(0.5 * tr + std::sqrt(disc));
  }
  return eval_L(p, X, grad_threshold).value;
}

double mean_curvature_op(const VecN& p, const SymMatrixN& X, double grad_threshold) {
  const double pp = norm2(p);
  if (std::sqrt(pp) <= grad_threshold) return -X.trace();
  return -(X.trace() - X.quad(p) / pp);
}

bool check_geometric(const VecN& p, const SymMatrixN& X, double alpha, double sigma) {
  if (!(alpha > 0.0)) throw PreconditionError("check_geometric: alpha must be positive");
  const double base = eval_L(p, X).value;
  const SymMatrixN Y = alpha * X + sigma * SymMatrixN::outer(p);
  const double scaled = eval_L(p * alpha, Y).value;
  return std::abs(scaled - alpha * base) <= 1e-10 * (1.0 + std::abs(alpha * base));
}

bool check_elliptic(const VecN& p, const SymMatrixN& X, const SymMatrixN& Y) {
  return eval_L(p, Y).value <= eval_L(p, X).value + 1e-12;
}

bool check_bounds(const VecN& p, const SymMatrixN& X) {
  const SymEigen e = sym_eigen(X);
  const int n = X.dim();
  const double lo = -e.values[n - 1];
  const double hi = -e.values[0];
  const double v = eval_L(p, X).value;
  return lo - 1e-12 <= v && v <= hi + 1e-12;
}

}  // namespace mincurv

#include "mincurv/linalg.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "mincurv/errors.hpp"

namespace mincurv {

void require_dimension(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw PreconditionError("unsupported dimension " + std::to_string(dim));
  }
}

VecN::VecN(std::initializer_list<double> coords) : dim_(static_cast<int>(coords.size())) {
  require_dimension(dim_);
  std::copy(coords.begin(), coords.end(), c_.begin());
}

VecN VecN::zeros(int dim) {
  require_dimension(dim);
  VecN v;
  v.dim_ = dim;
  return v;
}

VecN VecN::unit(int dim, int axis) {
  VecN v = zeros(dim);
  v[axis] = 1.0;
  return v;
}

VecN& VecN::operator+=(const VecN& o) {
  for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
  return *this;
}

VecN& VecN::operator-=(const VecN& o) {
  for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
  return *this;
}

VecN& VecN::operator*=(double s) {
  for (int i = 0; i < dim_; ++i) c_[i] *= s;
  return *this;
}

bool operator==(const VecN& a, const VecN& b) {
  if (a.dim_ != b.dim_) return false;
  for (int i = 0; i < a.dim_; ++i) {
    if (a.c_[i] != b.c_[i]) return false;
  }
  return true;
}

double dot(const VecN& a, const VecN& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const VecN& a) { return dot(a, a); }

VecN normalized(const VecN& a) {
  const double n = norm(a);
  return n > 0.0 ? a * (1.0 / n) : a;
}

bool all_finite(const VecN& a) {
  for (int i = 0; i < a.dim(); ++i) {
    if (!std::isfinite(a[i])) return false;
  }
  return true;
}

VecN cross(const VecN& a, const VecN& b) {
  return VecN{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

std::ostream& operator<<(std::ostream& os, const VecN& v) {
  os << '(';
  for (int i = 0; i < v.dim(); ++i) os << (i ? ", " : "") << v[i];
  return os << ')';
}

SymMatrixN::SymMatrixN(int dim, std::initializer_list<double> row_major) : dim_(dim) {
  require_dimension(dim);
  if (static_cast<int>(row_major.size()) != dim * dim) {
    throw PreconditionError("SymMatrixN: expected dim*dim entries");
  }
  auto it = row_major.begin();
  std::array<double, kMaxDim * kMaxDim> full{};
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) full[i * kMaxDim + j] = *it++;
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      a_[i * kMaxDim + j] = 0.5 * (full[i * kMaxDim + j] + full[j * kMaxDim + i]);
    }
  }
}

SymMatrixN SymMatrixN::zeros(int dim) {
  require_dimension(dim);
  SymMatrixN m;
  m.dim_ = dim;
  return m;
}

SymMatrixN SymMatrixN::identity(int dim) {
  SymMatrixN m = zeros(dim);
  for (int i = 0; i < dim; ++i) m.a_[i * kMaxDim + i] = 1.0;
  return m;
}

SymMatrixN SymMatrixN::diagonal(const VecN& d) {
  SymMatrixN m = zeros(d.dim());
  for (int i = 0; i < d.dim(); ++i) m.a_[i * kMaxDim + i] = d[i];
  return m;
}

SymMatrixN SymMatrixN::outer(const VecN& p) {
  SymMatrixN m = zeros(p.dim());
  for (int i = 0; i < p.dim(); ++i) {
    for (int j = 0; j < p.dim(); ++j) m.a_[i * kMaxDim + j] = p[i] * p[j];
  }
  return m;
}

void SymMatrixN::set(int i, int j, double v) {
  a_[i * kMaxDim + j] = v;
  a_[j * kMaxDim + i] = v;
}

double SymMatrixN::quad(const VecN& v) const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) s += v[i] * a_[i * kMaxDim + j] * v[j];
  }
  return s;
}

VecN SymMatrixN::apply(const VecN& v) const {
  VecN r = VecN::zeros(dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) r[i] += a_[i * kMaxDim + j] * v[j];
  }
  return r;
}

double SymMatrixN::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim_; ++i) t += a_[i * kMaxDim + i];
  return t;
}

double SymMatrixN::frobenius() const {
  double s = 0.0;
  for (double x : a_) s += x * x;
  return std::sqrt(s);
}

SymMatrixN& SymMatrixN::operator+=(const SymMatrixN& o) {
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

SymMatrixN& SymMatrixN::operator*=(double s) {
  for (double& x : a_) x *= s;
  return *this;
}

namespace {

SymEigen eigen_2x2(double a, double b, double c) {
  // [[a, b], [b, c]]
  SymEigen e;
  e.dim = 2;
  const double mean = 0.5 * (a + c);
  const double half_diff = 0.5 * (a - c);
  const double r = std::hypot(half_diff, b);
  e.values[0] = mean - r;
  e.values[1] = mean + r;
  // Eigenvector of the larger eigenvalue, via the half-angle formula.
  double cs = 1.0;
  double sn = 0.0;
  if (r > 0.0) {
    const double theta = 0.5 * std::atan2(b, half_diff);
    cs = std::cos(theta);
    sn = std::sin(theta);
  }
  e.vectors[1] = VecN{cs, sn};
  e.vectors[0] = VecN{-sn, cs};
  return e;
}

SymEigen eigen_jacobi(const SymMatrixN& m) {
  const int n = m.dim();
  double a[kMaxDim][kMaxDim];
  double v[kMaxDim][kMaxDim];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a[i][j] = m(i, j);
      v[i][j] = i == j ? 1.0 : 0.0;
    }
  }
  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-300) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::array<int, kMaxDim> order{0, 1, 2};
  std::sort(order.begin(), order.begin() + n, [&](int x, int y) { return a[x][x] < a[y][y]; });
  SymEigen e;
  e.dim = n;
  for (int r = 0; r < n; ++r) {
    const int col = order[r];
    e.values[r] = a[col][col];
    VecN vec = VecN::zeros(n);
    for (int k = 0; k < n; ++k) vec[k] = v[k][col];
    e.vectors[r] = normalized(vec);
  }
  return e;
}

}  // namespace

SymEigen sym_eigen(const SymMatrixN& m) {
  switch (m.dim()) {
    case 1: {
      SymEigen e;
      e.dim = 1;
      e.values[0] = m(0, 0);
      e.vectors[0] = VecN::unit(1, 0);
      return e;
    }
    case 2:
      return eigen_2x2(m(0, 0), m(0, 1), m(1, 1));
    default:
      return eigen_jacobi(m);
  }
}

std::array<VecN, kMaxDim - 1> orthogonal_complement(const VecN& p) {
  const int n = p.dim();
  const VecN u = normalized(p);
  // H = I - 2 w w^T / |w|^2 with w = u + sign(u0) e1 maps u to -sign(u0) e1;
  // the remaining columns of H span u-perp.
  VecN w = u;
  const double sgn = u[0] >= 0.0 ? 1.0 : -1.0;
  w[0] += sgn;
  const double ww = norm2(w);
  std::array<VecN, kMaxDim - 1> basis{};
  for (int col = 1; col < n; ++col) {
    VecN e = VecN::unit(n, col);
    const double f = 2.0 * w[col] / ww;
    basis[col - 1] = e - w * f;
  }
  return basis;
}

}  // namespace mincurv

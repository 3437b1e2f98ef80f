#pragma once

// Small fixed-capacity vectors and symmetric matrices for N in {2, 3}.

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>

namespace mincurv {

inline constexpr int kMaxDim = 3;

void require_dimension(int dim);

class VecN {
 public:
  VecN() = default;
  VecN(std::initializer_list<double> coords);

  static VecN zeros(int dim);
  static VecN unit(int dim, int axis);

  int dim() const { return dim_; }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

  VecN& operator+=(const VecN& o);
  VecN& operator-=(const VecN& o);
  VecN& operator*=(double s);

  friend VecN operator+(VecN a, const VecN& b) { return a += b; }
  friend VecN operator-(VecN a, const VecN& b) { return a -= b; }
  friend VecN operator*(VecN a, double s) { return a *= s; }
  friend VecN operator*(double s, VecN a) { return a *= s; }
  friend VecN operator-(VecN a) { return a *= -1.0; }
  friend bool operator==(const VecN& a, const VecN& b);

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

double dot(const VecN& a, const VecN& b);
double norm2(const VecN& a);
inline double norm(const VecN& a) { return std::sqrt(norm2(a)); }
inline double distance(const VecN& a, const VecN& b) { return norm(a - b); }
VecN normalized(const VecN& a);
bool all_finite(const VecN& a);
// 3D only.
VecN cross(const VecN& a, const VecN& b);

std::ostream& operator<<(std::ostream& os, const VecN& v);

/// Symmetric N x N matrix, stored densely and symmetrized on construction.
class SymMatrixN {
 public:
  SymMatrixN() = default;
  /// Row-major entries; the stored matrix is (A + A^T) / 2.
  SymMatrixN(int dim, std::initializer_list<double> row_major);

  static SymMatrixN zeros(int dim);
  static SymMatrixN identity(int dim);
  static SymMatrixN diagonal(const VecN& d);
  /// p (x) p
  static SymMatrixN outer(const VecN& p);

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * kMaxDim + j)]; }
  void set(int i, int j, double v);

  double quad(const VecN& v) const;
  VecN apply(const VecN& v) const;
  double trace() const;
  double frobenius() const;

  SymMatrixN& operator+=(const SymMatrixN& o);
  SymMatrixN& operator*=(double s);
  friend SymMatrixN operator+(SymMatrixN a, const SymMatrixN& b) { return a += b; }
  friend SymMatrixN operator*(double s, SymMatrixN a) { return a *= s; }
  friend SymMatrixN operator*(SymMatrixN a, double s) { return a *= s; }

 private:
  std::array<double, kMaxDim * kMaxDim> a_{};
  int dim_ = 0;
};

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
struct SymEigen {
  int dim = 0;
  std::array<double, kMaxDim> values{};
  std::array<VecN, kMaxDim> vectors{};
};

/// Closed form for 1x1 and 2x2, cyclic Jacobi for 3x3.
SymEigen sym_eigen(const SymMatrixN& m);

/// Orthonormal basis of the complement of a nonzero vector, from the
/// Householder reflector that maps p/|p| onto e1 (columns 2..N).
std::array<VecN, kMaxDim - 1> orthogonal_complement(const VecN& p);

}  // namespace mincurv

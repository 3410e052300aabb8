// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Small dense Hermitian matrix kernel used by the separation engines.
// Matrices are at most kMaxDim x kMaxDim and live on the stack.

#ifndef SBSS_HERMITIAN_HPP_
#define SBSS_HERMITIAN_HPP_

#include <complex>

#include <Eigen/Core>

namespace sbss {

using Complex = std::complex<double>;

inline constexpr int kMaxDim = 8;

using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                              Eigen::ColMajor, kMaxDim, kMaxDim>;
using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor,
                              kMaxDim, 1>;
using RVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor,
                              kMaxDim, 1>;

/// Square complex matrix with exact Hermitian symmetry: the strictly lower
/// triangle is always the conjugate of the upper one and the diagonal is real.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  /// Zero matrix of the given dimension.
  explicit HermitianMatrix(int dim);

  static HermitianMatrix identity(int dim);
  static HermitianMatrix diagonal(const RVector& d);
  /// v v^H
  static HermitianMatrix outer(const CVector& v);
  /// Accepts m if max |m_ij - conj(m_ji)| <= tol * max(1, max |m_ij|),
  /// otherwise throws ContractViolation. The stored copy is symmetrized.
  static HermitianMatrix from(const CMatrix& m, double tol = 1e-10);
  /// (m + m^H) / 2 without checking.
  static HermitianMatrix hermitize(const CMatrix& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }
  double trace() const;
  double frobenius_norm() const { return m_.norm(); }

  HermitianMatrix& operator+=(const HermitianMatrix& o);
  HermitianMatrix& operator*=(double s);
  /// this += s * o
  HermitianMatrix& add_scaled(double s, const HermitianMatrix& o);

  friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }
  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) {
    return a += b;
  }

 private:
  void symmetrize();
  CMatrix m_;
};

/// Eigenvalues in ascending order with the matching unitary eigenvectors.
struct Eigensystem {
  RVector values;
  CMatrix vectors;
};

/// Cyclic complex Jacobi eigendecomposition.
Eigensystem eigh(const HermitianMatrix& a);

/// Re(Tr(a b)).
double trace_prod(const HermitianMatrix& a, const CMatrix& b);

/// Inverse of a PSD matrix. When the smallest eigenvalue falls below
/// 1e-12 Tr(a), every eigenvalue is loaded by 1e-10 Tr(a) / M first.
HermitianMatrix inv_psd(const HermitianMatrix& a);

/// log det with the same loading rule as inv_psd.
double logdet_psd(const HermitianMatrix& a);

/// inv_psd and logdet_psd from a single eigendecomposition.
struct PsdInverse {
  HermitianMatrix inverse;
  double logdet = 0.0;
};
PsdInverse inv_logdet_psd(const HermitianMatrix& a);

HermitianMatrix sqrt_psd(const HermitianMatrix& a);

/// PSD solution R of R a R = b.
HermitianMatrix riccati_solve(const HermitianMatrix& a, const HermitianMatrix& b);

/// Nonnegative root of c3 w^3 + c2 w^2 + c0 with c3 > 0, c2 >= 0, c0 <= 0.
double cubic_positive_root(double c3, double c2, double c0);

/// True when every eigenvalue is >= -rel_tol * (largest |eigenvalue|).
bool is_psd(const HermitianMatrix& a, double rel_tol = 1e-10);

}  // namespace sbss

#endif  // SBSS_HERMITIAN_HPP_

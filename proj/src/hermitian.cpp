// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sbss/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sbss/errors.hpp"

namespace sbss {

namespace {

constexpr double kLoadingThreshold = 1e-12;
constexpr double kLoadingEpsilon = 1e-10;
constexpr double kPsdTolerance = 1e-10;

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw ContractViolation("matrix dimension " + std::to_string(dim) +
                            " outside [1, " + std::to_string(kMaxDim) + "]");
  }
}

// Eigenvalues of a PSD matrix with negative round-off clamped to zero and
// diagonal loading applied when the spectrum is near singular.
RVector loaded_spectrum(const Eigensystem& es, const char* who) {
  const int m = static_cast<int>(es.values.size());
  const double largest = es.values.cwiseAbs().maxCoeff();
  RVector v = es.values;
  for (int i = 0; i < m; ++i) {
    if (v(i) < -kPsdTolerance * largest) {
      throw ContractViolation(std::string(who) + ": matrix is not PSD (eigenvalue " +
                              std::to_string(v(i)) + ")");
    }
    v(i) = std::max(v(i), 0.0);
  }
  const double tr = v.sum();
  if (!(tr > 0.0) || !std::isfinite(tr)) {
    throw SingularMatrix(std::string(who) + ": zero or non-finite matrix");
  }
  if (v.minCoeff() < kLoadingThreshold * tr) {
    v.array() += kLoadingEpsilon * tr / m;
  }
  return v;
}

HermitianMatrix reconstruct(const CMatrix& vectors, const RVector& values) {
  CMatrix m = vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
  return HermitianMatrix::hermitize(m);
}

}  // namespace

HermitianMatrix::HermitianMatrix(int dim) {
  check_dim(dim);
  m_ = CMatrix::Zero(dim, dim);
}

HermitianMatrix HermitianMatrix::identity(int dim) {
  HermitianMatrix h(dim);
  h.m_.setIdentity();
  return h;
}

HermitianMatrix HermitianMatrix::diagonal(const RVector& d) {
  HermitianMatrix h(static_cast<int>(d.size()));
  for (int i = 0; i < d.size(); ++i) h.m_(i, i) = d(i);
  return h;
}

HermitianMatrix HermitianMatrix::outer(const CVector& v) {
  HermitianMatrix h(static_cast<int>(v.size()));
  h.m_.noalias() = v * v.adjoint();
  h.symmetrize();
  return h;
}

HermitianMatrix HermitianMatrix::from(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw ContractViolation("matrix is not square");
  check_dim(static_cast<int>(m.rows()));
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= tol * scale)) {
    throw ContractViolation("matrix is not Hermitian (asymmetry " +
                            std::to_string(asym) + ")");
  }
  return hermitize(m);
}

HermitianMatrix HermitianMatrix::hermitize(const CMatrix& m) {
  HermitianMatrix h;
  h.m_ = m;
  h.symmetrize();
  return h;
}

void HermitianMatrix::symmetrize() {
  const int n = dim();
  for (int i = 0; i < n; ++i) {
    m_(i, i) = Complex(m_(i, i).real(), 0.0);
    for (int j = i + 1; j < n; ++j) {
      const Complex v = 0.5 * (m_(i, j) + std::conj(m_(j, i)));
      m_(i, j) = v;
      m_(j, i) = std::conj(v);
    }
  }
}

double HermitianMatrix::trace() const { return m_.trace().real(); }

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o) {
  if (o.dim() != dim()) throw ContractViolation("dimension mismatch in +=");
  m_ += o.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

HermitianMatrix& HermitianMatrix::add_scaled(double s, const HermitianMatrix& o) {
  if (o.dim() != dim()) throw ContractViolation("dimension mismatch in add_scaled");
  m_ += s * o.m_;
  return *this;
}

Eigensystem eigh(const HermitianMatrix& a) {
  const int n = a.dim();
  CMatrix m = a.matrix();
  CMatrix v = CMatrix::Identity(n, n);

  const double total = std::max(m.norm(), std::numeric_limits<double>::min());
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += std::norm(m(p, q));
    if (std::sqrt(off) <= 1e-17 * total) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Complex apq = m(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300) continue;
        // Unitary J = diag(1, conj(phase)) * real rotation zeroes m(p, q).
        const Complex phase = apq / mag;
        const double theta = (m(q, q).real() - m(p, p).real()) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Complex jpp = c;
        const Complex jpq = s;
        const Complex jqp = -s * std::conj(phase);
        const Complex jqq = c * std::conj(phase);

        for (int i = 0; i < n; ++i) {
          const Complex mp = m(i, p);
          const Complex mq = m(i, q);
          m(i, p) = mp * jpp + mq * jqp;
          m(i, q) = mp * jpq + mq * jqq;
          const Complex vp = v(i, p);
          const Complex vq = v(i, q);
          v(i, p) = vp * jpp + vq * jqp;
          v(i, q) = vp * jpq + vq * jqq;
        }
        for (int j = 0; j < n; ++j) {
          const Complex mp = m(p, j);
          const Complex mq = m(q, j);
          m(p, j) = std::conj(jpp) * mp + std::conj(jqp) * mq;
          m(q, j) = std::conj(jpq) * mp + std::conj(jqq) * mq;
        }
        m(p, q) = 0.0;
        m(q, p) = 0.0;
        m(p, p) = m(p, p).real();
        m(q, q) = m(q, q).real();
      }
    }
  }

  Eigensystem es;
  es.values.resize(n);
  for (int i = 0; i < n; ++i) es.values(i) = m(i, i).real();
  // insertion sort keeps columns paired with their eigenvalues
  for (int i = 1; i < n; ++i) {
    for (int j = i; j > 0 && es.values(j) < es.values(j - 1); --j) {
      std::swap(es.values(j), es.values(j - 1));
      v.col(j).swap(v.col(j - 1));
    }
  }
  es.vectors = v;
  return es;
}

double trace_prod(const HermitianMatrix& a, const CMatrix& b) {
  if (b.rows() != a.dim() || b.cols() != a.dim()) {
    throw ContractViolation("trace_prod: dimension mismatch");
  }
  // Tr(a b) = sum_ij a_ij b_ji
  Complex acc = 0.0;
  const CMatrix& am = a.matrix();
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) acc += am(i, j) * b(j, i);
  return acc.real();
}

// Cholesky route, taken only when det / Tr^(M-1), a lower bound on the
// smallest eigenvalue, already clears the loading threshold; the result then
// equals the eigendecomposition route up to rounding.
static bool cholesky_inverse(const HermitianMatrix& a, PsdInverse& out) {
  const int m = a.dim();
  const double tr = a.trace();
  if (!(tr > 0.0) || !std::isfinite(tr)) return false;
  const CMatrix& am = a.matrix();
  Complex l[kMaxDim][kMaxDim];
  double inv_diag[kMaxDim];
  double det = 1.0;
  for (int j = 0; j < m; ++j) {
    double d = am(j, j).real();
    for (int k = 0; k < j; ++k) d -= std::norm(l[j][k]);
    if (!(d > 0.0)) return false;
    const double root = std::sqrt(d);
    det *= d;
    inv_diag[j] = 1.0 / root;
    l[j][j] = root;
    for (int i = j + 1; i < m; ++i) {
      Complex v = am(i, j);
      for (int k = 0; k < j; ++k) v -= l[i][k] * std::conj(l[j][k]);
      l[i][j] = v * inv_diag[j];
    }
  }
  // det / Tr^(M-1) bounds the smallest eigenvalue from below
  const double scale = std::pow(tr, m);
  if (!(scale > std::numeric_limits<double>::min()) || !std::isfinite(scale)) return false;
  if (!(det > 4.0 * kLoadingThreshold * scale) || !std::isfinite(det)) return false;
  // z = L^-1 (lower triangular), then a^-1 = z^H z
  Complex z[kMaxDim][kMaxDim] = {};
  for (int j = 0; j < m; ++j) {
    z[j][j] = inv_diag[j];
    for (int i = j + 1; i < m; ++i) {
      Complex v = 0.0;
      for (int k = j; k < i; ++k) v -= l[i][k] * z[k][j];
      z[i][j] = v * inv_diag[i];
    }
  }
  CMatrix inv(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      Complex v = 0.0;
      for (int k = j; k < m; ++k) v += std::conj(z[k][i]) * z[k][j];
      inv(i, j) = v;
      inv(j, i) = std::conj(v);
    }
    inv(i, i) = inv(i, i).real();
  }
  out.inverse = HermitianMatrix::hermitize(inv);
  out.logdet = std::log(det);
  return true;
}

HermitianMatrix inv_psd(const HermitianMatrix& a) {
  PsdInverse fast;
  if (cholesky_inverse(a, fast)) return fast.inverse;
  const Eigensystem es = eigh(a);
  const RVector loaded = loaded_spectrum(es, "inv_psd");
  return reconstruct(es.vectors, loaded.cwiseInverse());
}

double logdet_psd(const HermitianMatrix& a) {
  PsdInverse fast;
  if (cholesky_inverse(a, fast)) return fast.logdet;
  const Eigensystem es = eigh(a);
  const RVector loaded = loaded_spectrum(es, "logdet_psd");
  return loaded.array().log().sum();
}

PsdInverse inv_logdet_psd(const HermitianMatrix& a) {
  PsdInverse fast;
  if (cholesky_inverse(a, fast)) return fast;
  const Eigensystem es = eigh(a);
  const RVector loaded = loaded_spectrum(es, "inv_logdet_psd");
  return {reconstruct(es.vectors, loaded.cwiseInverse()), loaded.array().log().sum()};
}

HermitianMatrix sqrt_psd(const HermitianMatrix& a) {
  const Eigensystem es = eigh(a);
  const double largest = es.values.cwiseAbs().maxCoeff();
  RVector root(a.dim());
  for (int i = 0; i < a.dim(); ++i) {
    if (es.values(i) < -kPsdTolerance * largest) {
      throw ContractViolation("sqrt_psd: matrix is not PSD");
    }
    root(i) = std::sqrt(std::max(es.values(i), 0.0));
  }
  return reconstruct(es.vectors, root);
}

HermitianMatrix riccati_solve(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw ContractViolation("riccati_solve: dimension mismatch");
  const Eigensystem eb = eigh(b);
  if (eb.values.minCoeff() < -kPsdTolerance * eb.values.cwiseAbs().maxCoeff()) {
    throw ContractViolation("riccati_solve: b is not PSD");
  }
  const CMatrix b_clamped = reconstruct(eb.vectors, eb.values.cwiseMax(0.0)).matrix();
  const Eigensystem es = eigh(a);
  const RVector loaded = loaded_spectrum(es, "riccati_solve");
  const RVector half = loaded.cwiseSqrt();
  const CMatrix a_half = reconstruct(es.vectors, half).matrix();
  const CMatrix a_neg_half = reconstruct(es.vectors, half.cwiseInverse()).matrix();
  // A congruence of a PSD matrix; negative eigenvalues here are round-off.
  const Eigensystem inner = eigh(HermitianMatrix::hermitize(a_half * b_clamped * a_half));
  const CMatrix root = reconstruct(inner.vectors, inner.values.cwiseMax(0.0).cwiseSqrt()).matrix();
  return HermitianMatrix::hermitize(a_neg_half * root * a_neg_half);
}

double cubic_positive_root(double c3, double c2, double c0) {
  if (!(c3 > 0.0)) throw ContractViolation("cubic_positive_root: c3 must be > 0");
  if (!(c2 >= 0.0)) throw ContractViolation("cubic_positive_root: c2 must be >= 0");
  if (!(c0 <= 0.0)) throw ContractViolation("cubic_positive_root: c0 must be <= 0");
  if (c0 == 0.0) return 0.0;

  auto p = [&](double w) { return (c3 * w + c2) * w * w + c0; };
  auto dp = [&](double w) { return (3.0 * c3 * w + 2.0 * c2) * w; };

  // p is increasing and convex on w > 0 with p(0) < 0 <= p(w0).
  const double w0 = std::cbrt(-c0 / c3);
  double lo = 0.0;
  double hi = w0;
  double w = w0;
  for (int it = 0; it < 100; ++it) {
    const double fw = p(w);
    if (fw == 0.0) return w;
    if (fw > 0.0) hi = w; else lo = w;
    const double d = dp(w);
    double next = (d > 0.0) ? w - fw / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * w) {
      return next;
    }
    w = next;
  }
  // bisection fallback on a bracket that always contains the root
  lo = 0.0;
  hi = 2.0 * w0 + 1.0;
  for (int it = 0; it < 2000 && hi - lo > std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (p(mid) > 0.0) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

bool is_psd(const HermitianMatrix& a, double rel_tol) {
  const Eigensystem es = eigh(a);
  const double largest = es.values.cwiseAbs().maxCoeff();
  return es.values.minCoeff() >= -rel_tol * largest;
}

}  // namespace sbss

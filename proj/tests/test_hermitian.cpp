// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sbss/errors.hpp"
#include "sbss/hermitian.hpp"

using namespace sbss;

namespace {

HermitianMatrix diag(std::initializer_list<double> values) {
  RVector d(static_cast<int>(values.size()));
  int i = 0;
  for (double v : values) d(i++) = v;
  return HermitianMatrix::diagonal(d);
}

double asymmetry(const HermitianMatrix& h) {
  const auto& m = h.matrix();
  double worst = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
  return worst;
}

}  // namespace

TEST_CASE("trace_prod") {
  CHECK(trace_prod(HermitianMatrix::identity(2), HermitianMatrix::identity(2).matrix()) ==
        doctest::Approx(2.0));
  CHECK(trace_prod(diag({1, 3}), diag({2, 4}).matrix()) == doctest::Approx(14.0));

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 2 + trial % 3;
    const auto a = oracle::to_hermitian(oracle::random_complex(dim, dim, rng));
    const auto b = oracle::to_hermitian(oracle::random_complex(dim, dim, rng));
    CHECK(std::abs(trace_prod(a, b.matrix()) -
                   oracle::trace_of_product(oracle::dense(a), oracle::dense(b))) < 1e-12);
  }
  CHECK_THROWS_AS(trace_prod(HermitianMatrix::identity(2), HermitianMatrix::identity(3).matrix()),
                  ContractViolation);
}

TEST_CASE("from rejects non-Hermitian input") {
  CMatrix m = CMatrix::Identity(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(HermitianMatrix::from(m), ContractViolation);
  m(1, 0) = 1.0;
  CHECK_NOTHROW(HermitianMatrix::from(m));
}

TEST_CASE("inv_psd") {
  const auto i2 = inv_psd(HermitianMatrix::identity(2));
  CHECK((oracle::dense(i2) - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-14);
  const auto d = inv_psd(diag({2, 4}));
  CHECK(d(0, 0).real() == doctest::Approx(0.5));
  CHECK(d(1, 1).real() == doctest::Approx(0.25));
  CHECK(std::abs(d(0, 1)) < 1e-15);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 2 + trial % 3;
    const Eigen::MatrixXcd a = oracle::random_hpd(dim, rng);
    const auto inv = inv_psd(oracle::to_hermitian(a));
    CHECK((a * oracle::dense(inv) - Eigen::MatrixXcd::Identity(dim, dim)).norm() < 1e-8);
    CHECK(asymmetry(inv) < 1e-12);
    const auto back = inv_psd(inv);
    CHECK((oracle::dense(back) - a).norm() < 1e-7 * a.norm());
  }
  CHECK_THROWS_AS(inv_psd(HermitianMatrix(2)), SingularMatrix);
}

TEST_CASE("inv_psd loads a rank-deficient matrix") {
  CVector v(2);
  v << 1.0, Complex(0.0, 1.0);
  const auto inv = inv_psd(HermitianMatrix::outer(v));
  CHECK(std::isfinite(inv.frobenius_norm()));
}

TEST_CASE("logdet_psd") {
  CHECK(std::abs(logdet_psd(HermitianMatrix::identity(3))) < 1e-14);
  CHECK(logdet_psd(diag({std::numbers::e, std::numbers::e * std::numbers::e})) ==
        doctest::Approx(3.0).epsilon(1e-14));
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXcd a = oracle::random_hpd(2, rng);
    CHECK(std::abs(logdet_psd(oracle::to_hermitian(a)) - oracle::logdet_2x2(a)) < 1e-10);
    const auto both = inv_logdet_psd(oracle::to_hermitian(a));
    CHECK(std::abs(both.logdet - oracle::logdet_2x2(a)) < 1e-10);
  }
  CHECK_THROWS_AS(logdet_psd(diag({1, -1})), ContractViolation);
}

TEST_CASE("logdet_psd near singularity stays on the loaded path") {
  // Eigenvalues 1 and 1e-14: below the loading threshold.
  const double tiny = 1e-14;
  const double loaded = tiny + 1e-10 * (1.0 + tiny) / 2.0;
  const double expected = std::log((1.0 + 1e-10 * (1.0 + tiny) / 2.0) * loaded);
  CHECK(logdet_psd(diag({1.0, tiny})) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("eigh against the characteristic polynomial") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::MatrixXcd a = oracle::random_hpd(2, rng, 0.0);
    const auto es = eigh(oracle::to_hermitian(a));
    const auto [lo, hi] = oracle::eig_2x2(a);
    CHECK(es.values(0) == doctest::Approx(lo).epsilon(1e-10));
    CHECK(es.values(1) == doctest::Approx(hi).epsilon(1e-10));
  }
}

TEST_CASE("sqrt_psd") {
  const auto s = sqrt_psd(diag({4, 9}));
  CHECK(s(0, 0).real() == doctest::Approx(2.0));
  CHECK(s(1, 1).real() == doctest::Approx(3.0));
  CHECK((oracle::dense(sqrt_psd(HermitianMatrix::identity(2))) - Eigen::MatrixXcd::Identity(2, 2))
            .norm() < 1e-14);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 2 + trial % 3;
    const Eigen::MatrixXcd a = oracle::random_hpd(dim, rng);
    const Eigen::MatrixXcd r = oracle::dense(sqrt_psd(oracle::to_hermitian(a)));
    CHECK((r * r - a).norm() < 1e-8 * a.norm());
  }
}

TEST_CASE("riccati_solve") {
  const auto id = riccati_solve(HermitianMatrix::identity(2), HermitianMatrix::identity(2));
  CHECK((oracle::dense(id) - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-12);
  const auto r = riccati_solve(HermitianMatrix::identity(2), diag({4, 9}));
  CHECK(r(0, 0).real() == doctest::Approx(2.0));
  CHECK(r(1, 1).real() == doctest::Approx(3.0));

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 2 + trial % 3;
    const Eigen::MatrixXcd a = oracle::random_hpd(dim, rng);
    const Eigen::MatrixXcd b = oracle::random_hpd(dim, rng);
    const auto sol = riccati_solve(oracle::to_hermitian(a), oracle::to_hermitian(b));
    const Eigen::MatrixXcd rr = oracle::dense(sol);
    CHECK((rr * a * rr - b).norm() < 1e-8 * b.norm());
    CHECK(is_psd(sol));
    CHECK(asymmetry(sol) < 1e-12);
  }
  CHECK_THROWS_AS(riccati_solve(HermitianMatrix::identity(2), diag({1, -1})), ContractViolation);
}

TEST_CASE("riccati_solve tolerates round-off in b under an ill-conditioned a") {
  // b is PSD up to a -1e-12 relative eigenvalue that a^{1/2} b a^{1/2} scales up by cond(a).
  const auto sol = riccati_solve(diag({1e4, 1e-4}), diag({-1e-12, 1.0}));
  CHECK(is_psd(sol));
  CHECK(sol(0, 0).real() == doctest::Approx(0.0));
  CHECK(sol(1, 1).real() == doctest::Approx(100.0));
}

TEST_CASE("cubic_positive_root") {
  CHECK(cubic_positive_root(2, 0, -16) == doctest::Approx(2.0));
  CHECK(cubic_positive_root(1, 1, 0) == 0.0);
  const double w = cubic_positive_root(2, 3, -5);
  CHECK(std::abs(2 * w * w * w + 3 * w * w - 5) < 1e-9);

  double prev = 0.0;
  for (double c0 = 0.01; c0 < 1e4; c0 *= 1.7) {
    const double root = cubic_positive_root(1.5, 0.7, -c0);
    CHECK(root > prev);
    prev = root;
  }
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double c3 = 0.01 + 10 * u(rng), c2 = std::pow(10.0, 8 * u(rng) - 4),
                 c0 = -std::pow(10.0, 8 * u(rng) - 4);
    const double x = cubic_positive_root(c3, c2, c0);
    CHECK(x >= 0.0);
    const double scale = c3 * x * x * x + c2 * x * x + std::abs(c0);
    CHECK(std::abs(c3 * x * x * x + c2 * x * x + c0) < 1e-12 * scale);
  }
  CHECK_THROWS_AS(cubic_positive_root(0, 1, -1), ContractViolation);
}

TEST_CASE("arithmetic keeps exact Hermitian symmetry") {
  std::mt19937_64 rng(6);
  auto a = oracle::to_hermitian(oracle::random_hpd(3, rng));
  const auto b = oracle::to_hermitian(oracle::random_hpd(3, rng));
  a.add_scaled(0.3, b);
  a *= 1.7;
  CHECK(asymmetry(a) < 1e-12);
  CHECK(asymmetry(a + b) < 1e-12);
  CHECK(a.trace() == doctest::Approx(oracle::dense(a).trace().real()));
}

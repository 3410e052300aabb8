// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sbss/source_model.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include "sbss/errors.hpp"

namespace sbss {

void SourceFactors::clamp() {
  for (auto& w : W) w = w.cwiseMax(kFactorFloor);
  for (auto& h : H) h = h.cwiseMax(kFactorFloor);
}

SparsePrior SparsePrior::uniform(const SourceFactors& shape, double mu, double rho,
                                 double bingham_weight) {
  if (mu < 0.0 || rho < 0.0) throw ContractViolation("mu and rho must be nonnegative");
  SparsePrior p;
  p.bingham_weight = bingham_weight;
  for (int n = 0; n < shape.sources(); ++n) {
    p.mu.push_back(Eigen::VectorXd::Constant(shape.bases(n), mu));
    p.rho.push_back(Eigen::VectorXd::Constant(shape.bases(n), rho));
  }
  return p;
}

double SparsePrior::rho_total() const {
  double s = 0.0;
  for (const auto& r : rho) s += r.sum();
  return s;
}

double lambda(const SourceFactors& factors, int n, int f, int t) {
  const double v = factors.W[n].row(f).dot(factors.H[n].col(t));
  return std::max(v, kFactorFloor);
}

Eigen::MatrixXd lambda(const SourceFactors& factors, int n) {
  Eigen::MatrixXd l = factors.W[n] * factors.H[n];
  return l.cwiseMax(kFactorFloor);
}

double prior_penalty(const SourceFactors& factors, const SparsePrior& prior) {
  if (static_cast<int>(prior.mu.size()) != factors.sources() ||
      static_cast<int>(prior.rho.size()) != factors.sources()) {
    throw ContractViolation("prior and factors disagree on the number of sources");
  }
  double laplace = 0.0;
  double bingham = 0.0;
  for (int n = 0; n < factors.sources(); ++n) {
    if (prior.mu[n].size() != factors.bases(n) || prior.rho[n].size() != factors.bases(n)) {
      throw ContractViolation("prior and factors disagree on the number of bases");
    }
    laplace += prior.mu[n].dot(factors.H[n].cwiseAbs().rowwise().sum());
    bingham += factors.W[n].squaredNorm();
  }
  return laplace + prior.bingham_weight * bingham - prior.rho_total();
}

double sparsity_fraction(const Eigen::MatrixXd& h) {
  if (h.size() == 0) return 1.0;
  const double threshold = 1e-6 * h.maxCoeff();
  const auto count = (h.array() <= threshold).count();
  return static_cast<double>(count) / static_cast<double>(h.size());
}

SourceFactors init_factors(int bins, int frames, const std::vector<int>& bases,
                           std::uint64_t seed) {
  if (bins < 1 || frames < 1) throw ContractViolation("init_factors: empty shape");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  SourceFactors f;
  for (int k : bases) {
    if (k < 1) throw ContractViolation("init_factors: each source needs at least one basis");
    Eigen::MatrixXd w(bins, k), h(k, frames);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(gen);
    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = u(gen);
    f.W.push_back(std::move(w));
    f.H.push_back(std::move(h));
  }
  return f;
}

namespace {

void write_matrix(std::ostream& out, const char* tag, const Eigen::MatrixXd& m) {
  out << tag << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? " " : "") << m(i, j);
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix(std::istream& in, const std::string& tag) {
  std::string got;
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> got >> rows >> cols) || got != tag || rows < 0 || cols < 0) {
    throw IoError("factor dump: expected '" + tag + " <rows> <cols>'");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!(in >> m(i, j))) throw IoError("factor dump: truncated " + tag + " matrix");
  return m;
}

}  // namespace

void write_factors(std::ostream& out, const SourceFactors& factors) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "sbss-factors 1\nsources " << factors.sources() << '\n';
  for (int n = 0; n < factors.sources(); ++n) {
    write_matrix(out, "W", factors.W[n]);
    write_matrix(out, "H", factors.H[n]);
  }
  out.precision(old_precision);
}

SourceFactors read_factors(std::istream& in) {
  std::string magic, key;
  int version = 0, n = 0;
  if (!(in >> magic >> version) || magic != "sbss-factors" || version != 1) {
    throw IoError("factor dump: bad header");
  }
  if (!(in >> key >> n) || key != "sources" || n < 0) {
    throw IoError("factor dump: missing source count");
  }
  SourceFactors f;
  for (int i = 0; i < n; ++i) {
    f.W.push_back(read_matrix(in, "W"));
    f.H.push_back(read_matrix(in, "H"));
    if (f.W.back().cols() != f.H.back().rows()) {
      throw IoError("factor dump: W and H disagree on the number of bases");
    }
  }
  return f;
}

}  // namespace sbss

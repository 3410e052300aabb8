// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Serial, unregularized ILRMA and MNMF written with plain loops and Eigen's
// general-purpose dense solvers. They share nothing with the engines except
// the initializers, and serve as oracles for the parallel sparse engines.

#ifndef SBSS_REFERENCE_HPP_
#define SBSS_REFERENCE_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sbss/signal.hpp"

namespace sbss::reference {

class PlainIlrma {
 public:
  PlainIlrma(const Spectrogram& x, int bases, std::uint64_t seed);

  void iterate();
  double cost() const;

  const std::vector<Eigen::MatrixXd>& bases() const { return w_; }
  const std::vector<Eigen::MatrixXd>& activations() const { return h_; }
  const std::vector<Eigen::MatrixXcd>& demixing() const { return d_; }

 private:
  void model(int n);
  void output();

  const Spectrogram& x_;
  int m_, bins_, frames_;
  std::vector<Eigen::MatrixXd> w_, h_, lambda_, power_;
  std::vector<Eigen::MatrixXcd> d_;
};

class PlainMnmf {
 public:
  PlainMnmf(const Spectrogram& x, int sources, int bases, std::uint64_t seed);

  void iterate();
  double cost() const;

  const std::vector<Eigen::MatrixXd>& bases() const { return w_; }
  const std::vector<Eigen::MatrixXd>& activations() const { return h_; }
  /// [f][n]
  const std::vector<std::vector<Eigen::MatrixXcd>>& scms() const { return r_; }

 private:
  void model(int n);
  void traces();
  Eigen::MatrixXcd covariance(int f, int t) const;

  const Spectrogram& x_;
  int m_, n_, bins_, frames_;
  std::vector<Eigen::MatrixXd> w_, h_, lambda_, tr_inv_, tr_fit_;
  std::vector<std::vector<Eigen::MatrixXcd>> r_;
};

}  // namespace sbss::reference

#endif  // SBSS_REFERENCE_HPP_

// Copyright 2026 The cvmdi Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Shared test helpers: random Gaussian states and an eigensolver oracle for
// symplectic spectra that does not go through the library's Cholesky route.

#ifndef CVMDI_TESTS_TEST_SUPPORT_HPP
#define CVMDI_TESTS_TEST_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cvmdi/gaussian.hpp"

namespace cvmdi::testing {

/// |eigenvalues of i Omega sigma| via the general (non-symmetric) solver,
/// one per conjugate pair, descending.
inline std::vector<double> oracle_symplectic_eigenvalues(
    const Eigen::MatrixXd& sigma) {
  const int n = static_cast<int>(sigma.rows() / 2);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(symplectic_form(n) * sigma);
  std::vector<double> mags;
  for (int k = 0; k < 2 * n; ++k) mags.push_back(std::abs(solver.eigenvalues()(k)));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  std::vector<double> nu;
  for (int k = 0; k < n; ++k) nu.push_back(0.5 * (mags[2 * k] + mags[2 * k + 1]));
  return nu;
}

inline Eigen::MatrixXd single_mode_symplectic(int n_modes, int mode, double r,
                                              double phi) {
  Eigen::Matrix2d rot;
  rot << std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi);
  Eigen::Matrix2d sq = Eigen::Vector2d(std::exp(r), std::exp(-r)).asDiagonal();
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  s.block<2, 2>(2 * mode, 2 * mode) = rot * sq;
  return s;
}

/// Random symplectic built from squeezers, rotations and beamsplitters.
inline Eigen::MatrixXd random_symplectic(int n_modes, std::mt19937_64& rng,
                                         double max_squeeze = 1.0) {
  std::uniform_real_distribution<double> r(-max_squeeze, max_squeeze);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  for (int layer = 0; layer < 3; ++layer) {
    for (int m = 0; m < n_modes; ++m) {
      s = single_mode_symplectic(n_modes, m, r(rng), phase(rng)) * s;
    }
    for (int i = 0; i + 1 < n_modes; ++i) {
      s = embed_two_mode(beamsplitter_symplectic(unit(rng)), n_modes, i, i + 1) * s;
    }
  }
  return s;
}

/// Random physical CM: S diag(nu_k I) S^T with nu_k in [1, max_nu].
inline CovarianceMatrix random_physical_cm(int n_modes, std::mt19937_64& rng,
                                           double max_nu = 5.0) {
  std::uniform_real_distribution<double> nu(1.0, max_nu);
  Eigen::VectorXd diag(2 * n_modes);
  for (int k = 0; k < n_modes; ++k) diag(2 * k) = diag(2 * k + 1) = nu(rng);
  const Eigen::MatrixXd s = random_symplectic(n_modes, rng);
  return CovarianceMatrix(s * diag.asDiagonal() * s.transpose());
}

}  // namespace cvmdi::testing

#endif  // CVMDI_TESTS_TEST_SUPPORT_HPP

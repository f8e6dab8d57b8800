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

// Gaussian-state linear algebra in shot-noise units (vacuum variance 1) with
// quadratures ordered (q1, p1, q2, p2, ...).

#ifndef CVMDI_GAUSSIAN_HPP
#define CVMDI_GAUSSIAN_HPP

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/SVD>

#include "cvmdi/errors.hpp"

namespace cvmdi {

inline constexpr double kDefaultTolerance = 1e-9;

enum class Quadrature { Q, P };

/// Real symmetric 2N x 2N second-moment matrix of an N-mode Gaussian state.
///
/// Construction checks shape and symmetry (relative to the largest entry) and
/// then stores the exactly symmetrized matrix. Physicality is not enforced
/// here; use is_physical().
class CovarianceMatrix {
 public:
  CovarianceMatrix() = default;

  explicit CovarianceMatrix(const Eigen::MatrixXd& entries,
                            double tol = kDefaultTolerance) {
    detail::require(entries.rows() == entries.cols(),
                    "covariance matrix must be square");
    detail::require(entries.rows() > 0 && entries.rows() % 2 == 0,
                    "covariance matrix dimension must be even and positive");
    detail::require(entries.allFinite(),
                    "covariance matrix has non-finite entries");
    const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
    const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol * scale) {
      std::ostringstream msg;
      msg << "covariance matrix is not symmetric (max asymmetry " << asym
          << ")";
      throw ValidationError(msg.str());
    }
    entries_ = 0.5 * (entries + entries.transpose());
  }

  static CovarianceMatrix identity(int n_modes) {
    detail::require(n_modes > 0, "n_modes must be positive");
    return CovarianceMatrix(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
  }

  int n_modes() const { return static_cast<int>(entries_.rows() / 2); }
  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  double operator()(int row, int col) const { return entries_(row, col); }

  /// 2x2 block coupling modes i and j.
  Eigen::Matrix2d block(int i, int j) const {
    return entries_.block<2, 2>(2 * i, 2 * j);
  }

  /// S sigma S^T.
  CovarianceMatrix transformed(const Eigen::MatrixXd& symplectic) const {
    detail::require(symplectic.rows() == dim() && symplectic.cols() == dim(),
                    "transformation dimension does not match covariance matrix");
    return CovarianceMatrix(symplectic * entries_ * symplectic.transpose());
  }

  /// Reduced state of the listed modes, in the listed order (partial trace).
  CovarianceMatrix reduced(const std::vector<int>& modes) const {
    detail::require(!modes.empty(), "reduced state needs at least one mode");
    const int k = static_cast<int>(modes.size());
    Eigen::MatrixXd out(2 * k, 2 * k);
    for (int a = 0; a < k; ++a) {
      detail::require(modes[a] >= 0 && modes[a] < n_modes(),
                      "mode index out of range");
      for (int b = 0; b < k; ++b) {
        out.block<2, 2>(2 * a, 2 * b) = block(modes[a], modes[b]);
      }
    }
    return CovarianceMatrix(out);
  }

  static CovarianceMatrix direct_sum(
      std::initializer_list<CovarianceMatrix> parts) {
    int total = 0;
    for (const auto& part : parts) total += part.dim();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(total, total);
    int offset = 0;
    for (const auto& part : parts) {
      out.block(offset, offset, part.dim(), part.dim()) = part.matrix();
      offset += part.dim();
    }
    return CovarianceMatrix(out);
  }

 private:
  Eigen::MatrixXd entries_;
};

/// Shared post-relay state of Alice's and Bob's retained modes (a, b).
using ConditionalCM = CovarianceMatrix;

/// Block-diagonal symplectic form with 2x2 blocks [[0, 1], [-1, 0]].
inline Eigen::MatrixXd symplectic_form(int n_modes) {
  detail::require(n_modes > 0, "n_modes must be positive");
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

namespace detail {

// Descending symplectic spectrum, or false if sigma is not positive definite.
// With sigma = L L^T, the antisymmetric matrix L^T Omega L is similar to
// Omega sigma, so its singular values are the nu_k, each appearing twice.
inline bool try_symplectic_eigenvalues(const Eigen::MatrixXd& sigma,
                                       std::vector<double>& out) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) return false;
  const Eigen::MatrixXd lower = llt.matrixL();
  const int n = static_cast<int>(sigma.rows() / 2);
  const Eigen::MatrixXd antisym =
      lower.transpose() * symplectic_form(n) * lower;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(antisym);
  const Eigen::VectorXd& s = svd.singularValues();
  out.resize(n);
  for (int k = 0; k < n; ++k) out[k] = 0.5 * (s(2 * k) + s(2 * k + 1));
  return true;
}

// Rounding the entries of sigma by eps moves nu^2 by about eps * |sigma|^2,
// so near-pure states with large entries (e.g. TMSV at mu = 1e4) need the
// caller's tolerance widened by that much.
inline double physical_tolerance(const Eigen::MatrixXd& sigma, double tol) {
  const double norm = sigma.cwiseAbs().rowwise().sum().maxCoeff();
  return tol + 16.0 * std::numeric_limits<double>::epsilon() * norm * norm;
}

inline double min_eigenvalue(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym,
                                                       Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace detail

/// Williamson eigenvalues of a positive-definite CM, in descending order.
inline std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& cm) {
  std::vector<double> nu;
  if (!detail::try_symplectic_eigenvalues(cm.matrix(), nu)) {
    std::ostringstream msg;
    msg << "covariance matrix is not positive definite (min eigenvalue "
        << detail::min_eigenvalue(cm.matrix()) << ")";
    throw ValidationError(msg.str());
  }
  return nu;
}

/// True iff every symplectic eigenvalue is at least 1 - tol, which is
/// equivalent to sigma + i Omega >= 0. tol is widened by the rounding floor
/// of the matrix entries.
inline bool is_physical(const CovarianceMatrix& cm,
                        double tol = kDefaultTolerance) {
  std::vector<double> nu;
  if (!detail::try_symplectic_eigenvalues(cm.matrix(), nu)) return false;
  return nu.back() >= 1.0 - detail::physical_tolerance(cm.matrix(), tol);
}

enum class Separability { Separable, Entangled };

/// Partial transpose of the last mode (p -> -p).
inline CovarianceMatrix partial_transpose(const CovarianceMatrix& cm) {
  Eigen::VectorXd flip = Eigen::VectorXd::Ones(cm.dim());
  flip(cm.dim() - 1) = -1.0;
  return cm.transformed(flip.asDiagonal().toDenseMatrix());
}

/// PPT criterion, exact for two-mode Gaussian states. A transposed spectrum
/// touching 1 within tol counts as separable.
inline Separability ppt_separability(const CovarianceMatrix& cm,
                                     double tol = kDefaultTolerance) {
  detail::require(cm.n_modes() == 2, "PPT test requires exactly two modes");
  detail::require(is_physical(cm, tol),
                  "PPT test requires a physical covariance matrix");
  const auto nu = symplectic_eigenvalues(partial_transpose(cm));
  return nu.back() < 1.0 - detail::physical_tolerance(cm.matrix(), tol)
             ? Separability::Entangled
             : Separability::Separable;
}

/// Conditional CM of the remaining modes after homodyning one quadrature of
/// `mode`. Gaussian conditioning does not depend on the outcome value, so no
/// outcome is taken. A measured variance below tol is treated as zero and
/// its pseudo-inverse vanishes.
inline CovarianceMatrix homodyne_condition(const CovarianceMatrix& cm, int mode,
                                           Quadrature quadrature,
                                           double tol = kDefaultTolerance) {
  detail::require(mode >= 0 && mode < cm.n_modes(),
                  "homodyne mode index out of range");
  detail::require(cm.n_modes() >= 2,
                  "homodyne conditioning needs at least one unmeasured mode");
  std::vector<int> rest;
  for (int k = 0; k < cm.n_modes(); ++k) {
    if (k != mode) rest.push_back(k);
  }
  const int measured = 2 * mode + (quadrature == Quadrature::Q ? 0 : 1);
  const int r = static_cast<int>(rest.size());
  Eigen::MatrixXd a(2 * r, 2 * r);
  Eigen::VectorXd c(2 * r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      a.block<2, 2>(2 * i, 2 * j) = cm.block(rest[i], rest[j]);
    }
    c.segment<2>(2 * i) = cm.matrix().block<2, 1>(2 * rest[i], measured);
  }
  const double variance = cm(measured, measured);
  if (variance >= tol) a -= c * c.transpose() / variance;
  return CovarianceMatrix(a);
}

/// Conditional CM of the remaining modes after heterodyning `mode`:
/// A - C (B + I)^-1 C^T.
inline CovarianceMatrix heterodyne_condition(const CovarianceMatrix& cm,
                                             int mode) {
  detail::require(mode >= 0 && mode < cm.n_modes(),
                  "heterodyne mode index out of range");
  detail::require(cm.n_modes() >= 2,
                  "heterodyne conditioning needs at least one unmeasured mode");
  std::vector<int> rest;
  for (int k = 0; k < cm.n_modes(); ++k) {
    if (k != mode) rest.push_back(k);
  }
  const int r = static_cast<int>(rest.size());
  Eigen::MatrixXd a(2 * r, 2 * r);
  Eigen::MatrixXd c(2 * r, 2);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      a.block<2, 2>(2 * i, 2 * j) = cm.block(rest[i], rest[j]);
    }
    c.block<2, 2>(2 * i, 0) = cm.block(rest[i], mode);
  }
  const Eigen::Matrix2d smeared =
      cm.block(mode, mode) + Eigen::Matrix2d::Identity();
  return CovarianceMatrix(a - c * smeared.inverse() * c.transpose());
}

/// Two-mode beamsplitter of transmissivity tau:
/// out1 = sqrt(tau) in1 + sqrt(1-tau) in2, out2 = -sqrt(1-tau) in1 + sqrt(tau) in2.
inline Eigen::Matrix4d beamsplitter_symplectic(double tau) {
  detail::require(std::isfinite(tau) && tau >= 0.0 && tau <= 1.0,
                  "beamsplitter transmissivity must lie in [0, 1]");
  const double t = std::sqrt(tau);
  const double r = std::sqrt(1.0 - tau);
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  s.block<2, 2>(0, 0) = t * Eigen::Matrix2d::Identity();
  s.block<2, 2>(0, 2) = r * Eigen::Matrix2d::Identity();
  s.block<2, 2>(2, 0) = -r * Eigen::Matrix2d::Identity();
  s.block<2, 2>(2, 2) = t * Eigen::Matrix2d::Identity();
  return s;
}

/// Lifts a two-mode symplectic onto modes (i, j) of an n-mode system.
inline Eigen::MatrixXd embed_two_mode(const Eigen::Matrix4d& s, int n_modes,
                                      int i, int j) {
  detail::require(i >= 0 && j >= 0 && i < n_modes && j < n_modes && i != j,
                  "invalid mode pair for two-mode operation");
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  const int idx[2] = {i, j};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      out.block<2, 2>(2 * idx[a], 2 * idx[b]) = s.block<2, 2>(2 * a, 2 * b);
    }
  }
  return out;
}

inline CovarianceMatrix thermal_cm(double omega) {
  detail::require(std::isfinite(omega) && omega >= 1.0,
                  "thermal variance must be >= 1");
  return CovarianceMatrix(omega * Eigen::MatrixXd::Identity(2, 2));
}

/// Two-mode squeezed vacuum of variance mu.
inline CovarianceMatrix tmsv_cm(double mu) {
  detail::require(std::isfinite(mu) && mu >= 1.0, "TMSV variance must be >= 1");
  const double c = std::sqrt(mu * mu - 1.0);
  Eigen::MatrixXd m = mu * Eigen::MatrixXd::Identity(4, 4);
  m(0, 2) = m(2, 0) = c;
  m(1, 3) = m(3, 1) = -c;
  return CovarianceMatrix(m);
}

/// Bosonic entropy function in bits. Values in [1 - tol, 1] clamp to 1.
inline double entropy_g(double nu, double tol = kDefaultTolerance) {
  if (!(nu >= 1.0 - tol)) {
    std::ostringstream msg;
    msg << "entropy_g requires nu >= 1, got " << nu;
    throw ValidationError(msg.str());
  }
  if (nu <= 1.0) return 0.0;
  const double plus = 0.5 * (nu + 1.0);
  const double minus = 0.5 * (nu - 1.0);
  return plus * std::log2(plus) - minus * std::log2(minus);
}

inline double von_neumann_entropy(const CovarianceMatrix& cm,
                                  double tol = kDefaultTolerance) {
  detail::require(is_physical(cm, tol),
                  "entropy requires a physical covariance matrix");
  double s = 0.0;
  for (double nu : symplectic_eigenvalues(cm)) s += entropy_g(std::max(nu, 1.0));
  return s;
}

}  // namespace cvmdi

#endif  // CVMDI_GAUSSIAN_HPP

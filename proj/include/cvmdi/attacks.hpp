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

#ifndef CVMDI_ATTACKS_HPP
#define CVMDI_ATTACKS_HPP

#include <cmath>
#include <sstream>
#include <string_view>

#include "cvmdi/gaussian.hpp"

namespace cvmdi {

inline constexpr double kOneModeTolerance = 1e-12;

/// Eve's ancillas E1, E2 in a correlated thermal state with normal-form CM
///   [[omega_a I, G], [G, omega_b I]],  G = diag(g, g_prime).
/// One-mode (entangling-cloner) attacks are the members with g = g' = 0.
struct TwoModeAttack {
  double omega_a = 1.0;
  double omega_b = 1.0;
  double g = 0.0;
  double g_prime = 0.0;

  static TwoModeAttack one_mode(double omega_a, double omega_b) {
    return {omega_a, omega_b, 0.0, 0.0};
  }
  /// omega_a = omega_b = omega, g' = -g.
  static TwoModeAttack symmetric(double omega, double g) {
    return {omega, omega, g, -g};
  }
};

/// One-mode attack with independent squeezed thermal ancillas.
struct SqueezedOneModeAttack {
  double omega_a_q = 1.0;
  double omega_a_p = 1.0;
  double omega_b_q = 1.0;
  double omega_b_p = 1.0;
};

/// The combinations through which an attack enters the shared CM.
struct NoiseAggregates {
  double x = 1.0;
  double x_prime = 1.0;
};

namespace detail {

inline CovarianceMatrix raw_attack_cm(const TwoModeAttack& attack) {
  require(std::isfinite(attack.omega_a) && std::isfinite(attack.omega_b) &&
              std::isfinite(attack.g) && std::isfinite(attack.g_prime),
          "attack parameters must be finite");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m(0, 0) = m(1, 1) = attack.omega_a;
  m(2, 2) = m(3, 3) = attack.omega_b;
  m(0, 2) = m(2, 0) = attack.g;
  m(1, 3) = m(3, 1) = attack.g_prime;
  return CovarianceMatrix(m);
}

}  // namespace detail

/// Normal-form CM of the attack; rejects unphysical parameter sets and
/// reports the violating symplectic eigenvalue.
inline CovarianceMatrix attack_cm(const TwoModeAttack& attack,
                                  double tol = kDefaultTolerance) {
  CovarianceMatrix cm = detail::raw_attack_cm(attack);
  std::vector<double> nu;
  std::ostringstream msg;
  msg << "unphysical attack (omega_a=" << attack.omega_a
      << ", omega_b=" << attack.omega_b << ", g=" << attack.g
      << ", g'=" << attack.g_prime << "): ";
  if (!detail::try_symplectic_eigenvalues(cm.matrix(), nu)) {
    msg << "CM not positive definite (min eigenvalue "
        << detail::min_eigenvalue(cm.matrix()) << ")";
    throw ValidationError(msg.str());
  }
  if (nu.back() < 1.0 - detail::physical_tolerance(cm.matrix(), tol)) {
    msg << "symplectic eigenvalue " << nu.back() << " < 1";
    throw ValidationError(msg.str());
  }
  return cm;
}

inline NoiseAggregates noise_aggregates(const TwoModeAttack& attack) {
  const double mean = 0.5 * (attack.omega_a + attack.omega_b);
  return {mean - attack.g, mean + attack.g_prime};
}

inline NoiseAggregates squeezed_aggregates(const SqueezedOneModeAttack& attack,
                                           double tol = kDefaultTolerance) {
  detail::require(attack.omega_a_q > 0.0 && attack.omega_a_p > 0.0 &&
                      attack.omega_b_q > 0.0 && attack.omega_b_p > 0.0,
                  "squeezed variances must be positive");
  detail::require(attack.omega_a_q * attack.omega_a_p >= 1.0 - tol &&
                      attack.omega_b_q * attack.omega_b_p >= 1.0 - tol,
                  "squeezed ancilla violates the uncertainty product");
  return {0.5 * (attack.omega_a_q + attack.omega_b_q),
          0.5 * (attack.omega_a_p + attack.omega_b_p)};
}

enum class AttackClass { OneMode, SeparableTwoMode, EntangledTwoMode, Unphysical };

inline std::string_view to_string(AttackClass c) {
  switch (c) {
    case AttackClass::OneMode: return "one_mode";
    case AttackClass::SeparableTwoMode: return "separable_two_mode";
    case AttackClass::EntangledTwoMode: return "entangled_two_mode";
    case AttackClass::Unphysical: return "unphysical";
  }
  return "unknown";
}

inline AttackClass classify_attack(const TwoModeAttack& attack,
                                   double one_mode_tol = kOneModeTolerance,
                                   double physical_tol = kDefaultTolerance) {
  const CovarianceMatrix cm = detail::raw_attack_cm(attack);
  if (!is_physical(cm, physical_tol)) return AttackClass::Unphysical;
  if (std::abs(attack.g) <= one_mode_tol &&
      std::abs(attack.g_prime) <= one_mode_tol) {
    return AttackClass::OneMode;
  }
  return ppt_separability(cm, physical_tol) == Separability::Entangled
             ? AttackClass::EntangledTwoMode
             : AttackClass::SeparableTwoMode;
}

/// Half-open interval (lower, upper].
struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  bool empty() const { return !(upper > lower); }
  bool contains(double v) const { return v > lower && v <= upper; }
  double midpoint() const { return 0.5 * (lower + upper); }
};

/// Correlations g (with g' = -g, omega_a = omega_b = omega) for which the
/// ancillas are entangled yet physical: (omega - 1, sqrt(omega^2 - 1)].
inline Interval entangled_band(double omega) {
  detail::require(std::isfinite(omega) && omega >= 1.0,
                  "entangled band requires omega >= 1");
  return {omega - 1.0, std::sqrt(omega * omega - 1.0)};
}

}  // namespace cvmdi

#endif  // CVMDI_ATTACKS_HPP

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

// Asymptotic key rate R = xi * I - chi from the shared CM of (a, b), with
// Eve holding the purification of the shared state. Both parties heterodyne.

#ifndef CVMDI_KEYRATE_HPP
#define CVMDI_KEYRATE_HPP

#include <cmath>
#include <sstream>
#include <string_view>

#include "cvmdi/gaussian.hpp"

namespace cvmdi {

/// Whose heterodyne outcome is the key reference.
///   DirectOnBob:    Alice's variable is the reference; Bob decodes onto it.
///   ReverseOnAlice: Bob's variable is the reference; Alice decodes onto it.
enum class Reconciliation { DirectOnBob, ReverseOnAlice };

enum class Detection { Heterodyne };

inline std::string_view to_string(Reconciliation r) {
  return r == Reconciliation::DirectOnBob ? "direct" : "reverse";
}

struct RateConfig {
  double efficiency = 1.0;  // reconciliation efficiency xi
  Reconciliation direction = Reconciliation::DirectOnBob;
  Detection detection = Detection::Heterodyne;

  void validate() const {
    detail::require(std::isfinite(efficiency) && efficiency > 0.0 &&
                        efficiency <= 1.0,
                    "reconciliation efficiency must lie in (0, 1]");
  }
};

struct RateResult {
  double mutual_information = 0.0;  // bits per use
  double holevo = 0.0;              // bits per use
  double rate = 0.0;                // may be negative
};

namespace detail {

inline void require_shared_state(const ConditionalCM& cm, double tol) {
  require(cm.n_modes() == 2, "shared CM must have exactly two modes");
  require(is_physical(cm, tol), "shared CM is unphysical");
}

}  // namespace detail

/// Shannon information between the two heterodyne outcomes,
/// 1/2 log2(det(A+I) det(B+I) / det(sigma + I)). When q and p decouple this
/// is the sum of the per-quadrature terms.
inline double mutual_information(const ConditionalCM& cm,
                                 const RateConfig& config = {},
                                 double tol = kDefaultTolerance) {
  config.validate();
  detail::require_shared_state(cm, tol);
  const Eigen::Matrix4d smeared = cm.matrix() + Eigen::Matrix4d::Identity();
  const double det_a = smeared.block<2, 2>(0, 0).determinant();
  const double det_b = smeared.block<2, 2>(2, 2).determinant();
  const double det_ab = smeared.determinant();
  return std::max(0.0, 0.5 * std::log2(det_a * det_b / det_ab));
}

/// Holevo information of Eve on the reference variable:
/// S(ab) - S(decoder | reference heterodyne). Tiny negative round-off clamps
/// to zero; anything larger is an internal error.
inline double holevo_bound(const ConditionalCM& cm,
                           const RateConfig& config = {},
                           double tol = kDefaultTolerance) {
  config.validate();
  detail::require_shared_state(cm, tol);
  const int reference =
      config.direction == Reconciliation::DirectOnBob ? 0 : 1;
  const double joint = von_neumann_entropy(cm, tol);
  const double conditional =
      von_neumann_entropy(heterodyne_condition(cm, reference), tol);
  const double chi = joint - conditional;
  if (chi < -std::sqrt(tol)) {
    std::ostringstream msg;
    msg << "negative Holevo information " << chi;
    throw ConsistencyError(msg.str());
  }
  return std::max(0.0, chi);
}

inline RateResult key_rate(const ConditionalCM& cm,
                           const RateConfig& config = {},
                           double tol = kDefaultTolerance) {
  RateResult r;
  r.mutual_information = mutual_information(cm, config, tol);
  r.holevo = holevo_bound(cm, config, tol);
  r.rate = config.efficiency * r.mutual_information - r.holevo;
  return r;
}

}  // namespace cvmdi

#endif  // CVMDI_KEYRATE_HPP

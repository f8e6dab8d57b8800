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

// Entanglement-based model of the coherent-state MDI protocol: two TMSV
// sources, two lossy links attacked by a correlated pair of ancillas, and a
// CV Bell detection at the relay.

#ifndef CVMDI_PROTOCOL_HPP
#define CVMDI_PROTOCOL_HPP

#include <cmath>

#include "cvmdi/attacks.hpp"
#include "cvmdi/gaussian.hpp"

namespace cvmdi {

struct ProtocolParams {
  double mu = 1.0;     // EB source variance; PM modulation variance is mu - 1
  double tau_a = 1.0;  // Alice-relay transmissivity
  double tau_b = 1.0;  // Bob-relay transmissivity

  static ProtocolParams symmetric(double mu, double tau) {
    return {mu, tau, tau};
  }
  bool is_symmetric() const { return tau_a == tau_b; }

  void validate() const {
    detail::require(std::isfinite(mu) && mu >= 1.0, "mu must be >= 1");
    detail::require(std::isfinite(tau_a) && tau_a >= 0.0 && tau_a <= 1.0,
                    "tau_a must lie in [0, 1]");
    detail::require(std::isfinite(tau_b) && tau_b >= 0.0 && tau_b <= 1.0,
                    "tau_b must lie in [0, 1]");
  }
};

struct ThetaParams {
  double theta = 0.0;
  double theta_prime = 0.0;
};

inline ThetaParams theta_params(double mu, double tau,
                                const NoiseAggregates& agg) {
  return {2.0 * (tau * mu + (1.0 - tau) * agg.x),
          2.0 * (tau * mu + (1.0 - tau) * agg.x_prime)};
}

/// Closed-form shared CM for the symmetric configuration tau_a = tau_b.
inline ConditionalCM conditional_cm_analytic(const ProtocolParams& params,
                                             const TwoModeAttack& attack) {
  params.validate();
  detail::require(params.is_symmetric(),
                  "closed-form conditional CM needs tau_a == tau_b; use "
                  "conditional_cm_numeric for asymmetric links");
  attack_cm(attack);
  const double mu = params.mu;
  const double tau = params.tau_a;
  const auto th = theta_params(mu, tau, noise_aggregates(attack));
  const double pre = (mu * mu - 1.0) * tau;
  // Zero prefactor short-circuits the 0/0 that theta would hit at tau = 0
  // with a vanishing x.
  const double iq = pre == 0.0 ? 0.0 : pre / th.theta;
  const double ip = pre == 0.0 ? 0.0 : pre / th.theta_prime;

  Eigen::MatrixXd m = mu * Eigen::MatrixXd::Identity(4, 4);
  m(0, 0) -= iq;
  m(2, 2) -= iq;
  m(0, 2) = m(2, 0) = iq;
  m(1, 1) -= ip;
  m(3, 3) -= ip;
  m(1, 3) = m(3, 1) = -ip;
  return ConditionalCM(m);
}

/// Top-left entry of the symmetric shared CM as a function of x.
inline double v11(double mu, double tau, double x) {
  const double pre = (mu * mu - 1.0) * tau;
  if (pre == 0.0) return mu;
  return mu - pre / (2.0 * (tau * mu + (1.0 - tau) * x));
}

inline double v11(const ProtocolParams& params, const TwoModeAttack& attack) {
  params.validate();
  detail::require(params.is_symmetric(), "v11 needs tau_a == tau_b");
  return v11(params.mu, params.tau_a, noise_aggregates(attack).x);
}

/// Mode layout of the pre-relay state.
namespace eb_modes {
inline constexpr int kAlice = 0;        // a, kept by Alice
inline constexpr int kAliceSignal = 1;  // A, sent to the relay
inline constexpr int kEve1 = 2;         // E1
inline constexpr int kBob = 3;          // b, kept by Bob
inline constexpr int kBobSignal = 4;    // B, sent to the relay
inline constexpr int kEve2 = 5;         // E2
inline constexpr int kCount = 6;
}  // namespace eb_modes

/// Six-mode state (a, A, E1, b, B, E2) after both links, before the relay.
inline CovarianceMatrix channel_output_state(const ProtocolParams& params,
                                             const TwoModeAttack& attack) {
  params.validate();
  const CovarianceMatrix eve = attack_cm(attack);
  const CovarianceMatrix alice = tmsv_cm(params.mu);
  const CovarianceMatrix bob = tmsv_cm(params.mu);

  // Source blocks are placed directly; the attack CM straddles E1 and E2.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(12, 12);
  using namespace eb_modes;
  const int alice_modes[2] = {kAlice, kAliceSignal};
  const int bob_modes[2] = {kBob, kBobSignal};
  const int eve_modes[2] = {kEve1, kEve2};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      m.block<2, 2>(2 * alice_modes[i], 2 * alice_modes[j]) = alice.block(i, j);
      m.block<2, 2>(2 * bob_modes[i], 2 * bob_modes[j]) = bob.block(i, j);
      m.block<2, 2>(2 * eve_modes[i], 2 * eve_modes[j]) = eve.block(i, j);
    }
  }
  const CovarianceMatrix initial(m);
  const Eigen::MatrixXd channels =
      embed_two_mode(beamsplitter_symplectic(params.tau_b), kCount, kBobSignal,
                     kEve2) *
      embed_two_mode(beamsplitter_symplectic(params.tau_a), kCount,
                     kAliceSignal, kEve1);
  return initial.transformed(channels);
}

/// Shared CM of (a, b) after the relay, computed by propagating the full
/// six-mode state. The Bell detection mixes A and B on a balanced splitter,
/// homodynes q on the (B - A)/sqrt2 port and p on the (A + B)/sqrt2 port,
/// and Eve's ancillas are traced out. Valid for any tau_a, tau_b.
inline ConditionalCM conditional_cm_numeric(const ProtocolParams& params,
                                            const TwoModeAttack& attack,
                                            double tol = kDefaultTolerance) {
  using namespace eb_modes;
  const CovarianceMatrix pre_relay = channel_output_state(params, attack);
  if (!is_physical(pre_relay, tol)) {
    throw ConsistencyError("pre-relay state is unphysical");
  }
  const CovarianceMatrix mixed = pre_relay.transformed(
      embed_two_mode(beamsplitter_symplectic(0.5), kCount, kAliceSignal,
                     kBobSignal));
  // Condition the higher index first so kAliceSignal keeps its position.
  const CovarianceMatrix after_q =
      homodyne_condition(mixed, kBobSignal, Quadrature::Q, tol);
  const CovarianceMatrix after_p =
      homodyne_condition(after_q, kAliceSignal, Quadrature::P, tol);
  // Remaining order: a, E1, b, E2.
  ConditionalCM shared = after_p.reduced({0, 2});
  if (!is_physical(shared, tol)) {
    throw ConsistencyError("conditional CM is unphysical");
  }
  return shared;
}

}  // namespace cvmdi

#endif  // CVMDI_PROTOCOL_HPP

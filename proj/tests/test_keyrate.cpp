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


#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cvmdi/keyrate.hpp"
#include "cvmdi/protocol.hpp"
#include "test_support.hpp"

namespace cvmdi {
namespace {

ConditionalCM shared(double mu, double tau, const TwoModeAttack& attack) {
  return conditional_cm_analytic(ProtocolParams::symmetric(mu, tau), attack);
}

// Heterodyne outcomes are quadratures of the state plus unit vacuum noise.
// With q and p decoupled, I = sum over quadratures of -1/2 log2(1 - rho^2),
// rho being the sample correlation between Alice's and Bob's outcomes.
double monte_carlo_mutual_information(const ConditionalCM& cm, int n,
                                      std::uint64_t seed) {
  const Eigen::Matrix4d smeared = cm.matrix() + Eigen::Matrix4d::Identity();
  const Eigen::Matrix4d chol = smeared.llt().matrixL();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::Matrix4d moments = Eigen::Matrix4d::Zero();
  for (int i = 0; i < n; ++i) {
    Eigen::Vector4d z;
    for (int k = 0; k < 4; ++k) z(k) = normal(rng);
    const Eigen::Vector4d y = chol * z;
    moments += y * y.transpose();
  }
  moments /= n;
  double info = 0.0;
  for (int quad = 0; quad < 2; ++quad) {
    const double rho = moments(quad, 2 + quad) /
                       std::sqrt(moments(quad, quad) * moments(2 + quad, 2 + quad));
    info += -0.5 * std::log2(1.0 - rho * rho);
  }
  return info;
}

TEST(MutualInformation, VanishesWithoutCorrelations) {
  EXPECT_NEAR(mutual_information(shared(10.0, 0.0, TwoModeAttack::one_mode(1.5, 1.5))),
              0.0, 1e-12);
  EXPECT_NEAR(mutual_information(shared(1.0, 0.7, TwoModeAttack::one_mode(1.5, 1.5))),
              0.0, 1e-12);
}

TEST(MutualInformation, MatchesHeterodyneSampling) {
  struct Point {
    double mu, tau;
    TwoModeAttack attack;
  };
  const Point points[] = {
      {10.0, 1.0, TwoModeAttack::one_mode(3.0, 3.0)},
      {10.0, 0.7, TwoModeAttack::one_mode(1.2, 1.2)},
      {25.0, 0.5, TwoModeAttack::symmetric(2.0, 1.5)},
      {5.0, 0.9, {1.3, 1.7, 0.2, 0.4}},
  };
  std::uint64_t seed = 100;
  for (const auto& p : points) {
    const auto cm = shared(p.mu, p.tau, p.attack);
    const double exact = mutual_information(cm);
    EXPECT_GT(exact, 0.0);
    const double sampled = monte_carlo_mutual_information(cm, 1000000, seed++);
    EXPECT_NEAR(sampled, exact, 0.01 * exact) << "mu=" << p.mu << " tau=" << p.tau;
  }
}

TEST(MutualInformation, RejectsBadInput) {
  EXPECT_THROW(mutual_information(thermal_cm(2.0)), ValidationError);
  Eigen::MatrixXd bad = 0.5 * Eigen::MatrixXd::Identity(4, 4);
  EXPECT_THROW(mutual_information(CovarianceMatrix(bad)), ValidationError);
  EXPECT_THROW(mutual_information(tmsv_cm(2.0), RateConfig{0.0}), ValidationError);
  EXPECT_THROW(mutual_information(tmsv_cm(2.0), RateConfig{1.1}), ValidationError);
}

TEST(HolevoBound, PureSharedStateLeavesEveNothing) {
  for (double mu : {1.0, 2.0, 10.0, 100.0}) {
    EXPECT_NEAR(holevo_bound(tmsv_cm(mu)), 0.0, 1e-6);
    EXPECT_NEAR(holevo_bound(tmsv_cm(mu), {1.0, Reconciliation::ReverseOnAlice}), 0.0,
                1e-6);
  }
  // Lossless links with vacuum ancillas: the shared state is pure.
  const auto cm = shared(10.0, 1.0, TwoModeAttack::one_mode(1.0, 1.0));
  EXPECT_NEAR(von_neumann_entropy(cm), 0.0, 1e-6);
  EXPECT_NEAR(holevo_bound(cm), 0.0, 1e-6);
}

TEST(HolevoBound, ProductStateGivesSingleModeEntropy) {
  const double mu = 10.0;
  const auto cm = shared(mu, 0.0, TwoModeAttack::one_mode(1.5, 1.5));
  EXPECT_NEAR(holevo_bound(cm, {1.0, Reconciliation::DirectOnBob}), entropy_g(mu), 1e-10);
}

TEST(HolevoBound, BracketedByJointEntropy) {
  const auto cm = shared(10.0, 0.7, TwoModeAttack::one_mode(1.05, 1.05));
  const double chi = holevo_bound(cm);
  EXPECT_GT(chi, 0.0);
  EXPECT_LE(chi, von_neumann_entropy(cm));
}

TEST(HolevoBound, DirectionMattersOnlyForAsymmetricStates) {
  const auto sym = shared(10.0, 0.6, TwoModeAttack::one_mode(1.3, 1.3));
  EXPECT_NEAR(holevo_bound(sym, {1.0, Reconciliation::DirectOnBob}),
              holevo_bound(sym, {1.0, Reconciliation::ReverseOnAlice}), 1e-10);
  const auto asym = conditional_cm_numeric({10.0, 0.9, 0.3},
                                           TwoModeAttack::one_mode(1.3, 1.3));
  EXPECT_GT(std::abs(holevo_bound(asym, {1.0, Reconciliation::DirectOnBob}) -
                     holevo_bound(asym, {1.0, Reconciliation::ReverseOnAlice})),
            1e-3);
}

TEST(HolevoBound, NonNegativeAndBracketedOnSampledStates) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> mu(1.0, 100.0), tau(0.0, 1.0),
      omega(1.0, 4.0), unit(0.0, 1.0);
  int checked = 0;
  while (checked < 300) {
    const double w = omega(rng);
    const auto attack = TwoModeAttack::symmetric(w, unit(rng) * std::sqrt(w * w - 1.0));
    const auto cm = shared(mu(rng), tau(rng), attack);
    for (auto dir : {Reconciliation::DirectOnBob, Reconciliation::ReverseOnAlice}) {
      const double chi = holevo_bound(cm, {1.0, dir});
      EXPECT_GE(chi, 0.0);
      // S(cond) <= S(ab) + S(measured mode).
      const int reference = dir == Reconciliation::DirectOnBob ? 0 : 1;
      const double s_cond = von_neumann_entropy(heterodyne_condition(cm, reference));
      EXPECT_LE(s_cond, von_neumann_entropy(cm) +
                            von_neumann_entropy(cm.reduced({reference})) + 1e-9);
    }
    ++checked;
  }
}

TEST(KeyRate, NoModulationMeansNoKey) {
  const auto r = key_rate(shared(1.0, 0.5, TwoModeAttack::one_mode(1.2, 1.2)));
  EXPECT_NEAR(r.mutual_information, 0.0, 1e-12);
  EXPECT_NEAR(r.holevo, 0.0, 1e-12);
  EXPECT_NEAR(r.rate, 0.0, 1e-12);
}

TEST(KeyRate, AffineInEfficiency) {
  const auto cm = shared(10.0, 0.8, TwoModeAttack::one_mode(1.1, 1.1));
  const auto full = key_rate(cm, {1.0});
  const auto partial = key_rate(cm, {0.95});
  EXPECT_NEAR(full.rate - partial.rate, 0.05 * full.mutual_information, 1e-12);
  EXPECT_DOUBLE_EQ(full.rate, full.mutual_information - full.holevo);
}

TEST(KeyRate, NonIncreasingInThermalNoise) {
  double prev = key_rate(shared(10.0, 0.8, TwoModeAttack::one_mode(1.0, 1.0))).rate;
  for (int i = 1; i <= 100; ++i) {
    const double omega = 1.0 + 0.005 * i;
    const double r =
        key_rate(shared(10.0, 0.8, TwoModeAttack::one_mode(omega, omega))).rate;
    EXPECT_LE(r, prev + 1e-12) << "omega=" << omega;
    prev = r;
  }
}

}  // namespace
}  // namespace cvmdi

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
#include <sstream>

#include <gtest/gtest.h>

#include "cvmdi/analysis.hpp"
#include "cvmdi/dataset_io.hpp"
#include "cvmdi/simulation.hpp"

namespace cvmdi {
namespace {

const TwoModeAttack kBenign = TwoModeAttack::one_mode(1.2, 1.2);

TEST(SimulateRuns, NoModulationMeansZeroAmplitudes) {
  const auto data = simulate_runs(ProtocolParams::symmetric(1.0, 0.7), kBenign, 1000, 1);
  for (const auto& r : data.records) {
    EXPECT_EQ(r.alpha, std::complex<double>(0.0, 0.0));
    EXPECT_EQ(r.beta, std::complex<double>(0.0, 0.0));
  }
}

TEST(SimulateRuns, ModulationVariancePerQuadrature) {
  const double mu = 10.0;
  const int n = 1000000;
  const auto data = simulate_runs(ProtocolParams::symmetric(mu, 0.7), kBenign, n, 2);
  double sum2 = 0.0;
  for (const auto& r : data.records) sum2 += r.alpha.real() * r.alpha.real();
  const double expected = (mu - 1.0) / 2.0;
  const double se = expected * std::sqrt(2.0 / n);
  EXPECT_NEAR(sum2 / n, expected, 5.0 * se);
}

TEST(SimulateRuns, NoTransmissionDecouplesRelayOutcome) {
  const int n = 200000;
  const auto data = simulate_runs(ProtocolParams::symmetric(10.0, 0.0), kBenign, n, 3);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (const auto& r : data.records) {
    sxy += r.alpha.real() * r.gamma.real();
    sxx += r.alpha.real() * r.alpha.real();
    syy += r.gamma.real() * r.gamma.real();
  }
  EXPECT_LT(std::abs(sxy / std::sqrt(sxx * syy)), 5.0 / std::sqrt(n));
}

TEST(SimulateRuns, DeterministicAndThreadIndependent) {
  const auto params = ProtocolParams::symmetric(10.0, 0.6);
  const auto attack = TwoModeAttack::symmetric(1.5, 0.4);
  const auto a = simulate_runs(params, attack, 200000, 99, 1);
  const auto b = simulate_runs(params, attack, 200000, 99, 4);
  const auto c = simulate_runs(params, attack, 200000, 100, 1);
  ASSERT_EQ(a.records.size(), b.records.size());
  bool same = true, differs = false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    same = same && a.records[i].gamma == b.records[i].gamma &&
           a.records[i].alpha == b.records[i].alpha;
    differs = differs || a.records[i].gamma != c.records[i].gamma;
  }
  EXPECT_TRUE(same);
  EXPECT_TRUE(differs);
}

TEST(SimulateRuns, RejectsBadInput) {
  const auto params = ProtocolParams::symmetric(10.0, 0.6);
  EXPECT_THROW(simulate_runs(params, kBenign, 0, 1), ValidationError);
  EXPECT_THROW(simulate_runs(params, TwoModeAttack::symmetric(2.0, 1.9), 10, 1),
               ValidationError);
  EXPECT_THROW(simulate_runs({10.0, 1.2, 0.5}, kBenign, 10, 1), ValidationError);
}

TEST(EstimateTransmissivities, SymmetricLinks) {
  const auto data =
      simulate_runs(ProtocolParams::symmetric(10.0, 0.7), kBenign, 1000000, 5);
  const auto est = estimate_transmissivities(data);
  EXPECT_NEAR(est.tau_a, 0.7, 0.007);
  EXPECT_NEAR(est.tau_b, 0.7, 0.007);
}

TEST(EstimateTransmissivities, LosslessNoiselessLinks) {
  const auto data = simulate_runs(ProtocolParams::symmetric(10.0, 1.0),
                                  TwoModeAttack::one_mode(1.0, 1.0), 1000000, 6);
  const auto est = estimate_transmissivities(data);
  EXPECT_NEAR(est.tau_a, 1.0, 1e-3);
  EXPECT_NEAR(est.tau_b, 1.0, 1e-3);
}

TEST(EstimateTransmissivities, AsymmetricLinks) {
  const auto data = simulate_runs({10.0, 0.9, 0.3}, kBenign, 1000000, 7);
  const auto est = estimate_transmissivities(data);
  EXPECT_NEAR(est.tau_a, 0.9, 0.009);
  EXPECT_NEAR(est.tau_b, 0.3, 0.006);
}

TEST(EstimateTransmissivities, InsensitiveToEveCorrelations) {
  const auto params = ProtocolParams::symmetric(10.0, 0.6);
  const int n = 1000000;
  const auto none = estimate_transmissivities(
      simulate_runs(params, TwoModeAttack::one_mode(1.5, 1.5), n, 8));
  const auto ent = estimate_transmissivities(
      simulate_runs(params, TwoModeAttack::symmetric(1.5, 1.1), n, 9));
  // Each estimate has a relative spread of well under 0.5% at this n.
  EXPECT_NEAR(none.tau_a, ent.tau_a, 0.006);
  EXPECT_NEAR(none.tau_b, ent.tau_b, 0.006);
}

TEST(EstimateTransmissivities, DegenerateDesignIsRejected) {
  const auto data = simulate_runs(ProtocolParams::symmetric(1.0, 0.6), kBenign, 1000, 10);
  EXPECT_THROW(estimate_transmissivities(data), ValidationError);
  const auto tiny = simulate_runs(ProtocolParams::symmetric(10.0, 0.6), kBenign, 4, 10);
  EXPECT_THROW(estimate_transmissivities(tiny), ValidationError);
}

TEST(ReconstructConditionalCm, AgreesWithClosedForm) {
  const auto params = ProtocolParams::symmetric(10.0, 0.6);
  const auto attack = TwoModeAttack::symmetric(1.5, 0.4);
  const auto rec = reconstruct_conditional_cm(simulate_runs(params, attack, 1000000, 11));
  const auto exact = conditional_cm_analytic(params, attack);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      EXPECT_LT(std::abs(rec.cm(i, j) - exact(i, j)), 5.0 * rec.standard_errors(i, j))
          << i << "," << j;
    }
  }
  EXPECT_EQ(rec.n, 1000000);
}

TEST(ReconstructConditionalCm, NoTransmission) {
  const auto rec = reconstruct_conditional_cm(
      simulate_runs(ProtocolParams::symmetric(10.0, 0.0), kBenign, 200000, 12));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double expected = i == j ? 10.0 : 0.0;
      EXPECT_NEAR(rec.cm(i, j), expected, 5.0 * rec.standard_errors(i, j));
    }
  }
}

TEST(ReconstructConditionalCm, SameSeedSameBits) {
  const auto params = ProtocolParams::symmetric(10.0, 0.6);
  const auto attack = TwoModeAttack::symmetric(1.5, 0.4);
  const auto a = reconstruct_conditional_cm(simulate_runs(params, attack, 50000, 13));
  const auto b = reconstruct_conditional_cm(simulate_runs(params, attack, 50000, 13));
  EXPECT_TRUE(a.cm.matrix() == b.cm.matrix());
}

TEST(ReconstructConditionalCm, SeparatesCounterexampleFromOneModeAttacks) {
  const auto params = ProtocolParams::symmetric(10.0, 0.5);
  const auto rec = reconstruct_conditional_cm(
      simulate_runs(params, counterexample_attack(2.0), 1000000, 14));
  const double infimum = v11(10.0, 0.5, one_mode_x_infimum());
  EXPECT_GT(infimum - rec.cm(0, 0), 5.0 * rec.standard_errors(0, 0));
}

TEST(MomentAccumulator, MergeMatchesSinglePass) {
  MomentAccumulator whole, left, right;
  for (int i = 0; i < 100; ++i) {
    Eigen::Matrix<double, 6, 1> v;
    v << i, 0.5 * i, -i, 1.0, 2.0 - i, 0.1 * i * i;
    whole.add(v);
    (i < 37 ? left : right).add(v);
  }
  left.merge(right);
  EXPECT_EQ(left.count, whole.count);
  EXPECT_TRUE(left.moments().isApprox(whole.moments(), 1e-14));
}

TEST(DatasetIo, RoundTripPreservesEveryBit) {
  const auto data = simulate_runs({10.0, 0.8, 0.5}, TwoModeAttack::symmetric(1.5, 0.4),
                                  500, 15);
  std::stringstream csv;
  write_dataset_csv(data, csv);
  const auto back = read_dataset(csv, dataset_sidecar(data));
  ASSERT_EQ(back.records.size(), data.records.size());
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    EXPECT_EQ(back.records[i].alpha, data.records[i].alpha);
    EXPECT_EQ(back.records[i].beta, data.records[i].beta);
    EXPECT_EQ(back.records[i].gamma, data.records[i].gamma);
  }
  EXPECT_EQ(back.seed, 15u);
  EXPECT_EQ(back.params.tau_b, 0.5);
  EXPECT_EQ(back.attack.g_prime, -0.4);
}

TEST(DatasetIo, CsvLayout) {
  const auto data = simulate_runs(ProtocolParams::symmetric(10.0, 0.8), kBenign, 3, 16);
  std::stringstream csv;
  write_dataset_csv(data, csv);
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "# cvmdi-trials v1");
  std::getline(csv, line);
  EXPECT_EQ(line, "alpha_re,alpha_im,beta_re,beta_im,gamma_re,gamma_im");
  const auto sidecar = dataset_sidecar(data);
  EXPECT_EQ(sidecar["n"], 3);
  EXPECT_EQ(sidecar["params"]["mu"], 10.0);
}

TEST(DatasetIo, RejectsMalformedInput) {
  const auto data = simulate_runs(ProtocolParams::symmetric(10.0, 0.8), kBenign, 3, 17);
  auto sidecar = dataset_sidecar(data);
  std::stringstream csv;
  write_dataset_csv(data, csv);
  const std::string text = csv.str();

  std::stringstream truncated(text.substr(0, text.rfind('\n', text.size() - 2) + 1));
  EXPECT_THROW(read_dataset(truncated, sidecar), ValidationError);

  std::stringstream garbage("# cvmdi-trials v1\n"
                            "alpha_re,alpha_im,beta_re,beta_im,gamma_re,gamma_im\n"
                            "1,2,3\n");
  EXPECT_THROW(read_dataset(garbage, sidecar), ValidationError);

  std::stringstream ok(text);
  sidecar["schema"] = "cvmdi-trials v0";
  EXPECT_THROW(read_dataset(ok, sidecar), ValidationError);
}

}  // namespace
}  // namespace cvmdi

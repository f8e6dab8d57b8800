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

// Prepare-and-measure Monte Carlo of the protocol in phase space, and the
// moment-based reconstruction of the link transmissivities and the shared CM.
//
// Conventions:
//   alpha = (qbar_A + i pbar_A) / sqrt2, with qbar_A, pbar_A ~ N(0, mu - 1)
//   gamma = (q_minus + i p_plus) / sqrt2,
//   q_minus = (q_A' - q_B') / sqrt2,  p_plus = (p_A' + p_B') / sqrt2
// so that Re gamma = (sqrt(tau_a) Re alpha - sqrt(tau_b) Re beta) / sqrt2 + noise
// and    Im gamma = (sqrt(tau_a) Im alpha + sqrt(tau_b) Im beta) / sqrt2 + noise.

#ifndef CVMDI_SIMULATION_HPP
#define CVMDI_SIMULATION_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "cvmdi/attacks.hpp"
#include "cvmdi/protocol.hpp"

namespace cvmdi {

struct TrialRecord {
  std::complex<double> alpha;
  std::complex<double> beta;
  std::complex<double> gamma;
};

struct TrialDataset {
  std::vector<TrialRecord> records;
  ProtocolParams params;
  TwoModeAttack attack;
  std::uint64_t seed = 0;
};

/// Trials are generated in fixed-size chunks; chunk k draws from its own
/// mt19937_64 stream seeded with stream_seed(seed, k). The output therefore
/// does not depend on how chunks are spread across threads.
inline constexpr std::int64_t kTrialChunk = 1 << 16;

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t chunk) {
  return splitmix64(splitmix64(seed) ^ (chunk + 1));
}

namespace detail {

struct TrialSampler {
  double modulation_sd;
  double ta, ra, tb, rb;  // sqrt(tau), sqrt(1 - tau) per link
  // Cholesky factors of the q and p blocks of Eve's two-mode CM.
  double lq11, lq21, lq22;
  double lp11, lp21, lp22;

  TrialSampler(const ProtocolParams& params, const TwoModeAttack& attack)
      : modulation_sd(std::sqrt(params.mu - 1.0)),
        ta(std::sqrt(params.tau_a)),
        ra(std::sqrt(1.0 - params.tau_a)),
        tb(std::sqrt(params.tau_b)),
        rb(std::sqrt(1.0 - params.tau_b)) {
    lq11 = std::sqrt(attack.omega_a);
    lq21 = attack.g / lq11;
    lq22 = std::sqrt(attack.omega_b - lq21 * lq21);
    lp11 = std::sqrt(attack.omega_a);
    lp21 = attack.g_prime / lp11;
    lp22 = std::sqrt(attack.omega_b - lp21 * lp21);
  }

  template <class Rng>
  TrialRecord operator()(Rng& rng, std::normal_distribution<double>& n) const {
    const double qa_bar = modulation_sd * n(rng);
    const double pa_bar = modulation_sd * n(rng);
    const double qb_bar = modulation_sd * n(rng);
    const double pb_bar = modulation_sd * n(rng);
    // Coherent states: displaced vacuum noise.
    const double qa = qa_bar + n(rng);
    const double pa = pa_bar + n(rng);
    const double qb = qb_bar + n(rng);
    const double pb = pb_bar + n(rng);
    // Correlated ancillas.
    const double zq1 = n(rng), zq2 = n(rng), zp1 = n(rng), zp2 = n(rng);
    const double qe1 = lq11 * zq1;
    const double qe2 = lq21 * zq1 + lq22 * zq2;
    const double pe1 = lp11 * zp1;
    const double pe2 = lp21 * zp1 + lp22 * zp2;
    // Links.
    const double qa_out = ta * qa + ra * qe1;
    const double pa_out = ta * pa + ra * pe1;
    const double qb_out = tb * qb + rb * qe2;
    const double pb_out = tb * pb + rb * pe2;
    // Bell detection.
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const double q_minus = (qa_out - qb_out) * inv_sqrt2;
    const double p_plus = (pa_out + pb_out) * inv_sqrt2;
    return {{qa_bar * inv_sqrt2, pa_bar * inv_sqrt2},
            {qb_bar * inv_sqrt2, pb_bar * inv_sqrt2},
            {q_minus * inv_sqrt2, p_plus * inv_sqrt2}};
  }
};

}  // namespace detail

/// Exact phase-space sampling of n protocol runs. threads = 0 uses the
/// hardware concurrency.
inline TrialDataset simulate_runs(const ProtocolParams& params,
                                  const TwoModeAttack& attack, std::int64_t n,
                                  std::uint64_t seed, unsigned threads = 0) {
  params.validate();
  detail::require(n >= 1, "number of trials must be >= 1");
  attack_cm(attack);

  TrialDataset data;
  data.params = params;
  data.attack = attack;
  data.seed = seed;
  data.records.resize(static_cast<std::size_t>(n));

  const detail::TrialSampler sampler(params, attack);
  const std::int64_t chunks = (n + kTrialChunk - 1) / kTrialChunk;
  auto run_chunk = [&](std::int64_t k) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(k)));
    std::normal_distribution<double> normal;
    const std::int64_t end = std::min(n, (k + 1) * kTrialChunk);
    for (std::int64_t i = k * kTrialChunk; i < end; ++i) {
      data.records[static_cast<std::size_t>(i)] = sampler(rng, normal);
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::int64_t>(static_cast<std::int64_t>(threads), chunks));
  if (threads <= 1) {
    for (std::int64_t k = 0; k < chunks; ++k) run_chunk(k);
    return data;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      for (std::int64_t k = w; k < chunks; k += threads) run_chunk(k);
    });
  }
  workers.clear();
  return data;
}

/// Uncentered second moments of (y, z) where y are the EB-equivalent
/// variables of Alice and Bob and z = (Re gamma, Im gamma). Accumulators
/// merge associatively, so partial sums over record ranges can be combined.
struct MomentAccumulator {
  std::int64_t count = 0;
  Eigen::Matrix<double, 6, 6> sum = Eigen::Matrix<double, 6, 6>::Zero();

  void add(const Eigen::Matrix<double, 6, 1>& v) {
    sum.selfadjointView<Eigen::Lower>().rankUpdate(v);
    ++count;
  }
  void merge(const MomentAccumulator& other) {
    sum += other.sum;
    count += other.count;
  }
  Eigen::Matrix<double, 6, 6> moments() const {
    Eigen::Matrix<double, 6, 6> full = sum.selfadjointView<Eigen::Lower>();
    return full / static_cast<double>(count);
  }
};

struct TransmissivityEstimate {
  double tau_a = 0.0;
  double tau_b = 0.0;
};

inline constexpr std::int64_t kMinRegressionTrials = 16;

/// Least-squares fit of Re gamma on (Re alpha, Re beta) and Im gamma on
/// (Im alpha, Im beta). Both fits estimate sqrt(tau / 2) per link; the two
/// are averaged and squared back.
inline TransmissivityEstimate estimate_transmissivities(
    const TrialDataset& data) {
  const auto n = static_cast<std::int64_t>(data.records.size());
  detail::require(n >= kMinRegressionTrials,
                  "too few trials to estimate transmissivities");
  Eigen::Matrix2d gram_re = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d gram_im = Eigen::Matrix2d::Zero();
  Eigen::Vector2d rhs_re = Eigen::Vector2d::Zero();
  Eigen::Vector2d rhs_im = Eigen::Vector2d::Zero();
  for (const auto& r : data.records) {
    const Eigen::Vector2d u(r.alpha.real(), r.beta.real());
    const Eigen::Vector2d w(r.alpha.imag(), r.beta.imag());
    gram_re += u * u.transpose();
    gram_im += w * w.transpose();
    rhs_re += u * r.gamma.real();
    rhs_im += w * r.gamma.imag();
  }
  const double scale = std::max(gram_re.trace(), gram_im.trace());
  detail::require(scale > 0.0 && gram_re.determinant() > 1e-12 * scale * scale &&
                      gram_im.determinant() > 1e-12 * scale * scale,
                  "degenerate regression design (no modulation variance)");
  const Eigen::Vector2d c_re = gram_re.ldlt().solve(rhs_re);
  const Eigen::Vector2d c_im = gram_im.ldlt().solve(rhs_im);
  const double root_a = (c_re(0) + c_im(0)) / std::sqrt(2.0);
  const double root_b = (c_im(1) - c_re(1)) / std::sqrt(2.0);
  return {root_a * root_a, root_b * root_b};
}

struct Reconstruction {
  ConditionalCM cm;
  Eigen::Matrix4d standard_errors = Eigen::Matrix4d::Zero();
  TransmissivityEstimate tau;
  std::int64_t n = 0;
};

/// Empirical shared CM. The PM amplitudes are mapped to the heterodyne
/// outcomes of the EB picture, y = (mu + 1) / sqrt(mu^2 - 1) * (qbar, -pbar),
/// whose covariance given the Bell outcome is V_ab|gamma + I. That residual
/// covariance comes from a least-squares regression of y on gamma.
/// Standard errors use the Gaussian sampling variance (S_ii S_jj + S_ij^2)/n.
inline Reconstruction reconstruct_conditional_cm(const TrialDataset& data) {
  Reconstruction out;
  out.tau = estimate_transmissivities(data);
  const double mu = data.params.mu;
  const auto n = static_cast<std::int64_t>(data.records.size());
  detail::require(mu > 1.0, "reconstruction needs mu > 1");
  detail::require(n > 6, "too few trials to reconstruct the CM");

  const double s = (mu + 1.0) / std::sqrt(mu * mu - 1.0) * std::sqrt(2.0);
  MomentAccumulator acc;
  Eigen::Matrix<double, 6, 1> v;
  for (const auto& r : data.records) {
    v << s * r.alpha.real(), -s * r.alpha.imag(), s * r.beta.real(),
        -s * r.beta.imag(), r.gamma.real(), r.gamma.imag();
    acc.add(v);
  }
  const Eigen::Matrix<double, 6, 6> m = acc.moments();
  const Eigen::Matrix4d syy = m.topLeftCorner<4, 4>();
  const Eigen::Matrix<double, 4, 2> syz = m.topRightCorner<4, 2>();
  const Eigen::Matrix2d szz = m.bottomRightCorner<2, 2>();
  const double dof = static_cast<double>(n) / static_cast<double>(n - 2);
  const Eigen::Matrix4d residual =
      dof * (syy - syz * szz.ldlt().solve(syz.transpose()));

  out.cm = ConditionalCM(residual - Eigen::Matrix4d::Identity(), 1e-6);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      out.standard_errors(i, j) = std::sqrt(
          (residual(i, i) * residual(j, j) + residual(i, j) * residual(i, j)) /
          static_cast<double>(n));
    }
  }
  out.n = n;
  return out;
}

}  // namespace cvmdi

#endif  // CVMDI_SIMULATION_HPP

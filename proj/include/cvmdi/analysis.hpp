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

// Reachability of shared CMs by one-mode attacks, the entangled two-mode
// counterexample, the squeezed one-mode exclusion, and (omega, g) region
// scans of the symmetric attack family.

#ifndef CVMDI_ANALYSIS_HPP
#define CVMDI_ANALYSIS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

#include "cvmdi/attacks.hpp"
#include "cvmdi/protocol.hpp"

namespace cvmdi {

/// Infimum of x over one-mode attacks, attained at omega_a = omega_b = 1.
inline constexpr double one_mode_x_infimum() { return 1.0; }

/// Symmetric two-mode attack with g at the middle of the entangled band, so
/// x = omega - g < 1.
inline TwoModeAttack counterexample_attack(double omega) {
  detail::require(std::isfinite(omega) && omega > 1.0,
                  "counterexample needs omega > 1 (the entangled band is "
                  "empty at omega = 1)");
  return TwoModeAttack::symmetric(omega, entangled_band(omega).midpoint());
}

/// Inclusive linear range, `steps` points from start to stop.
struct RangeSpec {
  double start = 0.0;
  double stop = 1.0;
  int steps = 2;

  void validate() const {
    detail::require(std::isfinite(start) && std::isfinite(stop),
                    "range bounds must be finite");
    detail::require(steps >= 2, "range needs at least 2 steps");
    detail::require(stop >= start, "range stop must not precede start");
  }
  double at(int i) const {
    if (i == steps - 1) return stop;
    return start + (stop - start) * static_cast<double>(i) / (steps - 1);
  }
  double spacing() const { return (stop - start) / (steps - 1); }
};

/// One-mode search settings. omega_max <= 0 selects 10x the target's noise
/// scale.
struct SearchGrid {
  int steps = 64;
  double omega_max = 0.0;
  double tol = kDefaultTolerance;

  void validate() const {
    detail::require(steps >= 2, "search grid needs at least 2 steps");
    detail::require(std::isfinite(omega_max), "omega_max must be finite");
    detail::require(omega_max <= 0.0 || omega_max > 1.0,
                    "omega_max must exceed 1 (or be <= 0 for automatic)");
    detail::require(std::isfinite(tol) && tol > 0.0,
                    "search tolerance must be positive");
  }
};

struct ReachabilityReport {
  double target_v11 = 0.0;
  double best_one_mode_v11 = 0.0;
  double gap = 0.0;  // best_one_mode_v11 - target_v11
  double best_omega_a = 1.0;
  double best_omega_b = 1.0;
  double best_x = 1.0;
  double cm_distance = 0.0;  // max entrywise |target - best one-mode CM|
  bool matched = false;      // |gap| <= tol
};

namespace detail {

// Golden-section minimization of a unimodal f on [lo, hi].
template <class F>
double golden_section(F&& f, double lo, double hi, int iterations = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < iterations && hi - lo > 1e-15 * std::max(1.0, hi);
       ++it) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

// x that reproduces v11 under the symmetric closed form, or NaN if the
// inversion is degenerate.
inline double invert_v11(double mu, double tau, double v) {
  const double pre = (mu * mu - 1.0) * tau;
  if (pre == 0.0 || tau >= 1.0 || v >= mu) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double theta = pre / (mu - v);
  return (0.5 * theta - tau * mu) / (1.0 - tau);
}

}  // namespace detail

/// Best one-mode approximation of the target's V11. V11 depends on a
/// one-mode attack only through x = (omega_a + omega_b) / 2, so a coarse
/// (omega_a, omega_b) grid is refined by golden section on x. Only x is
/// identifiable; the report sets omega_a = omega_b = x.
inline ReachabilityReport one_mode_simulation_search(
    const ConditionalCM& target, const ProtocolParams& params,
    const SearchGrid& grid = {}) {
  grid.validate();
  params.validate();
  detail::require(params.is_symmetric(),
                  "one-mode search needs tau_a == tau_b");
  detail::require(target.n_modes() == 2, "target must be a two-mode CM");
  const double mu = params.mu;
  const double tau = params.tau_a;
  const double t = target(0, 0);

  double omega_max = grid.omega_max;
  if (omega_max <= 0.0) {
    const double x_hat = detail::invert_v11(mu, tau, t);
    const double scale = std::isfinite(x_hat) ? std::max(1.0, x_hat) : 1.0;
    omega_max = 10.0 * scale;
  }
  auto miss = [&](double x) { return std::abs(v11(mu, tau, x) - t); };

  const RangeSpec axis{1.0, omega_max, grid.steps};
  double best_x = 1.0;
  double best_miss = miss(1.0);
  for (int i = 0; i < axis.steps; ++i) {
    for (int j = 0; j < axis.steps; ++j) {
      const double x = 0.5 * (axis.at(i) + axis.at(j));
      const double m = miss(x);
      if (m < best_miss) {
        best_miss = m;
        best_x = x;
      }
    }
  }
  const double h = axis.spacing();
  const double lo = std::max(1.0, best_x - h);
  const double hi = std::min(omega_max, best_x + h);
  for (double x : {detail::golden_section(miss, lo, hi), lo, hi}) {
    if (miss(x) < best_miss) {
      best_miss = miss(x);
      best_x = x;
    }
  }

  ReachabilityReport report;
  report.target_v11 = t;
  report.best_x = best_x;
  report.best_omega_a = best_x;
  report.best_omega_b = best_x;
  report.best_one_mode_v11 = v11(mu, tau, best_x);
  report.gap = report.best_one_mode_v11 - t;
  report.matched = std::abs(report.gap) <= grid.tol;
  const ConditionalCM best_cm =
      conditional_cm_analytic(params, TwoModeAttack::one_mode(best_x, best_x));
  report.cm_distance =
      (best_cm.matrix() - target.matrix()).cwiseAbs().maxCoeff();
  return report;
}

struct SqueezedExclusionReport {
  std::int64_t n_samples = 0;
  std::int64_t violations = 0;  // samples with x < 1 and x' < 1
  double min_larger_aggregate = std::numeric_limits<double>::infinity();
  std::int64_t boundary_checks = 0;
  double boundary_min_product = std::numeric_limits<double>::infinity();
};

/// Random squeezed one-mode attacks never reach x < 1 and x' < 1 together.
/// Samples put each ancilla at log-uniform squeezing with an uncertainty
/// product 1 (one quarter of the time) or a log-uniform excess above 1.
/// Also checks x * x' >= 1 on a grid of minimum-uncertainty ancillas.
inline SqueezedExclusionReport squeezed_exclusion_check(std::int64_t n_samples,
                                                        std::uint64_t seed) {
  detail::require(n_samples >= 1, "n_samples must be >= 1");
  SqueezedExclusionReport report;
  report.n_samples = n_samples;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_squeeze(-3.0, 3.0);
  std::uniform_real_distribution<double> log_excess(0.0, 2.0);
  std::bernoulli_distribution at_boundary(0.25);
  auto ancilla = [&](double& q, double& p) {
    q = std::exp(log_squeeze(rng));
    const double product = at_boundary(rng) ? 1.0 : std::exp(log_excess(rng));
    p = product / q;
  };
  for (std::int64_t i = 0; i < n_samples; ++i) {
    SqueezedOneModeAttack a;
    ancilla(a.omega_a_q, a.omega_a_p);
    ancilla(a.omega_b_q, a.omega_b_p);
    const NoiseAggregates agg = squeezed_aggregates(a);
    if (agg.x < 1.0 && agg.x_prime < 1.0) ++report.violations;
    report.min_larger_aggregate =
        std::min(report.min_larger_aggregate, std::max(agg.x, agg.x_prime));
  }

  // omega_q * omega_p = 1 for both ancillas: x x' = (a + b)(1/a + 1/b) / 4.
  const RangeSpec grid{-3.0, 3.0, 61};
  for (int i = 0; i < grid.steps; ++i) {
    for (int j = 0; j < grid.steps; ++j) {
      const double a = std::exp(grid.at(i));
      const double b = std::exp(grid.at(j));
      const NoiseAggregates agg = squeezed_aggregates({a, 1.0 / a, b, 1.0 / b});
      report.boundary_min_product =
          std::min(report.boundary_min_product, agg.x * agg.x_prime);
      ++report.boundary_checks;
    }
  }
  return report;
}

enum class Region { OneModeAxis, Separable, Entangled, Prohibited };

inline std::string_view to_string(Region r) {
  switch (r) {
    case Region::OneModeAxis: return "one_mode_axis";
    case Region::Separable: return "separable";
    case Region::Entangled: return "entangled";
    case Region::Prohibited: return "prohibited";
  }
  return "unknown";
}

struct RegionPoint {
  double omega = 0.0;
  double g = 0.0;
  Region region = Region::Prohibited;
};

inline Region classify_region(double omega, double g) {
  switch (classify_attack(TwoModeAttack::symmetric(omega, g))) {
    case AttackClass::OneMode: return Region::OneModeAxis;
    case AttackClass::SeparableTwoMode: return Region::Separable;
    case AttackClass::EntangledTwoMode: return Region::Entangled;
    case AttackClass::Unphysical: return Region::Prohibited;
  }
  return Region::Prohibited;
}

/// Classifies every (omega, g) grid point of the symmetric family g' = -g.
/// Output is omega-major: index = i * g_range.steps + j.
inline std::vector<RegionPoint> region_scan(const RangeSpec& omega_range,
                                            const RangeSpec& g_range) {
  omega_range.validate();
  g_range.validate();
  std::vector<RegionPoint> points;
  points.reserve(static_cast<std::size_t>(omega_range.steps) * g_range.steps);
  for (int i = 0; i < omega_range.steps; ++i) {
    const double omega = omega_range.at(i);
    for (int j = 0; j < g_range.steps; ++j) {
      const double g = g_range.at(j);
      points.push_back({omega, g, classify_region(omega, g)});
    }
  }
  return points;
}

}  // namespace cvmdi

#endif  // CVMDI_ANALYSIS_HPP

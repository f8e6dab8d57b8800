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

// Command implementations behind the cvmdi CLI. Each command validates its
// whole configuration, computes its output in memory, and only then is the
// result written (atomically) by the caller.

#ifndef CVMDI_COMMANDS_HPP
#define CVMDI_COMMANDS_HPP

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvmdi/analysis.hpp"
#include "cvmdi/dataset_io.hpp"
#include "cvmdi/keyrate.hpp"
#include "cvmdi/protocol.hpp"
#include "cvmdi/simulation.hpp"

namespace cvmdi::cli {

inline constexpr const char* kOutputDirEnv = "CVMDI_OUTPUT_DIR";
inline constexpr std::int64_t kMinValidationTrials = 1000;

/// Parses `start:stop:steps` (inclusive endpoints).
inline RangeSpec parse_range(const std::string& text) {
  RangeSpec r;
  std::istringstream in(text);
  char c1 = 0, c2 = 0;
  std::string rest;
  if (!(in >> r.start >> c1 >> r.stop >> c2 >> r.steps) || c1 != ':' ||
      c2 != ':' || (in >> rest)) {
    throw ValidationError("invalid range '" + text +
                          "' (expected start:stop:steps)");
  }
  r.validate();
  return r;
}

inline nlohmann::json to_json(const RangeSpec& r) {
  return {{"start", r.start}, {"stop", r.stop}, {"steps", r.steps}};
}

/// Relative paths land in $CVMDI_OUTPUT_DIR when it is set.
inline std::filesystem::path resolve_output_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
      return std::filesystem::path(dir) / p;
    }
  }
  return p;
}

/// Writes to a sibling temporary file and renames it over the target.
inline void write_atomically(const std::filesystem::path& path,
                             const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ValidationError("cannot open " + tmp.string());
    os << content;
    os.flush();
    if (!os) {
      std::filesystem::remove(tmp);
      throw ValidationError("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

inline std::string csv_preamble(const char* schema,
                                const nlohmann::json& config) {
  return std::string("# ") + schema + " " + config.dump() + "\n";
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// regions

struct RegionsConfig {
  RangeSpec omega{1.0, 5.0, 200};
  RangeSpec g{0.0, 5.0, 200};
};

inline std::string run_regions(const RegionsConfig& config) {
  config.omega.validate();
  config.g.validate();
  const nlohmann::json echo = {{"command", "regions"},
                               {"omega", to_json(config.omega)},
                               {"g", to_json(config.g)}};
  std::ostringstream os;
  os << csv_preamble("cvmdi-regions v1", echo) << "omega,g,region\n";
  for (const auto& pt : region_scan(config.omega, config.g)) {
    os << format_double(pt.omega) << ',' << format_double(pt.g) << ','
       << to_string(pt.region) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// counterexample

struct CounterexampleConfig {
  double omega = 2.0;
  double mu = 10.0;
  double tau = 0.5;
  SearchGrid grid;
};

inline nlohmann::json run_counterexample(const CounterexampleConfig& config) {
  detail::require(std::isfinite(config.omega) && config.omega > 1.0,
                  "counterexample needs omega > 1");
  detail::require(std::isfinite(config.mu) && config.mu > 1.0,
                  "counterexample needs mu > 1");
  detail::require(std::isfinite(config.tau) && config.tau > 0.0 &&
                      config.tau < 1.0,
                  "counterexample needs 0 < tau < 1");
  config.grid.validate();

  const auto params = ProtocolParams::symmetric(config.mu, config.tau);
  const TwoModeAttack attack = counterexample_attack(config.omega);
  const ConditionalCM target = conditional_cm_analytic(params, attack);
  const ReachabilityReport report =
      one_mode_simulation_search(target, params, config.grid);
  const ConditionalCM best = conditional_cm_analytic(
      params, TwoModeAttack::one_mode(report.best_omega_a, report.best_omega_b));
  const NoiseAggregates agg = noise_aggregates(attack);
  const double predicted_gap =
      v11(config.mu, config.tau, one_mode_x_infimum()) -
      v11(config.mu, config.tau, agg.x);

  return {
      {"schema", "cvmdi-counterexample v1"},
      {"config",
       {{"command", "counterexample"},
        {"omega", config.omega},
        {"mu", config.mu},
        {"tau", config.tau},
        {"grid_steps", config.grid.steps},
        {"omega_max", config.grid.omega_max},
        {"tol", config.grid.tol}}},
      {"attack", to_json(attack)},
      {"attack_class", to_string(classify_attack(attack))},
      {"x", agg.x},
      {"x_prime", agg.x_prime},
      {"one_mode_x_infimum", one_mode_x_infimum()},
      {"report",
       {{"target_v11", report.target_v11},
        {"best_one_mode_v11", report.best_one_mode_v11},
        {"gap", report.gap},
        {"predicted_gap", predicted_gap},
        {"best_one_mode_params",
         {{"omega_a", report.best_omega_a}, {"omega_b", report.best_omega_b}}},
        {"best_x", report.best_x},
        {"cm_distance", report.cm_distance},
        {"matched", report.matched}}},
      {"target_cm", to_json(target)},
      {"best_one_mode_cm", to_json(best)}};
}

// ---------------------------------------------------------------------------
// rate-sweep

enum class Pipeline { Analytic, Numeric };

struct RateSweepConfig {
  std::string axis = "omega";  // mu | tau | omega | g | xi
  RangeSpec range{1.0, 1.5, 11};
  double mu = 10.0;
  double tau_a = 0.8;
  double tau_b = 0.8;
  double omega_a = 1.0;
  double omega_b = 1.0;
  double g = 0.0;
  double g_prime = 0.0;
  double xi = 1.0;
  Reconciliation direction = Reconciliation::DirectOnBob;
  Pipeline pipeline = Pipeline::Analytic;
};

struct SweepRow {
  double value = 0.0;
  bool physical = true;
  RateResult rate;
};

namespace detail {

inline void apply_axis(const std::string& axis, double v,
                       ProtocolParams& params, TwoModeAttack& attack,
                       RateConfig& rate) {
  if (axis == "mu") {
    params.mu = v;
  } else if (axis == "tau") {
    params.tau_a = params.tau_b = v;
  } else if (axis == "omega") {
    attack.omega_a = attack.omega_b = v;
  } else if (axis == "g") {
    attack.g = v;
    attack.g_prime = -v;
  } else if (axis == "xi") {
    rate.efficiency = v;
  }
}

}  // namespace detail

/// Sweeping g follows the symmetric family g' = -g. Protocol and rate
/// parameters must stay in range over the whole sweep; attack points that
/// leave the physical set are kept and flagged.
inline std::vector<SweepRow> rate_sweep(const RateSweepConfig& config) {
  const std::string& axis = config.axis;
  cvmdi::detail::require(axis == "mu" || axis == "tau" || axis == "omega" ||
                             axis == "g" || axis == "xi",
                         "sweep axis must be one of mu, tau, omega, g, xi");
  config.range.validate();
  // Validate every protocol/rate point before computing anything.
  for (int i = 0; i < config.range.steps; ++i) {
    ProtocolParams params{config.mu, config.tau_a, config.tau_b};
    TwoModeAttack attack{config.omega_a, config.omega_b, config.g,
                         config.g_prime};
    RateConfig rate{config.xi, config.direction, Detection::Heterodyne};
    detail::apply_axis(axis, config.range.at(i), params, attack, rate);
    params.validate();
    rate.validate();
    cvmdi::detail::require(
        config.pipeline == Pipeline::Numeric || params.is_symmetric(),
        "analytic pipeline needs tau_a == tau_b; use --pipeline numeric");
  }

  std::vector<SweepRow> rows;
  for (int i = 0; i < config.range.steps; ++i) {
    ProtocolParams params{config.mu, config.tau_a, config.tau_b};
    TwoModeAttack attack{config.omega_a, config.omega_b, config.g,
                         config.g_prime};
    RateConfig rate{config.xi, config.direction, Detection::Heterodyne};
    SweepRow row;
    row.value = config.range.at(i);
    detail::apply_axis(axis, row.value, params, attack, rate);
    if (classify_attack(attack) == AttackClass::Unphysical) {
      row.physical = false;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.rate = {nan, nan, nan};
    } else {
      const ConditionalCM cm = config.pipeline == Pipeline::Analytic
                                   ? conditional_cm_analytic(params, attack)
                                   : conditional_cm_numeric(params, attack);
      row.rate = key_rate(cm, rate);
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::string run_rate_sweep(const RateSweepConfig& config) {
  const auto rows = rate_sweep(config);
  const nlohmann::json echo = {
      {"command", "rate-sweep"},
      {"axis", config.axis},
      {"range", to_json(config.range)},
      {"mu", config.mu},
      {"tau_a", config.tau_a},
      {"tau_b", config.tau_b},
      {"omega_a", config.omega_a},
      {"omega_b", config.omega_b},
      {"g", config.g},
      {"g_prime", config.g_prime},
      {"xi", config.xi},
      {"direction", to_string(config.direction)},
      {"pipeline",
       config.pipeline == Pipeline::Analytic ? "analytic" : "numeric"}};
  std::ostringstream os;
  os << csv_preamble("cvmdi-rate-sweep v1", echo) << config.axis
     << ",I,chi,R,physical\n";
  for (const auto& r : rows) {
    os << format_double(r.value) << ',' << format_double(r.rate.mutual_information)
       << ',' << format_double(r.rate.holevo) << ',' << format_double(r.rate.rate)
       << ',' << (r.physical ? 1 : 0) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// validate-mc

struct ValidateMcConfig {
  double mu = 10.0;
  double tau_a = 0.6;
  double tau_b = 0.6;
  double omega_a = 1.5;
  double omega_b = 1.5;
  double g = 0.4;
  double g_prime = -0.4;
  std::int64_t n = 1000000;
  std::uint64_t seed = 1;
  double z_threshold = 5.0;
  double tau_rel_tolerance = 0.01;
};

inline nlohmann::json run_validate_mc(const ValidateMcConfig& config) {
  cvmdi::detail::require(config.n >= kMinValidationTrials,
                         "validate-mc needs n >= 1000");
  const ProtocolParams params{config.mu, config.tau_a, config.tau_b};
  params.validate();
  cvmdi::detail::require(params.mu > 1.0, "validate-mc needs mu > 1");
  const TwoModeAttack attack{config.omega_a, config.omega_b, config.g,
                             config.g_prime};
  attack_cm(attack);

  const TrialDataset data = simulate_runs(params, attack, config.n, config.seed);
  const Reconstruction rec = reconstruct_conditional_cm(data);
  const bool symmetric = params.is_symmetric();
  const ConditionalCM reference = symmetric
                                      ? conditional_cm_analytic(params, attack)
                                      : conditional_cm_numeric(params, attack);

  nlohmann::json z = nlohmann::json::array();
  double max_abs_z = 0.0;
  for (int i = 0; i < 4; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < 4; ++j) {
      const double zij =
          (rec.cm(i, j) - reference(i, j)) / rec.standard_errors(i, j);
      max_abs_z = std::max(max_abs_z, std::abs(zij));
      row.push_back(zij);
    }
    z.push_back(row);
  }
  nlohmann::json se = nlohmann::json::array();
  for (int i = 0; i < 4; ++i) {
    se.push_back({rec.standard_errors(i, 0), rec.standard_errors(i, 1),
                  rec.standard_errors(i, 2), rec.standard_errors(i, 3)});
  }
  const double err_a =
      params.tau_a > 0.0 ? std::abs(rec.tau.tau_a - params.tau_a) / params.tau_a
                         : std::abs(rec.tau.tau_a);
  const double err_b =
      params.tau_b > 0.0 ? std::abs(rec.tau.tau_b - params.tau_b) / params.tau_b
                         : std::abs(rec.tau.tau_b);
  const bool pass = max_abs_z < config.z_threshold &&
                    err_a <= config.tau_rel_tolerance &&
                    err_b <= config.tau_rel_tolerance;

  return {{"schema", "cvmdi-validate-mc v1"},
          {"config",
           {{"command", "validate-mc"},
            {"params", to_json(params)},
            {"attack", to_json(attack)},
            {"n", config.n},
            {"seed", config.seed}}},
          {"reference", symmetric ? "analytic" : "numeric"},
          {"tau_hat", {{"tau_a", rec.tau.tau_a}, {"tau_b", rec.tau.tau_b}}},
          {"tau_rel_error", {{"tau_a", err_a}, {"tau_b", err_b}}},
          {"reconstructed_cm", to_json(rec.cm)},
          {"reference_cm", to_json(reference)},
          {"standard_errors", se},
          {"z_scores", z},
          {"max_abs_z", max_abs_z},
          {"pass", pass}};
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateConfig {
  ProtocolParams params{10.0, 0.6, 0.6};
  TwoModeAttack attack{1.5, 1.5, 0.4, -0.4};
  std::int64_t n = 10000;
  std::uint64_t seed = 1;
};

struct SimulateOutput {
  std::string csv;
  std::string sidecar;
};

inline SimulateOutput run_simulate(const SimulateConfig& config) {
  const TrialDataset data =
      simulate_runs(config.params, config.attack, config.n, config.seed);
  std::ostringstream os;
  write_dataset_csv(data, os);
  return {os.str(), dataset_sidecar(data).dump(2) + "\n"};
}

}  // namespace cvmdi::cli

#endif  // CVMDI_COMMANDS_HPP

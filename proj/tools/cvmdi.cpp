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


// cvmdi: figure-ready data for the CV-MDI-QKD attack analysis.
//
// Exit codes: 0 ok, 1 input error, 2 internal consistency failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cvmdi/commands.hpp"

namespace {

using namespace cvmdi;

void emit(const std::string& out, const std::string& content) {
  if (out.empty()) {
    std::cout << content;
    return;
  }
  cli::write_atomically(cli::resolve_output_path(out), content);
}

void add_attack_flags(CLI::App* cmd, TwoModeAttack& a) {
  cmd->add_option("--omega-a", a.omega_a, "thermal variance on Alice's link");
  cmd->add_option("--omega-b", a.omega_b, "thermal variance on Bob's link");
  cmd->add_option("--g", a.g, "q-quadrature correlation");
  cmd->add_option("--gp", a.g_prime, "p-quadrature correlation");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-attack analysis of CV-MDI-QKD"};
  app.require_subcommand(1);
  std::string out;
  app.add_option("-o,--out", out,
                 "output file (relative paths resolve against "
                 "$CVMDI_OUTPUT_DIR); stdout if omitted");

  std::string omega_range = "1:5:200", g_range = "0:5:200";
  auto* regions = app.add_subcommand("regions", "classify the (omega, g) plane");
  regions->add_option("--omega", omega_range, "start:stop:steps");
  regions->add_option("--g", g_range, "start:stop:steps");

  cli::CounterexampleConfig cex;
  auto* counter = app.add_subcommand(
      "counterexample", "entangled attack that one-mode attacks cannot match");
  counter->add_option("--omega", cex.omega, "thermal variance (> 1)")->required();
  counter->add_option("--mu", cex.mu, "EB source variance");
  counter->add_option("--tau", cex.tau, "link transmissivity");
  counter->add_option("--grid-steps", cex.grid.steps, "one-mode search grid");
  counter->add_option("--omega-max", cex.grid.omega_max,
                      "one-mode search bound (<= 0: automatic)");

  cli::RateSweepConfig sweep;
  std::string sweep_range = "1:1.5:11", direction = "direct",
              pipeline = "analytic";
  double sweep_omega = -1.0, sweep_tau = -1.0;
  TwoModeAttack sweep_attack{1.0, 1.0, 0.0, 0.0};
  auto* rate = app.add_subcommand("rate-sweep", "key rate along one axis");
  rate->add_option("--axis", sweep.axis, "mu | tau | omega | g | xi");
  rate->add_option("--range", sweep_range, "start:stop:steps");
  rate->add_option("--mu", sweep.mu, "EB source variance");
  rate->add_option("--tau", sweep_tau, "symmetric transmissivity");
  rate->add_option("--tau-a", sweep.tau_a, "Alice's transmissivity");
  rate->add_option("--tau-b", sweep.tau_b, "Bob's transmissivity");
  rate->add_option("--omega", sweep_omega, "symmetric thermal variance");
  add_attack_flags(rate, sweep_attack);
  rate->add_option("--xi", sweep.xi, "reconciliation efficiency");
  rate->add_option("--direction", direction, "direct | reverse");
  rate->add_option("--pipeline", pipeline, "analytic | numeric");

  cli::ValidateMcConfig mc;
  TwoModeAttack mc_attack{mc.omega_a, mc.omega_b, mc.g, mc.g_prime};
  double mc_tau = -1.0;
  auto* validate = app.add_subcommand(
      "validate-mc", "Monte Carlo reconstruction against the analytic CM");
  validate->add_option("--mu", mc.mu, "EB source variance");
  validate->add_option("--tau", mc_tau, "symmetric transmissivity");
  validate->add_option("--tau-a", mc.tau_a, "Alice's transmissivity");
  validate->add_option("--tau-b", mc.tau_b, "Bob's transmissivity");
  add_attack_flags(validate, mc_attack);
  validate->add_option("--n", mc.n, "number of trials (>= 1000)");
  validate->add_option("--seed", mc.seed, "RNG seed");

  cli::SimulateConfig sim;
  double sim_tau = -1.0;
  auto* simulate = app.add_subcommand(
      "simulate", "write a trial dataset (CSV + JSON sidecar; needs --out)");
  simulate->add_option("--mu", sim.params.mu, "EB source variance");
  simulate->add_option("--tau", sim_tau, "symmetric transmissivity");
  simulate->add_option("--tau-a", sim.params.tau_a, "Alice's transmissivity");
  simulate->add_option("--tau-b", sim.params.tau_b, "Bob's transmissivity");
  add_attack_flags(simulate, sim.attack);
  simulate->add_option("--n", sim.n, "number of trials");
  simulate->add_option("--seed", sim.seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (regions->parsed()) {
      emit(out, cli::run_regions(
                    {cli::parse_range(omega_range), cli::parse_range(g_range)}));
    } else if (counter->parsed()) {
      emit(out, cli::run_counterexample(cex).dump(2) + "\n");
    } else if (rate->parsed()) {
      sweep.range = cli::parse_range(sweep_range);
      if (sweep_tau >= 0.0) sweep.tau_a = sweep.tau_b = sweep_tau;
      if (sweep_omega >= 0.0) sweep_attack.omega_a = sweep_attack.omega_b = sweep_omega;
      sweep.omega_a = sweep_attack.omega_a;
      sweep.omega_b = sweep_attack.omega_b;
      sweep.g = sweep_attack.g;
      sweep.g_prime = sweep_attack.g_prime;
      if (direction == "direct") {
        sweep.direction = Reconciliation::DirectOnBob;
      } else if (direction == "reverse") {
        sweep.direction = Reconciliation::ReverseOnAlice;
      } else {
        throw ValidationError("direction must be direct or reverse");
      }
      if (pipeline == "analytic") {
        sweep.pipeline = cli::Pipeline::Analytic;
      } else if (pipeline == "numeric") {
        sweep.pipeline = cli::Pipeline::Numeric;
      } else {
        throw ValidationError("pipeline must be analytic or numeric");
      }
      emit(out, cli::run_rate_sweep(sweep));
    } else if (validate->parsed()) {
      if (mc_tau >= 0.0) mc.tau_a = mc.tau_b = mc_tau;
      mc.omega_a = mc_attack.omega_a;
      mc.omega_b = mc_attack.omega_b;
      mc.g = mc_attack.g;
      mc.g_prime = mc_attack.g_prime;
      emit(out, cli::run_validate_mc(mc).dump(2) + "\n");
    } else if (simulate->parsed()) {
      if (out.empty()) throw ValidationError("simulate needs --out");
      if (sim_tau >= 0.0) sim.params.tau_a = sim.params.tau_b = sim_tau;
      const auto result = cli::run_simulate(sim);
      const auto path = cli::resolve_output_path(out);
      auto sidecar = path;
      sidecar += ".json";
      cli::write_atomically(sidecar, result.sidecar);
      cli::write_atomically(path, result.csv);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ConsistencyError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

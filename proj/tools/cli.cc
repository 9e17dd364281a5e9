//
// Copyright 2026 The dproute Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "cli.h"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dproute/error.h"
#include "dproute/harness.h"

namespace dproute {
namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

ExperimentConfig ResolveConfig(const CommonFlags& flags) {
  ExperimentConfig config = LoadConfig(flags.config_path);
  if (flags.seed) config.seed = *flags.seed;
  if (!flags.out_dir.empty()) {
    config.output_dir = std::filesystem::absolute(flags.out_dir).lexically_normal().string();
  }
  return config;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Differentially private routing policies on road networks", "dproute"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonFlags flags;
  app.add_option("--config", flags.config_path, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--seed", flags.seed, "Override the config seed");
  app.add_option("--out-dir", flags.out_dir, "Override the output directory");

  auto* solve_private = app.add_subcommand("solve-private", "Run the private solver once");
  auto* solve_baseline = app.add_subcommand("solve-baseline", "Run the Frank-Wolfe baseline");
  auto* audit = app.add_subcommand("audit", "Check sensitivity on adjacent datasets");
  std::size_t trials = 0;
  audit->add_option("--trials", trials, "Number of trials (default: config audit_trials)")
      ->check(CLI::PositiveNumber);
  auto* demo = app.add_subcommand("demo-impossibility",
                                  "Show the net-flow leak of the standard formulation");
  int origin = 0;
  int destination = 0;
  demo->add_option("--origin", origin, "Origin node (1-based)")->required();
  demo->add_option("--destination", destination, "Destination node (1-based)")->required();
  auto* experiment = app.add_subcommand("experiment", "Run an experiment grid");
  experiment->require_subcommand(1);
  auto* convergence = experiment->add_subcommand("convergence", "Cost ratio per iteration");
  auto* privacy_cost = experiment->add_subcommand("privacy-cost", "Cost of the noise");
  auto* sweep = experiment->add_subcommand("sweep", "Sensitivity to alpha, latency, demand");
  auto* decompose = app.add_subcommand("decompose", "Split a policy into path distributions");
  std::string policy_path;
  decompose->add_option("--policy", policy_path, "Policy CSV")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    const ExperimentConfig config = ResolveConfig(flags);
    const std::filesystem::path out_dir = config.Resolve(config.output_dir);
    if (*solve_private) {
      const PrivateSolution solution = RunSolvePrivate(config, out_dir);
      out << "sigma=" << solution.sigma << "\n";
    } else if (*solve_baseline) {
      const FrankWolfeResult result = RunSolveBaseline(config, out_dir);
      out << "iterations=" << result.trace.size() << " gap=" << result.gap << "\n";
    } else if (*audit) {
      const AuditReport report =
          RunAudit(config, trials > 0 ? trials : config.audit_trials, out_dir);
      out << report.Summary() << "\n";
    } else if (*demo) {
      const ImpossibilityReport report =
          RunDemoImpossibility(config, {origin - 1, destination - 1}, out_dir);
      out << report.Summary() << "\n";
    } else if (*convergence) {
      RunConvergence(config, out_dir);
    } else if (*privacy_cost) {
      RunPrivacyCost(config, out_dir);
    } else if (*sweep) {
      RunSensitivitySweep(config, out_dir);
    } else if (*decompose) {
      RunDecompose(config, policy_path, out_dir);
    }
    out << "wrote " << out_dir.string() << "\n";
    return 0;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dproute

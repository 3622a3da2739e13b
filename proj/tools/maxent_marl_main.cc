// Copyright 2026 The maxent_marl Authors.
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

// Command-line front end: solve, qre, baseline, sweep-alpha,
// replicate-appendix-b and validate.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maxent_marl/error.h"
#include "maxent_marl/experiment.h"
#include "maxent_marl/game.h"

namespace {

using maxent_marl::ExperimentSpec;
using maxent_marl::ResultRecord;
using maxent_marl::SolverKind;

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitReplicationMismatch = 3;

struct GlobalFlags {
  std::uint64_t seed = 0;
  double tol = 0.0;
  int max_iters = 0;
  std::string out;
  bool quiet = false;
  bool has_seed = false;
  bool has_tol = false;
  bool has_max_iters = false;
};

std::string ResolveOutputDir(const GlobalFlags& flags,
                             const std::string& from_spec) {
  if (!flags.out.empty()) return flags.out;
  if (!from_spec.empty()) return from_spec;
  if (const char* env = std::getenv("MAXENT_MARL_OUT"); env && *env) {
    return env;
  }
  return "maxent_marl_out";
}

void ApplyFlags(const GlobalFlags& flags, ExperimentSpec& spec) {
  if (flags.has_seed) spec.seed = flags.seed;
  if (flags.has_tol) spec.tol_policy = flags.tol;
  if (flags.has_max_iters) {
    spec.max_iters = flags.max_iters;
    spec.baseline.iterations = flags.max_iters;
  }
}

std::string FormatRow(std::span<const double> row) {
  std::string out = "(";
  for (std::size_t a = 0; a < row.size(); ++a) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%s%.6g", a ? ", " : "", row[a]);
    out += buffer;
  }
  return out + ")";
}

void PrintRecord(const ResultRecord& record) {
  std::printf("solver=%s alpha=%g status=%s iterations=%d J=%.6g",
              maxent_marl::ToString(record.solver).c_str(), record.alpha,
              maxent_marl::ToString(record.status).c_str(),
              record.trace.iterations, record.final_objective);
  if (!std::isnan(record.final_residual)) {
    std::printf(" qre_residual=%.3g", record.final_residual);
  }
  std::printf(" seconds=%.3g\n", record.wall_clock_seconds);
  for (const auto& agent : record.final_policy.agents()) {
    for (int s = 0; s < agent.num_states(); ++s) {
      std::printf("  agent %d state %d: %s\n", agent.agent_id(), s,
                  FormatRow(agent.row(s)).c_str());
    }
  }
}

bool SolverAllowed(const std::string& command, SolverKind solver) {
  if (command == "solve") {
    return solver == SolverKind::kHaspi || solver == SolverKind::kMasac ||
           solver == SolverKind::kMehaml;
  }
  if (command == "qre") return solver == SolverKind::kQreOracle;
  return solver == SolverKind::kMappo || solver == SolverKind::kHappo;
}

int RunSingle(const std::string& command, const std::string& path,
              const GlobalFlags& flags) {
  const SolverKind fallback = command == "qre"        ? SolverKind::kQreOracle
                              : command == "baseline" ? SolverKind::kMappo
                                                      : SolverKind::kHaspi;
  ExperimentSpec spec = maxent_marl::LoadExperimentSpec(path, fallback);
  if (!SolverAllowed(command, spec.solver)) {
    throw maxent_marl::InvalidInput(
        "solver '" + maxent_marl::ToString(spec.solver) +
        "' cannot run under '" + command +
        "' (solve: haspi, masac, mehaml; qre: qre-oracle; baseline: mappo, "
        "happo)");
  }
  if (spec.alphas.size() > 1) {
    throw maxent_marl::InvalidInput(
        "spec lists several alphas; use sweep-alpha");
  }
  ApplyFlags(flags, spec);
  const ResultRecord record = maxent_marl::RunExperiment(spec);
  const std::string dir = ResolveOutputDir(flags, spec.output_dir);
  maxent_marl::WriteResult(record, dir, spec.output_name);
  if (!flags.quiet) {
    PrintRecord(record);
    std::printf("wrote %s/%s_{trace.csv,summary.json}\n", dir.c_str(),
                spec.output_name.c_str());
  }
  // Baselines run a fixed iteration budget, so finishing it is success.
  if (command == "baseline") return kExitOk;
  return record.status == maxent_marl::SolveStatus::kConverged
             ? kExitOk
             : kExitNonConvergence;
}

int RunSweep(const std::string& path, const GlobalFlags& flags) {
  ExperimentSpec spec = maxent_marl::LoadExperimentSpec(path);
  ApplyFlags(flags, spec);
  const auto outcomes = maxent_marl::SweepAlpha(spec);
  const std::string dir = ResolveOutputDir(flags, spec.output_dir);
  bool any_error = false;
  bool any_unconverged = false;
  for (std::size_t b = 0; b < outcomes.size(); ++b) {
    const auto& outcome = outcomes[b];
    if (!outcome.result) {
      any_error = true;
      std::fprintf(stderr, "alpha=%g failed: %s\n", outcome.alpha,
                   outcome.error.c_str());
      continue;
    }
    if (outcome.result->status != maxent_marl::SolveStatus::kConverged) {
      any_unconverged = true;
    }
    maxent_marl::WriteResult(*outcome.result, dir,
                             spec.output_name + "_alpha" + std::to_string(b));
    if (!flags.quiet) PrintRecord(*outcome.result);
  }
  maxent_marl::WriteFileAtomic(
      (std::filesystem::path(dir) / (spec.output_name + "_sweep.csv")).string(),
      maxent_marl::SweepCsv(outcomes));
  if (!flags.quiet) {
    std::printf("wrote %s/%s_sweep.csv\n", dir.c_str(),
                spec.output_name.c_str());
  }
  if (any_error) return kExitInvalidInput;
  return any_unconverged ? kExitNonConvergence : kExitOk;
}

int RunReplication(const GlobalFlags& flags, double cell_tol) {
  const maxent_marl::ReplicationTable table =
      maxent_marl::ReplicateAppendixB(cell_tol);
  if (!flags.quiet) {
    std::printf("%-6s %-26s %-26s %s\n", "alpha", "first update",
                "convergent", "iterations");
    for (const auto& row : table.rows) {
      char first[64];
      char convergent[64];
      std::snprintf(first, sizeof(first), "(%.4f, %.4f, %.4f)",
                    row.first_update[0], row.first_update[1],
                    row.first_update[2]);
      std::snprintf(convergent, sizeof(convergent), "(%.4f, %.4f, %.4f)",
                    row.convergent[0], row.convergent[1], row.convergent[2]);
      std::printf("%-6g %-26s %-26s %d\n", row.alpha, first, convergent,
                  row.iterations);
    }
    std::printf("tolerance per cell: %g\n", table.tolerance);
  }
  const std::string dir = ResolveOutputDir(flags, "");
  const std::string csv =
      (std::filesystem::path(dir) / "appendix_b.csv").string();
  maxent_marl::WriteFileAtomic(csv, maxent_marl::ReplicationCsv(table));
  if (!flags.quiet) std::printf("wrote %s\n", csv.c_str());
  for (const std::string& mismatch : table.mismatches) {
    std::fprintf(stderr, "mismatch: %s\n", mismatch.c_str());
  }
  return table.ok() ? kExitOk : kExitReplicationMismatch;
}

int RunValidate(const std::string& path, const GlobalFlags& flags) {
  const maxent_marl::CooperativeMarkovGame game = maxent_marl::LoadGame(path);
  if (!flags.quiet) {
    std::string counts;
    for (int c : game.action_counts()) {
      counts += (counts.empty() ? "" : "x") + std::to_string(c);
    }
    std::printf("valid: %d agents, %d states, actions %s, gamma %g\n",
                game.num_agents(), game.num_states(), counts.c_str(),
                game.gamma());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum-entropy cooperative multi-agent solvers"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  auto* seed = app.add_option("--seed", flags.seed, "Base seed");
  auto* tol = app.add_option("--tol", flags.tol, "Policy convergence tolerance")
                  ->check(CLI::PositiveNumber);
  auto* max_iters =
      app.add_option("--max-iters", flags.max_iters, "Outer iteration limit")
          ->check(CLI::NonNegativeNumber);
  app.add_option("--out", flags.out,
                 "Output directory (default $MAXENT_MARL_OUT)");
  app.add_flag("--quiet", flags.quiet, "Suppress progress output");

  std::string path;
  auto* solve = app.add_subcommand("solve", "Run haspi, masac or mehaml");
  solve->add_option("spec", path, "Experiment spec (JSON)")->required();
  auto* qre = app.add_subcommand("qre", "Run the logit-QRE oracle");
  qre->add_option("spec", path, "Experiment spec (JSON)")->required();
  auto* baseline = app.add_subcommand("baseline", "Run mappo or happo");
  baseline->add_option("spec", path, "Experiment spec (JSON)")->required();
  auto* sweep = app.add_subcommand("sweep-alpha", "Run one solve per alpha");
  sweep->add_option("spec", path, "Experiment spec (JSON)")->required();
  auto* replicate = app.add_subcommand(
      "replicate-appendix-b", "Recompute the 3x3 coordination-game table");
  double cell_tol = 5e-4;
  replicate
      ->add_option("--cell-tol", cell_tol,
                   "Largest accepted difference per table cell")
      ->check(CLI::NonNegativeNumber);
  auto* validate = app.add_subcommand("validate", "Check a game file");
  validate->add_option("game", path, "Game file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }
  flags.has_seed = seed->count() > 0;
  flags.has_tol = tol->count() > 0;
  flags.has_max_iters = max_iters->count() > 0;

  try {
    if (solve->parsed()) return RunSingle("solve", path, flags);
    if (qre->parsed()) return RunSingle("qre", path, flags);
    if (baseline->parsed()) return RunSingle("baseline", path, flags);
    if (sweep->parsed()) return RunSweep(path, flags);
    if (replicate->parsed()) return RunReplication(flags, cell_tol);
    if (validate->parsed()) return RunValidate(path, flags);
  } catch (const maxent_marl::SpecError& e) {
    for (const std::string& problem : e.problems()) {
      std::fprintf(stderr, "error: %s\n", problem.c_str());
    }
    return kExitInvalidInput;
  } catch (const maxent_marl::InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalidInput;
  } catch (const maxent_marl::NonConvergence& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}

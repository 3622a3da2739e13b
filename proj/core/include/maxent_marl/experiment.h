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

#ifndef MAXENT_MARL_EXPERIMENT_H_
#define MAXENT_MARL_EXPERIMENT_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maxent_marl/baselines.h"
#include "maxent_marl/error.h"
#include "maxent_marl/game.h"
#include "maxent_marl/mehaml.h"
#include "maxent_marl/solve_trace.h"

namespace maxent_marl {

// Input problems gathered in one pass (parse errors, unknown keys, game
// invariant violations). what() joins them with newlines.
class SpecError : public InvalidInput {
 public:
  explicit SpecError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// ---------------------------------------------------------------------------
// Game files
//
// JSON object, either the single-state shorthand
//   {"matrix": [[r(0,0), r(0,1), ...], ...]}
// or the dense form
//   {"n_agents": n, "states": |S| or ["label", ...], "action_counts": [...],
//    "gamma": g, "initial_dist": [...],
//    "reward": [[r(s, joint) for joint] for s],
//    "transition": [[[P(s'|s, joint) for s'] for joint] for s]}
// Joint actions are flattened row-major in agent order. "transition" may be
// omitted when there is one state.
// ---------------------------------------------------------------------------

CooperativeMarkovGame ParseGame(const std::string& text,
                                const std::string& source = "<string>");
CooperativeMarkovGame LoadGame(const std::string& path);
// Dense form, shortest round-trip decimal for every double.
std::string SerializeGame(const CooperativeMarkovGame& game);
void SaveGame(const CooperativeMarkovGame& game, const std::string& path);

// ---------------------------------------------------------------------------
// Experiment specs
// ---------------------------------------------------------------------------

enum class SolverKind { kHaspi, kMasac, kMehaml, kMappo, kHappo, kQreOracle };

std::string ToString(SolverKind solver);

struct ExperimentSpec {
  std::optional<CooperativeMarkovGame> game;
  std::string game_source;
  SolverKind solver = SolverKind::kHaspi;
  std::vector<double> alphas = {1.0};
  std::optional<JointPolicy> initial_policy;  // unset = uniform
  std::uint64_t seed = 0;
  double tol_policy = 1e-10;
  EvaluationOptions evaluation;
  int max_iters = 10000;
  bool record_trace = true;

  // haspi / mehaml
  PermutationRule::Kind permutation_kind = PermutationRule::Kind::kRandom;
  std::vector<int> fixed_order;

  // mehaml
  std::string drift = "trivial";
  double drift_coef = 0.0;
  std::string neighborhood = "full";
  double neighborhood_radius = 0.0;
  MehamlUpdateMode mode = MehamlUpdateMode::kClosedForm;
  std::optional<StateWeighting> state_weighting;

  // mappo / happo
  BaselineOptions baseline;

  // qre-oracle
  double damping = 0.5;

  std::string output_dir;
  std::string output_name = "run";

  const CooperativeMarkovGame& resolved_game() const;
  JointPolicy ResolvedInitialPolicy() const;
  // Permutation rule for sweep branch `branch`; random orders draw from the
  // counter-derived stream DeriveSeed(seed, branch).
  PermutationRule ResolvedPermutationRule(int branch) const;
};

// Relative "game" paths resolve against base_dir. Unknown keys and keys that
// do not apply to the chosen solver are rejected.
// `default_solver` applies when the spec has no "solver" key.
ExperimentSpec ParseExperimentSpec(
    const std::string& text, const std::string& base_dir = ".",
    SolverKind default_solver = SolverKind::kHaspi);
ExperimentSpec LoadExperimentSpec(
    const std::string& path, SolverKind default_solver = SolverKind::kHaspi);
SolverKind ParseSolverName(const std::string& name);

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct ResultRecord {
  SolverKind solver = SolverKind::kHaspi;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  SolveTrace trace;
  JointPolicy final_policy;
  double final_objective = 0.0;
  double final_residual = 0.0;  // NaN for baselines
  SolveStatus status = SolveStatus::kMaxIters;
  std::vector<int> greedy_joint_action;  // at state 0
  double wall_clock_seconds = 0.0;
};

// Runs alphas[branch] (baselines ignore alpha). Deterministic in (spec, branch)
// apart from wall_clock_seconds.
ResultRecord RunExperiment(const ExperimentSpec& spec, int branch = 0);

// CSV columns, in order:
//   iteration, objective, qre_residual, policy_change, permutation,
//   pi_<agent>_<state>_<action> for every agent, state, action.
// permutation is agents joined by '-'; NaN cells are left empty.
std::string TraceCsvHeader(const JointPolicy& policy);
std::string TraceCsv(const ResultRecord& record);
std::string SummaryJson(const ResultRecord& record);

// Writes <dir>/<name>_trace.csv and <dir>/<name>_summary.json, each through a
// temporary file and rename.
void WriteResult(const ResultRecord& record, const std::string& dir,
                 const std::string& name);

void WriteFileAtomic(const std::string& path, const std::string& content);

struct SweepOutcome {
  double alpha = 0.0;
  std::optional<ResultRecord> result;
  std::string error;  // set when the branch threw
};

// One branch per alpha, run concurrently. A failing branch does not stop the
// others.
std::vector<SweepOutcome> SweepAlpha(const ExperimentSpec& spec);

// The trace columns prefixed by alpha; failed branches are omitted.
std::string SweepCsv(const std::vector<SweepOutcome>& outcomes);

// ---------------------------------------------------------------------------
// Exact-calculation replication for the 3x3 coordination game
// ---------------------------------------------------------------------------

struct ReplicationRow {
  double alpha = 0.0;
  std::array<double, 3> first_update{};       // agent 0 after one sweep
  std::array<double, 3> convergent{};         // agent 0 at the limit
  std::array<double, 3> convergent_other{};   // agent 1 at the limit
  std::array<double, 3> reference_first{};
  std::array<double, 3> reference_convergent{};
  int iterations = 0;
};

struct ReplicationTable {
  std::vector<ReplicationRow> rows;
  double tolerance = 5e-4;
  std::vector<std::string> mismatches;

  bool ok() const { return mismatches.empty(); }
};

// Alphas {1, 2, 5, 10, 15, 20}, start (0.6, 0.2, 0.2) for both agents,
// update order (agent 0, agent 1). A cell mismatches when it differs from the
// reference by more than `tolerance`.
ReplicationTable ReplicateAppendixB(double tolerance = 5e-4);
std::string ReplicationCsv(const ReplicationTable& table);

}  // namespace maxent_marl

#endif  // MAXENT_MARL_EXPERIMENT_H_

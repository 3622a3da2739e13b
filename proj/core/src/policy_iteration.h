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

#ifndef MAXENT_MARL_SRC_POLICY_ITERATION_H_
#define MAXENT_MARL_SRC_POLICY_ITERATION_H_

#include <functional>

#include "maxent_marl/game.h"
#include "maxent_marl/soft_dp.h"
#include "maxent_marl/solve_trace.h"

namespace maxent_marl::internal {

struct LoopSettings {
  double alpha = 1.0;
  double tol_policy = 1e-10;
  EvaluationOptions evaluation;
  int max_outer_iters = 10000;
  bool record_trace = true;
  // Simultaneous updates record no permutation.
  bool sequential = true;
  PermutationRule permutation_rule = PermutationRule::Random(0);
};

using ImproveFn = std::function<JointPolicy(
    const SoftQTable& q_old, const JointPolicy& policy_old,
    const Permutation& order)>;

// Evaluate / improve / record loop shared by the soft solvers.
SolveResult RunPolicyIteration(const CooperativeMarkovGame& game,
                               const JointPolicy& initial_policy,
                               const LoopSettings& settings,
                               const ImproveFn& improve);

}  // namespace maxent_marl::internal

#endif  // MAXENT_MARL_SRC_POLICY_ITERATION_H_

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

#ifndef MAXENT_MARL_HASPI_H_
#define MAXENT_MARL_HASPI_H_

#include <span>
#include <vector>

#include "maxent_marl/game.h"
#include "maxent_marl/soft_dp.h"
#include "maxent_marl/solve_trace.h"

namespace maxent_marl {

struct HaspiOptions {
  double alpha = 1.0;
  // Stop once max_{i,s,a} |pi_{k+1} - pi_k| < tol_policy.
  double tol_policy = 1e-10;
  EvaluationOptions evaluation;
  int max_outer_iters = 10000;
  PermutationRule permutation_rule = PermutationRule::Random(0);
  // Without a trace only the final iterate is recorded.
  bool record_trace = true;

  // Throws InvalidInput for alpha <= 0 or non-positive tolerances.
  void Validate() const;
};

// Q-bar(s, a) = E_{a^{prefix} ~ pi_new^{prefix}}[Q^{prefix, i}_old(s, a^{prefix}, a)]
// as an |S| x |A^i| table. `updated_prefix` lists the already-updated agents
// in update order; every policy carries its own agent id.
std::vector<double> PrefixAveragedSoftQ(
    const CooperativeMarkovGame& game, const SoftQTable& q_old,
    const JointPolicy& policy_old, std::span<const AgentPolicy> updated_prefix,
    int agent, double alpha);

// Closed-form minimizer of the per-agent KL objective: per state,
// pi_new^i(a|s) proportional to exp(Q-bar(s, a) / alpha).
AgentPolicy BoltzmannLocalUpdate(const CooperativeMarkovGame& game,
                                 const SoftQTable& q_old,
                                 const JointPolicy& policy_old,
                                 std::span<const AgentPolicy> updated_prefix,
                                 int agent, double alpha);

// Sequential improvement along `order` against the supplied Q of policy_old.
JointPolicy HaspiImprove(const CooperativeMarkovGame& game,
                         const SoftQTable& q_old, const JointPolicy& policy_old,
                         const Permutation& order, double alpha);

// One evaluation of policy followed by HaspiImprove.
JointPolicy HaspiStep(const CooperativeMarkovGame& game,
                      const JointPolicy& policy, double alpha,
                      const Permutation& order,
                      const EvaluationOptions& evaluation = {});

// Simultaneous variant: every agent responds to the others' old policies.
JointPolicy MasacImprove(const CooperativeMarkovGame& game,
                         const SoftQTable& q_old, const JointPolicy& policy_old,
                         double alpha);

JointPolicy MasacStep(const CooperativeMarkovGame& game,
                      const JointPolicy& policy, double alpha,
                      const EvaluationOptions& evaluation = {});

// Alternates evaluation and HaspiImprove until the policy change drops below
// tol_policy. Hitting max_outer_iters is reported in the trace status, not
// thrown.
SolveResult HaspiSolve(const CooperativeMarkovGame& game,
                       const JointPolicy& initial_policy,
                       const HaspiOptions& options);

// The same loop with MasacImprove; the permutation rule is ignored.
SolveResult MasacSolve(const CooperativeMarkovGame& game,
                       const JointPolicy& initial_policy,
                       const HaspiOptions& options);

}  // namespace maxent_marl

#endif  // MAXENT_MARL_HASPI_H_

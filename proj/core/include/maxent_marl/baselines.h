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

#ifndef MAXENT_MARL_BASELINES_H_
#define MAXENT_MARL_BASELINES_H_

#include <span>
#include <vector>

#include "maxent_marl/game.h"
#include "maxent_marl/solve_trace.h"

namespace maxent_marl {

// Expected-update (no sampling, no ratio clipping) MAPPO and HAPPO on
// single-state, gamma = 0 games. Advantages are the standard ones (alpha = 0).

enum class BaselineAlgorithm { kMappo, kHappo };

struct BaselineOptions {
  enum class UpdateMode {
    // Jump to the vertex of the best surrogate coefficient (ties: lowest
    // action index).
    kArgmax,
    // Multiplicative weights p <- p * exp(step_size * c), renormalized.
    kMirror,
  };

  BaselineAlgorithm algorithm = BaselineAlgorithm::kMappo;
  UpdateMode update_mode = UpdateMode::kMirror;
  double step_size = 0.1;
  int iterations = 200;
  // Update order for HAPPO.
  Permutation order;

  void Validate(int num_agents) const;
};

std::string ToString(BaselineAlgorithm algorithm);

// Coefficients c(a^i) of the linear surrogate sum_a c(a) pi^i(a). The
// importance-weighted expectation over pi_old, with ratios for agent i and for
// the already-updated agents in `ratio_policies` (HAPPO), simplifies to
//   c(a^i) = sum_{a^{-i}} prod_{k updated} pi_new^k(a^k)
//                         prod_{k other} pi_old^k(a^k) A_old(a^i, a^{-i}).
// An empty `ratio_policies` gives the MAPPO coefficient.
std::vector<double> SurrogateCoefficients(
    const CooperativeMarkovGame& game, const JointPolicy& policy_old,
    int agent, std::span<const AgentPolicy> ratio_policies = {});

JointPolicy BaselineStep(const CooperativeMarkovGame& game,
                         const JointPolicy& policy,
                         const BaselineOptions& options);

// Runs options.iterations steps; the trace records the standard (alpha = 0)
// return of every iterate and a NaN QRE residual. Status is kConverged when
// the last step moved the policy by less than 1e-12.
SolveResult BaselineRun(const CooperativeMarkovGame& game,
                        const JointPolicy& initial_policy,
                        const BaselineOptions& options);

// Most likely action of every agent; ties go to the lowest index.
std::vector<int> GreedyJointAction(const JointPolicy& policy, int s = 0);

}  // namespace maxent_marl

#endif  // MAXENT_MARL_BASELINES_H_

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

#include "maxent_marl/haspi.h"

#include <string>

#include "maxent_marl/error.h"
#include "policy_iteration.h"

namespace maxent_marl {
namespace {

void CheckPrefix(const CooperativeMarkovGame& game,
                 std::span<const AgentPolicy> updated_prefix, int agent) {
  if (agent < 0 || agent >= game.num_agents()) {
    throw InvalidInput("agent index " + std::to_string(agent) +
                       " out of range");
  }
  std::vector<bool> seen(game.num_agents(), false);
  seen[agent] = true;
  for (const AgentPolicy& p : updated_prefix) {
    const int id = p.agent_id();
    if (id < 0 || id >= game.num_agents()) {
      throw InvalidInput("prefix agent " + std::to_string(id) +
                         " out of range");
    }
    if (seen[id]) {
      throw InvalidInput("agent " + std::to_string(id) +
                         " appears twice among the updated prefix and target");
    }
    if (p.num_states() != game.num_states() ||
        p.num_actions() != game.num_actions(id)) {
      throw InvalidInput("prefix policy shape of agent " + std::to_string(id) +
                         " does not match the game");
    }
    seen[id] = true;
  }
}

void CheckOptions(double alpha) {
  if (!(alpha > 0.0)) {
    throw InvalidInput("temperature alpha must be positive (got " +
                       std::to_string(alpha) + ")");
  }
}

}  // namespace

void HaspiOptions::Validate() const {
  CheckOptions(alpha);
  if (!(tol_policy > 0.0)) throw InvalidInput("tol_policy must be positive");
  if (!(evaluation.tol > 0.0)) throw InvalidInput("evaluation tol must be positive");
  if (max_outer_iters < 0) throw InvalidInput("max_outer_iters must be >= 0");
}

std::vector<double> PrefixAveragedSoftQ(
    const CooperativeMarkovGame& game, const SoftQTable& q_old,
    const JointPolicy& policy_old, std::span<const AgentPolicy> updated_prefix,
    int agent, double alpha) {
  CheckPrefix(game, updated_prefix, agent);
  std::vector<int> order;
  for (const AgentPolicy& p : updated_prefix) order.push_back(p.agent_id());
  order.push_back(agent);

  const MultiAgentSoftQ conditional =
      ComputeMultiAgentSoftQ(game, policy_old, q_old, order, alpha);
  const JointActionSpace& space = conditional.space();
  const int num_actions = game.num_actions(agent);
  const int prefix_len = static_cast<int>(updated_prefix.size());

  std::vector<double> averaged(
      static_cast<std::size_t>(game.num_states()) * num_actions, 0.0);
  for (int s = 0; s < game.num_states(); ++s) {
    for (int key = 0; key < space.size(); ++key) {
      double weight = 1.0;
      for (int m = 0; m < prefix_len; ++m) {
        weight *= updated_prefix[m].prob(s, space.ActionOf(key, m));
      }
      averaged[static_cast<std::size_t>(s) * num_actions +
               space.ActionOf(key, prefix_len)] +=
          weight * conditional.at(s, key);
    }
  }
  return averaged;
}

AgentPolicy BoltzmannLocalUpdate(const CooperativeMarkovGame& game,
                                 const SoftQTable& q_old,
                                 const JointPolicy& policy_old,
                                 std::span<const AgentPolicy> updated_prefix,
                                 int agent, double alpha) {
  CheckOptions(alpha);
  const std::vector<double> averaged = PrefixAveragedSoftQ(
      game, q_old, policy_old, updated_prefix, agent, alpha);
  const int num_actions = game.num_actions(agent);
  std::vector<double> table;
  table.reserve(averaged.size());
  for (int s = 0; s < game.num_states(); ++s) {
    const std::vector<double> row = BoltzmannRow(
        std::span<const double>(averaged).subspan(
            static_cast<std::size_t>(s) * num_actions, num_actions),
        alpha);
    table.insert(table.end(), row.begin(), row.end());
  }
  return AgentPolicy(agent, game.num_states(), num_actions, std::move(table));
}

JointPolicy HaspiImprove(const CooperativeMarkovGame& game,
                         const SoftQTable& q_old, const JointPolicy& policy_old,
                         const Permutation& order, double alpha) {
  if (order.size() != game.num_agents()) {
    throw InvalidInput("permutation size differs from the number of agents");
  }
  JointPolicy next = policy_old;
  std::vector<AgentPolicy> prefix;
  for (int m = 0; m < order.size(); ++m) {
    AgentPolicy updated =
        BoltzmannLocalUpdate(game, q_old, policy_old, prefix, order[m], alpha);
    next.set_agent(order[m], updated);
    prefix.push_back(std::move(updated));
  }
  return next;
}

JointPolicy HaspiStep(const CooperativeMarkovGame& game,
                      const JointPolicy& policy, double alpha,
                      const Permutation& order,
                      const EvaluationOptions& evaluation) {
  CheckOptions(alpha);
  const SoftQTable q = EvaluatePolicy(game, policy, alpha, evaluation);
  return HaspiImprove(game, q, policy, order, alpha);
}

JointPolicy MasacImprove(const CooperativeMarkovGame& game,
                         const SoftQTable& q_old, const JointPolicy& policy_old,
                         double alpha) {
  JointPolicy next = policy_old;
  for (int i = 0; i < game.num_agents(); ++i) {
    next.set_agent(i, BoltzmannLocalUpdate(game, q_old, policy_old, {}, i, alpha));
  }
  return next;
}

JointPolicy MasacStep(const CooperativeMarkovGame& game,
                      const JointPolicy& policy, double alpha,
                      const EvaluationOptions& evaluation) {
  CheckOptions(alpha);
  const SoftQTable q = EvaluatePolicy(game, policy, alpha, evaluation);
  return MasacImprove(game, q, policy, alpha);
}

namespace {

internal::LoopSettings ToLoopSettings(const HaspiOptions& options,
                                      bool sequential) {
  internal::LoopSettings settings;
  settings.alpha = options.alpha;
  settings.tol_policy = options.tol_policy;
  settings.evaluation = options.evaluation;
  settings.max_outer_iters = options.max_outer_iters;
  settings.record_trace = options.record_trace;
  settings.sequential = sequential;
  settings.permutation_rule = options.permutation_rule;
  return settings;
}

}  // namespace

SolveResult HaspiSolve(const CooperativeMarkovGame& game,
                       const JointPolicy& initial_policy,
                       const HaspiOptions& options) {
  options.Validate();
  const double alpha = options.alpha;
  return internal::RunPolicyIteration(
      game, initial_policy, ToLoopSettings(options, /*sequential=*/true),
      [&](const SoftQTable& q, const JointPolicy& policy,
          const Permutation& order) {
        return HaspiImprove(game, q, policy, order, alpha);
      });
}

SolveResult MasacSolve(const CooperativeMarkovGame& game,
                       const JointPolicy& initial_policy,
                       const HaspiOptions& options) {
  options.Validate();
  const double alpha = options.alpha;
  return internal::RunPolicyIteration(
      game, initial_policy, ToLoopSettings(options, /*sequential=*/false),
      [&](const SoftQTable& q, const JointPolicy& policy, const Permutation&) {
        return MasacImprove(game, q, policy, alpha);
      });
}

}  // namespace maxent_marl

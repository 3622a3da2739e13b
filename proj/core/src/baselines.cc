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

#include "maxent_marl/baselines.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "maxent_marl/error.h"
#include "maxent_marl/soft_dp.h"

namespace maxent_marl {
namespace {

constexpr double kStationaryChange = 1e-12;

void CheckMatrixScope(const CooperativeMarkovGame& game) {
  if (game.num_states() != 1) {
    throw InvalidInput("baselines are limited to single-state matrix games (got " +
                       std::to_string(game.num_states()) + " states)");
  }
  if (game.gamma() != 0.0) {
    throw InvalidInput("baselines need gamma = 0");
  }
}

AgentPolicy ApplyUpdate(const AgentPolicy& old, std::span<const double> coef,
                        const BaselineOptions& options) {
  std::vector<double> row(coef.size(), 0.0);
  if (options.update_mode == BaselineOptions::UpdateMode::kArgmax) {
    const auto best = std::max_element(coef.begin(), coef.end());
    row[std::distance(coef.begin(), best)] = 1.0;
  } else {
    const double peak = *std::max_element(coef.begin(), coef.end());
    double total = 0.0;
    for (std::size_t a = 0; a < row.size(); ++a) {
      row[a] = old.prob(0, static_cast<int>(a)) *
               std::exp(options.step_size * (coef[a] - peak));
      total += row[a];
    }
    for (double& p : row) p /= total;
  }
  return AgentPolicy(old.agent_id(), 1, old.num_actions(), std::move(row));
}

}  // namespace

void BaselineOptions::Validate(int num_agents) const {
  if (update_mode == UpdateMode::kMirror && !(step_size > 0.0)) {
    throw InvalidInput("mirror mode needs a positive step_size");
  }
  if (iterations < 0) throw InvalidInput("iterations must be >= 0");
  if (algorithm == BaselineAlgorithm::kHappo && order.size() != num_agents) {
    throw InvalidInput("HAPPO needs an update order over all agents");
  }
}

std::string ToString(BaselineAlgorithm algorithm) {
  return algorithm == BaselineAlgorithm::kMappo ? "mappo" : "happo";
}

std::vector<double> SurrogateCoefficients(
    const CooperativeMarkovGame& game, const JointPolicy& policy_old,
    int agent, std::span<const AgentPolicy> ratio_policies) {
  CheckMatrixScope(game);
  policy_old.CheckCompatible(game);
  if (agent < 0 || agent >= game.num_agents()) {
    throw InvalidInput("agent index out of range");
  }

  std::vector<const AgentPolicy*> weighting(game.num_agents());
  for (int k = 0; k < game.num_agents(); ++k) weighting[k] = &policy_old[k];
  for (const AgentPolicy& p : ratio_policies) {
    if (p.agent_id() == agent) {
      throw InvalidInput("an agent cannot reweight its own coefficients");
    }
    weighting.at(p.agent_id()) = &p;
  }

  const SoftQTable q = EvaluatePolicyExact(game, policy_old, 0.0);
  std::vector<int> everyone(game.num_agents());
  std::iota(everyone.begin(), everyone.end(), 0);
  const MultiAgentSoftAdvantage advantage =
      ComputeMultiAgentSoftAdvantage(game, policy_old, q, {}, everyone, 0.0);

  const JointActionSpace& space = game.joint_actions();
  std::vector<double> coef(game.num_actions(agent), 0.0);
  for (int j = 0; j < space.size(); ++j) {
    double weight = 1.0;
    for (int k = 0; k < game.num_agents(); ++k) {
      if (k != agent) weight *= weighting[k]->prob(0, space.ActionOf(j, k));
    }
    coef[space.ActionOf(j, agent)] += weight * advantage.at(0, j);
  }
  return coef;
}

JointPolicy BaselineStep(const CooperativeMarkovGame& game,
                         const JointPolicy& policy,
                         const BaselineOptions& options) {
  CheckMatrixScope(game);
  options.Validate(game.num_agents());
  JointPolicy next = policy;
  if (options.algorithm == BaselineAlgorithm::kMappo) {
    for (int i = 0; i < game.num_agents(); ++i) {
      next.set_agent(i, ApplyUpdate(policy[i],
                                    SurrogateCoefficients(game, policy, i),
                                    options));
    }
    return next;
  }
  std::vector<AgentPolicy> updated;
  for (int m = 0; m < options.order.size(); ++m) {
    const int agent = options.order[m];
    AgentPolicy p = ApplyUpdate(
        policy[agent], SurrogateCoefficients(game, policy, agent, updated),
        options);
    next.set_agent(agent, p);
    updated.push_back(std::move(p));
  }
  return next;
}

SolveResult BaselineRun(const CooperativeMarkovGame& game,
                        const JointPolicy& initial_policy,
                        const BaselineOptions& options) {
  CheckMatrixScope(game);
  options.Validate(game.num_agents());
  initial_policy.CheckCompatible(game);

  auto record = [&](const JointPolicy& policy, int iteration, double change,
                    std::vector<int> order) {
    IterationRecord r;
    r.iteration = iteration;
    r.objective = MaxEntReturn(game, policy, 0.0);
    r.state_values = {r.objective};
    r.qre_residual = std::numeric_limits<double>::quiet_NaN();
    r.permutation = std::move(order);
    r.policy_change = change;
    r.policy = policy;
    return r;
  };

  SolveResult result;
  result.policy = initial_policy;
  result.trace.records.push_back(record(result.policy, 0, 0.0, {}));
  double change = std::numeric_limits<double>::infinity();
  for (int k = 0; k < options.iterations; ++k) {
    JointPolicy next = BaselineStep(game, result.policy, options);
    change = SupNormDistance(next, result.policy);
    result.policy = std::move(next);
    result.trace.records.push_back(record(
        result.policy, k + 1, change,
        options.algorithm == BaselineAlgorithm::kHappo ? options.order.ordering()
                                                       : std::vector<int>{}));
    result.trace.iterations = k + 1;
  }
  result.trace.status = change < kStationaryChange ? SolveStatus::kConverged
                                                   : SolveStatus::kMaxIters;
  result.q = EvaluatePolicyExact(game, result.policy, 0.0);
  return result;
}

std::vector<int> GreedyJointAction(const JointPolicy& policy, int s) {
  std::vector<int> joint;
  for (const AgentPolicy& agent : policy.agents()) {
    const auto row = agent.row(s);
    joint.push_back(static_cast<int>(
        std::distance(row.begin(), std::max_element(row.begin(), row.end()))));
  }
  return joint;
}

}  // namespace maxent_marl

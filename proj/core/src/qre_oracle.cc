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

#include "maxent_marl/qre_oracle.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "maxent_marl/error.h"

namespace maxent_marl {
namespace {

constexpr int kMaxGridActions = 4;

// E_{a^{-i} ~ pi^{-i}}[Q(s, a^i, a^{-i})] for every a^i, by direct enumeration.
std::vector<double> ExpectedQForAgent(const CooperativeMarkovGame& game,
                                      const JointPolicy& policy,
                                      const SoftQTable& q, int agent, int s) {
  const JointActionSpace& space = game.joint_actions();
  std::vector<double> expected(game.num_actions(agent), 0.0);
  for (int j = 0; j < space.size(); ++j) {
    double weight = 1.0;
    for (int k = 0; k < game.num_agents(); ++k) {
      if (k != agent) weight *= policy[k].prob(s, space.ActionOf(j, k));
    }
    expected[space.ActionOf(j, agent)] += weight * q.at(s, j);
  }
  return expected;
}

double LogSumExp(std::span<const double> x) {
  const double peak = *std::max_element(x.begin(), x.end());
  double total = 0.0;
  for (double v : x) total += std::exp(v - peak);
  return peak + std::log(total);
}

}  // namespace

AgentPolicy LogitResponseGivenQ(const CooperativeMarkovGame& game,
                                const JointPolicy& policy, const SoftQTable& q,
                                int agent, double alpha) {
  if (!(alpha > 0.0)) throw InvalidInput("temperature alpha must be positive");
  if (agent < 0 || agent >= game.num_agents()) {
    throw InvalidInput("agent index out of range");
  }
  policy.CheckCompatible(game);
  std::vector<double> table;
  table.reserve(static_cast<std::size_t>(game.num_states()) *
                game.num_actions(agent));
  for (int s = 0; s < game.num_states(); ++s) {
    const std::vector<double> row =
        BoltzmannRow(ExpectedQForAgent(game, policy, q, agent, s), alpha);
    table.insert(table.end(), row.begin(), row.end());
  }
  return AgentPolicy(agent, game.num_states(), game.num_actions(agent),
                     std::move(table));
}

AgentPolicy LogitResponse(const CooperativeMarkovGame& game,
                          const JointPolicy& policy, int agent, double alpha) {
  if (!(alpha > 0.0)) throw InvalidInput("temperature alpha must be positive");
  return LogitResponseGivenQ(game, policy,
                             EvaluatePolicyExact(game, policy, alpha), agent,
                             alpha);
}

double QreResidualGivenQ(const CooperativeMarkovGame& game,
                         const JointPolicy& policy, const SoftQTable& q,
                         double alpha) {
  double residual = 0.0;
  for (int i = 0; i < game.num_agents(); ++i) {
    residual = std::max(
        residual,
        SupNormDistance(policy[i], LogitResponseGivenQ(game, policy, q, i, alpha)));
  }
  return residual;
}

double QreResidual(const CooperativeMarkovGame& game, const JointPolicy& policy,
                   double alpha) {
  if (!(alpha > 0.0)) throw InvalidInput("temperature alpha must be positive");
  return QreResidualGivenQ(game, policy,
                           EvaluatePolicyExact(game, policy, alpha), alpha);
}

QreSolution QreFixedPoint(const CooperativeMarkovGame& game, double alpha,
                          const QreOptions& options,
                          const JointPolicy& initial_policy) {
  if (!(alpha > 0.0)) throw InvalidInput("temperature alpha must be positive");
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    throw InvalidInput("damping must lie in (0, 1]");
  }
  if (!(options.tol > 0.0)) throw InvalidInput("tolerance must be positive");
  if (options.max_iters < 0) throw InvalidInput("max_iters must be >= 0");
  initial_policy.CheckCompatible(game);

  QreSolution best;
  best.damping = options.damping;
  best.residual = std::numeric_limits<double>::infinity();

  JointPolicy policy = initial_policy;
  for (int k = 0;; ++k) {
    const SoftQTable q = EvaluatePolicyExact(game, policy, alpha);
    std::vector<AgentPolicy> responses;
    double residual = 0.0;
    for (int i = 0; i < game.num_agents(); ++i) {
      responses.push_back(LogitResponseGivenQ(game, policy, q, i, alpha));
      residual = std::max(residual, SupNormDistance(policy[i], responses[i]));
    }
    if (residual < best.residual) {
      best.policy = policy;
      best.residual = residual;
      best.iterations = k;
    }
    if (residual < options.tol) {
      best.converged = true;
      return best;
    }
    if (k == options.max_iters) return best;

    std::vector<AgentPolicy> next;
    for (int i = 0; i < game.num_agents(); ++i) {
      std::vector<double> table = policy[i].table();
      const auto& target = responses[i].table();
      for (std::size_t e = 0; e < table.size(); ++e) {
        table[e] = (1.0 - options.damping) * table[e] +
                   options.damping * target[e];
      }
      next.emplace_back(i, game.num_states(), game.num_actions(i),
                        std::move(table));
    }
    policy = JointPolicy(std::move(next));
  }
}

std::vector<std::vector<int>> EnumeratePureNash(
    const CooperativeMarkovGame& game) {
  if (game.num_states() != 1) {
    throw InvalidInput("pure Nash enumeration needs a single-state game");
  }
  const JointActionSpace& space = game.joint_actions();
  std::vector<std::vector<int>> equilibria;
  for (int j = 0; j < space.size(); ++j) {
    const double value = game.reward(0, j);
    bool stable = true;
    for (int i = 0; i < game.num_agents() && stable; ++i) {
      const int own = space.ActionOf(j, i);
      for (int a = 0; a < game.num_actions(i); ++a) {
        const int deviation = j + (a - own) * space.stride(i);
        if (game.reward(0, deviation) > value) {
          stable = false;
          break;
        }
      }
    }
    if (stable) equilibria.push_back(space.Unflatten(j));
  }
  return equilibria;
}

double JointKlObjective(const CooperativeMarkovGame& game,
                        const SoftQTable& q_old,
                        const JointPolicy& candidate, double alpha, int s) {
  if (!(alpha > 0.0)) throw InvalidInput("temperature alpha must be positive");
  candidate.CheckCompatible(game);
  const JointActionSpace& space = game.joint_actions();
  std::vector<double> logits(space.size());
  for (int j = 0; j < space.size(); ++j) logits[j] = q_old.at(s, j) / alpha;
  const double log_partition = LogSumExp(logits);
  double kl = 0.0;
  for (int j = 0; j < space.size(); ++j) {
    const double p = JointActionProb(candidate, space, s, j);
    if (p > 0.0) kl += p * (std::log(p) - (logits[j] - log_partition));
  }
  return kl;
}

std::vector<std::vector<double>> SimplexGrid(int num_actions,
                                             double resolution) {
  if (num_actions <= 0) throw InvalidInput("simplex needs at least one vertex");
  if (!(resolution > 0.0 && resolution <= 1.0)) {
    throw InvalidInput("grid resolution must lie in (0, 1]");
  }
  const int steps = static_cast<int>(std::lround(1.0 / resolution));
  std::vector<std::vector<double>> points;
  std::vector<int> counts(num_actions, 0);
  std::function<void(int, int)> fill = [&](int position, int remaining) {
    if (position == num_actions - 1) {
      counts[position] = remaining;
      std::vector<double> point(num_actions);
      for (int a = 0; a < num_actions; ++a) {
        point[a] = static_cast<double>(counts[a]) / steps;
      }
      points.push_back(std::move(point));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[position] = c;
      fill(position + 1, remaining - c);
    }
  };
  fill(0, steps);
  return points;
}

double UnilateralDeviationGain(const CooperativeMarkovGame& game,
                               const JointPolicy& policy, double alpha,
                               double grid_resolution) {
  if (!(alpha >= 0.0)) throw InvalidInput("alpha must be non-negative");
  policy.CheckCompatible(game);
  for (int i = 0; i < game.num_agents(); ++i) {
    if (game.num_actions(i) > kMaxGridActions) {
      throw InvalidInput(
          "agent " + std::to_string(i) + " has " +
          std::to_string(game.num_actions(i)) +
          " actions; the deviation grid supports at most 4. Use QreResidual "
          "for larger action sets");
    }
  }
  const double baseline = MaxEntReturn(game, policy, alpha);
  double gain = 0.0;
  for (int i = 0; i < game.num_agents(); ++i) {
    if (game.num_actions(i) == 1) continue;
    const auto grid = SimplexGrid(game.num_actions(i), grid_resolution);
    for (int s = 0; s < game.num_states(); ++s) {
      JointPolicy deviated = policy;
      AgentPolicy agent = policy[i];
      for (const auto& point : grid) {
        std::copy(point.begin(), point.end(), agent.mutable_row(s).begin());
        deviated.set_agent(i, agent);
        gain = std::max(gain, MaxEntReturn(game, deviated, alpha) - baseline);
      }
    }
  }
  return gain;
}

double DeviationGridSlack(const CooperativeMarkovGame& game,
                          const JointPolicy& policy, double alpha,
                          double grid_resolution) {
  if (!(grid_resolution > 0.0)) throw InvalidInput("grid resolution must be positive");
  const SoftQTable q = EvaluatePolicyExact(game, policy, alpha);
  const auto [lo, hi] = std::minmax_element(q.values.begin(), q.values.end());
  return (*hi - *lo) * grid_resolution;
}

}  // namespace maxent_marl

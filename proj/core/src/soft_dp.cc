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

#include "maxent_marl/soft_dp.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "maxent_marl/error.h"

namespace maxent_marl {
namespace {

void CheckQShape(const CooperativeMarkovGame& game, const SoftQTable& q) {
  if (q.num_states != game.num_states() ||
      q.num_joint_actions != game.num_joint_actions() ||
      q.values.size() != static_cast<std::size_t>(game.num_states()) *
                             game.num_joint_actions()) {
    throw InvalidInput("Q table shape does not match the game");
  }
}

void CheckAgentSubset(const CooperativeMarkovGame& game,
                      std::span<const int> agents, const char* what) {
  std::vector<bool> seen(game.num_agents(), false);
  for (int agent : agents) {
    if (agent < 0 || agent >= game.num_agents()) {
      throw InvalidInput(std::string(what) + ": agent " +
                         std::to_string(agent) + " out of range");
    }
    if (seen[agent]) {
      throw InvalidInput(std::string(what) + ": agent " +
                         std::to_string(agent) + " listed twice");
    }
    seen[agent] = true;
  }
}

double SupNormDiff(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff = std::max(diff, std::abs(a[k] - b[k]));
  }
  return diff;
}

}  // namespace

SoftQTable SoftQTable::Zeros(const CooperativeMarkovGame& game, double alpha) {
  return {alpha, game.num_states(), game.num_joint_actions(),
          std::vector<double>(static_cast<std::size_t>(game.num_states()) *
                                  game.num_joint_actions(),
                              0.0)};
}

AgentSubsetTable::AgentSubsetTable(double alpha, std::vector<int> agents,
                                   const CooperativeMarkovGame& game,
                                   std::vector<double> values)
    : alpha_(alpha), agents_(std::move(agents)), num_states_(game.num_states()),
      values_(std::move(values)) {
  std::vector<int> counts;
  counts.reserve(agents_.size());
  for (int agent : agents_) counts.push_back(game.num_actions(agent));
  space_ = JointActionSpace(std::move(counts));
  if (values_.size() != static_cast<std::size_t>(num_states_) * space_.size()) {
    throw InvalidInput("agent-subset table has the wrong number of entries");
  }
}

double EntropyBonus(const JointPolicy& policy, int s, double alpha) {
  if (alpha == 0.0) return 0.0;
  double h = 0.0;
  for (const AgentPolicy& agent : policy.agents()) h += PolicyEntropy(agent, s);
  return alpha * h;
}

SoftValueTable SoftValue(const CooperativeMarkovGame& game,
                         const JointPolicy& policy, const SoftQTable& q,
                         double alpha) {
  CheckQShape(game, q);
  policy.CheckCompatible(game);
  const JointActionSpace& space = game.joint_actions();
  SoftValueTable v{alpha, std::vector<double>(game.num_states(), 0.0)};
  for (int s = 0; s < game.num_states(); ++s) {
    double expected = 0.0;
    for (int j = 0; j < space.size(); ++j) {
      expected += JointActionProb(policy, space, s, j) * q.at(s, j);
    }
    v.values[s] = expected + EntropyBonus(policy, s, alpha);
  }
  return v;
}

SoftQTable SoftBellmanBackup(const CooperativeMarkovGame& game,
                             const JointPolicy& policy, const SoftQTable& q,
                             double alpha) {
  const SoftValueTable v = SoftValue(game, policy, q, alpha);
  SoftQTable next = SoftQTable::Zeros(game, alpha);
  for (int s = 0; s < game.num_states(); ++s) {
    for (int j = 0; j < game.num_joint_actions(); ++j) {
      double continuation = 0.0;
      if (game.gamma() != 0.0) {
        const auto row = game.transition_row(s, j);
        for (int sp = 0; sp < game.num_states(); ++sp) {
          continuation += row[sp] * v.values[sp];
        }
      }
      next.at(s, j) = game.reward(s, j) + game.gamma() * continuation;
    }
  }
  return next;
}

double SoftBellmanResidual(const CooperativeMarkovGame& game,
                           const JointPolicy& policy, const SoftQTable& q,
                           double alpha) {
  return SupNormDiff(SoftBellmanBackup(game, policy, q, alpha).values,
                     q.values);
}

IterativeEvaluation EvaluatePolicyIterative(const CooperativeMarkovGame& game,
                                            const JointPolicy& policy,
                                            double alpha, double tol,
                                            int max_iters) {
  if (!(tol > 0.0)) throw InvalidInput("evaluation tolerance must be positive");
  if (max_iters < 1) throw InvalidInput("max_iters must be at least 1");
  if (!(game.gamma() >= 0.0 && game.gamma() < 1.0)) {
    throw InvalidInput("iterative evaluation needs gamma in [0, 1)");
  }
  // Contraction bound: |Q_k - Q*| <= gamma / (1 - gamma) * |Q_k - Q_{k-1}|.
  const double error_per_change = game.gamma() / (1.0 - game.gamma());
  SoftQTable q = SoftQTable::Zeros(game, alpha);
  double change = 0.0;
  for (int k = 1; k <= max_iters; ++k) {
    SoftQTable next = SoftBellmanBackup(game, policy, q, alpha);
    change = SupNormDiff(next.values, q.values);
    q = std::move(next);
    if (game.gamma() == 0.0 || error_per_change * change < tol) {
      return {std::move(q), k, game.gamma() == 0.0 ? 0.0 : change};
    }
  }
  throw NonConvergence("soft policy evaluation did not reach tol " +
                           std::to_string(tol) + " in " +
                           std::to_string(max_iters) + " backups",
                       change, max_iters);
}

SoftQTable EvaluatePolicyExact(const CooperativeMarkovGame& game,
                               const JointPolicy& policy, double alpha) {
  policy.CheckCompatible(game);
  const double gamma = game.gamma();
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw InvalidInput("exact evaluation needs gamma in [0, 1)");
  }
  const int num_states = game.num_states();
  const JointActionSpace& space = game.joint_actions();

  SoftQTable q = SoftQTable::Zeros(game, alpha);
  if (gamma == 0.0) {
    q.values = game.reward_tensor();
    return q;
  }

  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(num_states, num_states);
  Eigen::VectorXd rhs(num_states);
  for (int s = 0; s < num_states; ++s) {
    double expected_reward = 0.0;
    for (int j = 0; j < space.size(); ++j) {
      const double pj = JointActionProb(policy, space, s, j);
      if (pj == 0.0) continue;
      expected_reward += pj * game.reward(s, j);
      const auto row = game.transition_row(s, j);
      for (int sp = 0; sp < num_states; ++sp) {
        system(s, sp) -= gamma * pj * row[sp];
      }
    }
    rhs(s) = expected_reward + EntropyBonus(policy, s, alpha);
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  const Eigen::VectorXd v = lu.solve(rhs);
  if (!v.allFinite()) {
    throw InternalError("soft evaluation system is singular");
  }

  for (int s = 0; s < num_states; ++s) {
    for (int j = 0; j < space.size(); ++j) {
      const auto row = game.transition_row(s, j);
      double continuation = 0.0;
      for (int sp = 0; sp < num_states; ++sp) continuation += row[sp] * v(sp);
      q.at(s, j) = game.reward(s, j) + gamma * continuation;
    }
  }
  return q;
}

SoftQTable EvaluatePolicy(const CooperativeMarkovGame& game,
                          const JointPolicy& policy, double alpha,
                          const EvaluationOptions& options) {
  if (options.method == EvaluationOptions::Method::kIterative) {
    return EvaluatePolicyIterative(game, policy, alpha, options.tol,
                                   options.max_iters)
        .q;
  }
  return EvaluatePolicyExact(game, policy, alpha);
}

MultiAgentSoftQ ComputeMultiAgentSoftQ(const CooperativeMarkovGame& game,
                                       const JointPolicy& policy,
                                       const SoftQTable& q,
                                       std::span<const int> prefix,
                                       double alpha) {
  CheckQShape(game, q);
  policy.CheckCompatible(game);
  CheckAgentSubset(game, prefix, "multi-agent soft Q prefix");

  const JointActionSpace& space = game.joint_actions();
  std::vector<bool> in_prefix(game.num_agents(), false);
  for (int agent : prefix) in_prefix[agent] = true;

  std::vector<int> prefix_counts;
  for (int agent : prefix) prefix_counts.push_back(game.num_actions(agent));
  const JointActionSpace prefix_space(prefix_counts);

  std::vector<double> values(
      static_cast<std::size_t>(game.num_states()) * prefix_space.size(), 0.0);
  for (int s = 0; s < game.num_states(); ++s) {
    double* out = values.data() + static_cast<std::size_t>(s) * prefix_space.size();
    for (int j = 0; j < space.size(); ++j) {
      double weight = 1.0;
      int key = 0;
      for (int i = 0; i < game.num_agents(); ++i) {
        if (!in_prefix[i]) weight *= policy[i].prob(s, space.ActionOf(j, i));
      }
      for (std::size_t m = 0; m < prefix.size(); ++m) {
        key += space.ActionOf(j, prefix[m]) * prefix_space.stride(m);
      }
      out[key] += weight * q.at(s, j);
    }
    double bonus = 0.0;
    for (int i = 0; i < game.num_agents(); ++i) {
      if (!in_prefix[i]) bonus += PolicyEntropy(policy[i], s);
    }
    if (alpha != 0.0) {
      for (int k = 0; k < prefix_space.size(); ++k) out[k] += alpha * bonus;
    }
  }
  return MultiAgentSoftQ(alpha, {prefix.begin(), prefix.end()}, game,
                         std::move(values));
}

MultiAgentSoftAdvantage ComputeMultiAgentSoftAdvantage(
    const CooperativeMarkovGame& game, const JointPolicy& policy,
    const SoftQTable& q, std::span<const int> cond, std::span<const int> subset,
    double alpha) {
  std::vector<int> joined(cond.begin(), cond.end());
  joined.insert(joined.end(), subset.begin(), subset.end());
  for (int a : cond) {
    if (std::find(subset.begin(), subset.end(), a) != subset.end()) {
      throw InvalidInput("advantage subsets overlap at agent " +
                         std::to_string(a));
    }
  }
  const MultiAgentSoftQ upper =
      ComputeMultiAgentSoftQ(game, policy, q, joined, alpha);
  const MultiAgentSoftQ lower =
      ComputeMultiAgentSoftQ(game, policy, q, cond, alpha);

  // cond is the leading block of the joined key, so the cond index is the
  // joined index divided by the size of the subset block.
  int subset_size = 1;
  for (int agent : subset) subset_size *= game.num_actions(agent);

  std::vector<double> values(upper.values().size());
  const int width = upper.space().size();
  for (int s = 0; s < game.num_states(); ++s) {
    for (int k = 0; k < width; ++k) {
      values[static_cast<std::size_t>(s) * width + k] =
          upper.at(s, k) - lower.at(s, k / subset_size);
    }
  }
  return MultiAgentSoftAdvantage(alpha, std::move(joined), game,
                                 std::move(values));
}

std::vector<double> BoltzmannRow(std::span<const double> coefficients,
                                 double alpha) {
  if (!(alpha > 0.0)) throw InvalidInput("temperature alpha must be positive");
  if (coefficients.empty()) throw InvalidInput("empty coefficient row");
  const double peak = *std::max_element(coefficients.begin(), coefficients.end());
  std::vector<double> row(coefficients.size());
  double total = 0.0;
  for (std::size_t a = 0; a < row.size(); ++a) {
    const double exponent = (coefficients[a] - peak) / alpha;
    if (!std::isfinite(exponent)) {
      throw InternalError("non-finite Boltzmann exponent");
    }
    row[a] = std::exp(exponent);
    total += row[a];
  }
  for (double& p : row) p /= total;
  return row;
}

double MaxEntReturn(const CooperativeMarkovGame& game,
                    const JointPolicy& policy, double alpha) {
  const SoftQTable q = EvaluatePolicyExact(game, policy, alpha);
  const SoftValueTable v = SoftValue(game, policy, q, alpha);
  double j = 0.0;
  for (int s = 0; s < game.num_states(); ++s) {
    j += game.initial_dist()[s] * v.values[s];
  }
  return j;
}

}  // namespace maxent_marl

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

#include "maxent_marl/game.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "maxent_marl/error.h"

namespace maxent_marl {
namespace {

constexpr double kStochasticTolerance = 1e-12;

std::string IndexString(const std::vector<int>& index) {
  std::ostringstream out;
  out << "(";
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (k > 0) out << ", ";
    out << index[k];
  }
  out << ")";
  return out.str();
}

}  // namespace

JointActionSpace::JointActionSpace(std::vector<int> action_counts)
    : counts_(std::move(action_counts)), strides_(counts_.size(), 1) {
  for (int c : counts_) {
    if (c <= 0) throw InvalidInput("action counts must be positive");
  }
  size_ = 1;
  for (int i = static_cast<int>(counts_.size()) - 1; i >= 0; --i) {
    strides_[i] = size_;
    size_ *= counts_[i];
  }
}

int JointActionSpace::Flatten(std::span<const int> joint_action) const {
  if (static_cast<int>(joint_action.size()) != num_agents()) {
    throw InvalidInput("joint action has wrong number of components");
  }
  int index = 0;
  for (int i = 0; i < num_agents(); ++i) {
    if (joint_action[i] < 0 || joint_action[i] >= counts_[i]) {
      throw InvalidInput("action index out of range for agent " +
                         std::to_string(i));
    }
    index += joint_action[i] * strides_[i];
  }
  return index;
}

std::vector<int> JointActionSpace::Unflatten(int index) const {
  std::vector<int> joint(counts_.size());
  for (int i = 0; i < num_agents(); ++i) joint[i] = ActionOf(index, i);
  return joint;
}

CooperativeMarkovGame::CooperativeMarkovGame(std::vector<int> action_counts,
                                             int num_states,
                                             std::vector<double> reward,
                                             std::vector<double> transition,
                                             double gamma,
                                             std::vector<double> initial_dist)
    : space_(std::move(action_counts)),
      num_states_(num_states),
      reward_(std::move(reward)),
      transition_(std::move(transition)),
      gamma_(gamma),
      initial_dist_(std::move(initial_dist)) {
  if (space_.num_agents() == 0) throw InvalidInput("game needs at least one agent");
  if (num_states_ <= 0) throw InvalidInput("game needs at least one state");
  const std::size_t sa = static_cast<std::size_t>(num_states_) * space_.size();
  if (reward_.size() != sa) {
    throw InvalidInput("reward tensor has " + std::to_string(reward_.size()) +
                       " entries, expected " + std::to_string(sa));
  }
  if (transition_.size() != sa * num_states_) {
    throw InvalidInput("transition tensor has " +
                       std::to_string(transition_.size()) +
                       " entries, expected " +
                       std::to_string(sa * num_states_));
  }
  if (static_cast<int>(initial_dist_.size()) != num_states_) {
    throw InvalidInput("initial_dist length differs from the number of states");
  }
}

std::string ToString(const Violation& violation) {
  std::string out = violation.field;
  if (!violation.index.empty()) out += IndexString(violation.index);
  return out + ": " + violation.message;
}

std::vector<Violation> ValidateGame(const CooperativeMarkovGame& game) {
  std::vector<Violation> violations;
  const int num_joint = game.num_joint_actions();
  for (int s = 0; s < game.num_states(); ++s) {
    for (int j = 0; j < num_joint; ++j) {
      const double r = game.reward(s, j);
      if (!std::isfinite(r)) {
        violations.push_back({"reward", {s, j}, "non-finite reward"});
      }
      double total = 0.0;
      bool negative = false;
      for (double p : game.transition_row(s, j)) {
        if (!(p >= 0.0)) negative = true;
        total += p;
      }
      if (negative) {
        violations.push_back(
            {"transition", {s, j}, "negative or NaN probability"});
      }
      if (!(std::abs(total - 1.0) <= kStochasticTolerance)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "row sums to " << total;
        violations.push_back({"transition", {s, j}, msg.str()});
      }
    }
  }
  double total = 0.0;
  for (int s = 0; s < game.num_states(); ++s) {
    const double d = game.initial_dist()[s];
    if (!(d >= 0.0)) {
      violations.push_back({"initial_dist", {s}, "negative or NaN probability"});
    }
    total += d;
  }
  if (!(std::abs(total - 1.0) <= kStochasticTolerance)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "sums to " << total;
    violations.push_back({"initial_dist", {}, msg.str()});
  }
  if (!(game.gamma() >= 0.0 && game.gamma() < 1.0)) {
    std::ostringstream msg;
    msg << "must lie in [0, 1), got " << game.gamma();
    violations.push_back({"gamma", {}, msg.str()});
  }
  return violations;
}

CooperativeMarkovGame NewMatrixGame(
    const std::vector<std::vector<double>>& matrix) {
  if (matrix.empty() || matrix.front().empty()) {
    throw InvalidInput("reward matrix must have at least one row and column");
  }
  const int rows = static_cast<int>(matrix.size());
  const int cols = static_cast<int>(matrix.front().size());
  std::vector<double> reward;
  reward.reserve(static_cast<std::size_t>(rows) * cols);
  for (int a1 = 0; a1 < rows; ++a1) {
    if (static_cast<int>(matrix[a1].size()) != cols) {
      throw InvalidInput("reward matrix row " + std::to_string(a1) +
                         " has a different length");
    }
    for (int a2 = 0; a2 < cols; ++a2) {
      if (!std::isfinite(matrix[a1][a2])) {
        throw InvalidInput("non-finite reward at cell (" + std::to_string(a1) +
                           ", " + std::to_string(a2) + ")");
      }
      reward.push_back(matrix[a1][a2]);
    }
  }
  std::vector<double> transition(reward.size(), 1.0);
  return CooperativeMarkovGame({rows, cols}, 1, std::move(reward),
                               std::move(transition), 0.0, {1.0});
}

CooperativeMarkovGame CoordinationMatrixGame() {
  return NewMatrixGame({{5.0, -20.0, -20.0},
                        {-20.0, 10.0, -20.0},
                        {-20.0, -20.0, 20.0}});
}

CooperativeMarkovGame RandomGame(const RandomGameParams& params) {
  if (params.num_agents <= 0) throw InvalidInput("num_agents must be positive");
  if (params.num_states <= 0) throw InvalidInput("num_states must be positive");
  if (static_cast<int>(params.action_counts.size()) != params.num_agents) {
    throw InvalidInput("action_counts must have one entry per agent");
  }
  for (int c : params.action_counts) {
    if (c <= 0) throw InvalidInput("every agent needs at least one action");
  }
  if (!std::isfinite(params.reward_low) || !std::isfinite(params.reward_high) ||
      params.reward_low > params.reward_high) {
    throw InvalidInput("reward bounds must be finite with low <= high");
  }
  if (!(params.gamma >= 0.0 && params.gamma < 1.0)) {
    throw InvalidInput("gamma must lie in [0, 1)");
  }

  const JointActionSpace space(params.action_counts);
  const int num_states = params.num_states;
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> reward(static_cast<std::size_t>(num_states) *
                             space.size());
  const double width = params.reward_high - params.reward_low;
  for (double& r : reward) r = params.reward_low + width * unit(rng);

  std::vector<double> transition(reward.size() * num_states);
  for (std::size_t row = 0; row < reward.size(); ++row) {
    auto first = transition.begin() + row * num_states;
    auto last = first + num_states;
    std::generate(first, last, [&] { return 1e-3 + unit(rng); });
    const double total = std::accumulate(first, last, 0.0);
    std::for_each(first, last, [total](double& p) { p /= total; });
  }

  std::vector<double> initial(num_states);
  std::generate(initial.begin(), initial.end(),
                [&] { return 1e-3 + unit(rng); });
  const double total = std::accumulate(initial.begin(), initial.end(), 0.0);
  for (double& d : initial) d /= total;

  return CooperativeMarkovGame(params.action_counts, num_states,
                               std::move(reward), std::move(transition),
                               params.gamma, std::move(initial));
}

AgentPolicy::AgentPolicy(int agent_id, int num_states, int num_actions,
                         std::vector<double> table, double floor)
    : agent_id_(agent_id),
      num_states_(num_states),
      num_actions_(num_actions),
      table_(std::move(table)),
      floor_(floor) {
  if (num_states_ <= 0 || num_actions_ <= 0) {
    throw InvalidInput("policy needs positive state and action counts");
  }
  if (table_.size() != static_cast<std::size_t>(num_states_) * num_actions_) {
    throw InvalidInput("policy table has the wrong number of entries");
  }
  if (floor_ < 0.0) throw InvalidInput("policy floor must be non-negative");
}

AgentPolicy AgentPolicy::Uniform(int agent_id, int num_states,
                                 int num_actions) {
  return AgentPolicy(
      agent_id, num_states, num_actions,
      std::vector<double>(static_cast<std::size_t>(num_states) * num_actions,
                          1.0 / num_actions));
}

AgentPolicy AgentPolicy::FromRow(int agent_id, int num_states,
                                 std::span<const double> row) {
  std::vector<double> table;
  table.reserve(static_cast<std::size_t>(num_states) * row.size());
  for (int s = 0; s < num_states; ++s) {
    table.insert(table.end(), row.begin(), row.end());
  }
  return AgentPolicy(agent_id, num_states, static_cast<int>(row.size()),
                     std::move(table));
}

std::vector<Violation> ValidatePolicy(const AgentPolicy& policy, double tol) {
  std::vector<Violation> violations;
  for (int s = 0; s < policy.num_states(); ++s) {
    double total = 0.0;
    for (int a = 0; a < policy.num_actions(); ++a) {
      const double p = policy.prob(s, a);
      if (!(p >= policy.floor())) {
        violations.push_back({"policy", {policy.agent_id(), s, a},
                              "entry below the policy floor"});
      }
      total += p;
    }
    if (!(std::abs(total - 1.0) <= tol)) {
      violations.push_back(
          {"policy", {policy.agent_id(), s}, "row does not sum to one"});
    }
  }
  return violations;
}

JointPolicy::JointPolicy(std::vector<AgentPolicy> agents)
    : agents_(std::move(agents)) {
  for (int i = 0; i < num_agents(); ++i) {
    if (agents_[i].agent_id() != i) {
      throw InvalidInput("joint policy position " + std::to_string(i) +
                         " holds agent " +
                         std::to_string(agents_[i].agent_id()));
    }
    if (agents_[i].num_states() != agents_.front().num_states()) {
      throw InvalidInput("agent policies disagree on the number of states");
    }
  }
}

JointPolicy JointPolicy::Uniform(const CooperativeMarkovGame& game) {
  std::vector<AgentPolicy> agents;
  for (int i = 0; i < game.num_agents(); ++i) {
    agents.push_back(
        AgentPolicy::Uniform(i, game.num_states(), game.num_actions(i)));
  }
  return JointPolicy(std::move(agents));
}

JointPolicy JointPolicy::Symmetric(const CooperativeMarkovGame& game,
                                   std::span<const double> row) {
  std::vector<AgentPolicy> agents;
  for (int i = 0; i < game.num_agents(); ++i) {
    if (game.num_actions(i) != static_cast<int>(row.size())) {
      throw InvalidInput("symmetric row length differs from agent " +
                         std::to_string(i) + "'s action count");
    }
    agents.push_back(AgentPolicy::FromRow(i, game.num_states(), row));
  }
  return JointPolicy(std::move(agents));
}

void JointPolicy::set_agent(int i, AgentPolicy policy) {
  if (policy.agent_id() != i) {
    throw InvalidInput("agent id does not match its joint-policy slot");
  }
  agents_.at(i) = std::move(policy);
}

void JointPolicy::CheckCompatible(const CooperativeMarkovGame& game) const {
  if (num_agents() != game.num_agents()) {
    throw InvalidInput("joint policy has " + std::to_string(num_agents()) +
                       " agents, game has " +
                       std::to_string(game.num_agents()));
  }
  for (int i = 0; i < num_agents(); ++i) {
    if (agents_[i].num_states() != game.num_states() ||
        agents_[i].num_actions() != game.num_actions(i)) {
      throw InvalidInput("policy shape of agent " + std::to_string(i) +
                         " does not match the game");
    }
  }
}

double SupNormDistance(const AgentPolicy& p, const AgentPolicy& q) {
  if (p.table().size() != q.table().size()) {
    throw InvalidInput("policies have different shapes");
  }
  double dist = 0.0;
  for (std::size_t k = 0; k < p.table().size(); ++k) {
    dist = std::max(dist, std::abs(p.table()[k] - q.table()[k]));
  }
  return dist;
}

double SupNormDistance(const JointPolicy& p, const JointPolicy& q) {
  if (p.num_agents() != q.num_agents()) {
    throw InvalidInput("joint policies have different agent counts");
  }
  double dist = 0.0;
  for (int i = 0; i < p.num_agents(); ++i) {
    dist = std::max(dist, SupNormDistance(p[i], q[i]));
  }
  return dist;
}

Permutation::Permutation(std::vector<int> ordering)
    : ordering_(std::move(ordering)) {
  std::vector<bool> seen(ordering_.size(), false);
  for (int agent : ordering_) {
    if (agent < 0 || agent >= size() || seen[agent]) {
      throw InvalidInput("ordering is not a permutation of 0.." +
                         std::to_string(size() - 1));
    }
    seen[agent] = true;
  }
}

Permutation Permutation::Identity(int n) {
  std::vector<int> ordering(n);
  std::iota(ordering.begin(), ordering.end(), 0);
  return Permutation(std::move(ordering));
}

double RowEntropy(std::span<const double> row) {
  double h = 0.0;
  for (double p : row) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double PolicyEntropy(const AgentPolicy& policy, int s) {
  return RowEntropy(policy.row(s));
}

double JointActionProb(const JointPolicy& policy, int s,
                       std::span<const int> joint_action) {
  if (static_cast<int>(joint_action.size()) != policy.num_agents()) {
    throw InvalidInput("joint action has wrong number of components");
  }
  double prob = 1.0;
  for (int i = 0; i < policy.num_agents(); ++i) {
    if (joint_action[i] < 0 || joint_action[i] >= policy[i].num_actions()) {
      throw InvalidInput("action index out of range for agent " +
                         std::to_string(i));
    }
    prob *= policy[i].prob(s, joint_action[i]);
  }
  return prob;
}

double JointActionProb(const JointPolicy& policy,
                       const JointActionSpace& space, int s, int joint) {
  double prob = 1.0;
  for (int i = 0; i < policy.num_agents(); ++i) {
    prob *= policy[i].prob(s, space.ActionOf(joint, i));
  }
  return prob;
}

std::vector<double> JointDistribution(const JointPolicy& policy,
                                      const JointActionSpace& space, int s) {
  std::vector<double> dist(space.size());
  for (int j = 0; j < space.size(); ++j) {
    dist[j] = JointActionProb(policy, space, s, j);
  }
  return dist;
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer applied to a (seed, stream) counter.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace maxent_marl

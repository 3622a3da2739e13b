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

#ifndef MAXENT_MARL_GAME_H_
#define MAXENT_MARL_GAME_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace maxent_marl {

// Indexing of joint actions. Flattening is row-major in agent order, so agent
// 0 is the slowest-varying coordinate: index = ((a0 * n1) + a1) * n2 + a2 ...
class JointActionSpace {
 public:
  JointActionSpace() = default;
  explicit JointActionSpace(std::vector<int> action_counts);

  int num_agents() const { return static_cast<int>(counts_.size()); }
  int num_actions(int agent) const { return counts_[agent]; }
  int size() const { return size_; }
  int stride(int agent) const { return strides_[agent]; }
  const std::vector<int>& action_counts() const { return counts_; }

  int Flatten(std::span<const int> joint_action) const;
  std::vector<int> Unflatten(int index) const;
  int ActionOf(int index, int agent) const {
    return (index / strides_[agent]) % counts_[agent];
  }

  bool operator==(const JointActionSpace&) const = default;

 private:
  std::vector<int> counts_;
  std::vector<int> strides_;
  int size_ = 1;
};

// A finite cooperative Markov game <N, S, A, r, P, gamma, d>.
//
// The constructor only checks tensor shapes. Value-level invariants
// (stochastic rows, gamma < 1, finite rewards) are reported by ValidateGame,
// so malformed games can still be built and inspected. The factory functions
// below (NewMatrixGame, RandomGame, LoadGame) always return valid games.
class CooperativeMarkovGame {
 public:
  // reward: |S| x |joint A|, transition: |S| x |joint A| x |S|, both dense
  // and row-major.
  CooperativeMarkovGame(std::vector<int> action_counts, int num_states,
                        std::vector<double> reward,
                        std::vector<double> transition, double gamma,
                        std::vector<double> initial_dist);

  int num_agents() const { return space_.num_agents(); }
  int num_states() const { return num_states_; }
  int num_actions(int agent) const { return space_.num_actions(agent); }
  int num_joint_actions() const { return space_.size(); }
  const JointActionSpace& joint_actions() const { return space_; }
  const std::vector<int>& action_counts() const {
    return space_.action_counts();
  }

  double gamma() const { return gamma_; }
  std::span<const double> initial_dist() const { return initial_dist_; }

  double reward(int s, int joint) const {
    return reward_[static_cast<std::size_t>(s) * space_.size() + joint];
  }
  std::span<const double> transition_row(int s, int joint) const {
    const std::size_t offset =
        (static_cast<std::size_t>(s) * space_.size() + joint) * num_states_;
    return {transition_.data() + offset, static_cast<std::size_t>(num_states_)};
  }

  const std::vector<double>& reward_tensor() const { return reward_; }
  const std::vector<double>& transition_tensor() const { return transition_; }

  bool operator==(const CooperativeMarkovGame&) const = default;

 private:
  JointActionSpace space_;
  int num_states_;
  std::vector<double> reward_;
  std::vector<double> transition_;
  double gamma_;
  std::vector<double> initial_dist_;
};

struct Violation {
  std::string field;
  std::vector<int> index;  // empty for scalar fields
  std::string message;
};

std::string ToString(const Violation& violation);

// Empty iff every game invariant holds. Never throws.
std::vector<Violation> ValidateGame(const CooperativeMarkovGame& game);

// Single-state, two-agent, gamma = 0 game whose reward is `matrix[a1][a2]`.
CooperativeMarkovGame NewMatrixGame(
    const std::vector<std::vector<double>>& matrix);

// The 3x3 coordination game with diagonal (5, 10, 20) and -20 elsewhere.
CooperativeMarkovGame CoordinationMatrixGame();

struct RandomGameParams {
  std::uint64_t seed = 0;
  int num_agents = 2;
  int num_states = 1;
  std::vector<int> action_counts = {2, 2};
  double reward_low = -1.0;
  double reward_high = 1.0;
  double gamma = 0.9;
};

// Deterministic in `params`: rewards are uniform on [low, high], transition
// rows are uniform draws normalized to sum to one, initial_dist likewise.
CooperativeMarkovGame RandomGame(const RandomGameParams& params);

// One agent's stochastic policy: a row-stochastic |S| x |A^i| table.
class AgentPolicy {
 public:
  AgentPolicy() = default;
  AgentPolicy(int agent_id, int num_states, int num_actions,
              std::vector<double> table, double floor = 0.0);

  static AgentPolicy Uniform(int agent_id, int num_states, int num_actions);
  // The same row at every state.
  static AgentPolicy FromRow(int agent_id, int num_states,
                             std::span<const double> row);

  int agent_id() const { return agent_id_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  double floor() const { return floor_; }

  std::span<const double> row(int s) const {
    return {table_.data() + static_cast<std::size_t>(s) * num_actions_,
            static_cast<std::size_t>(num_actions_)};
  }
  std::span<double> mutable_row(int s) {
    return {table_.data() + static_cast<std::size_t>(s) * num_actions_,
            static_cast<std::size_t>(num_actions_)};
  }
  double prob(int s, int a) const {
    return table_[static_cast<std::size_t>(s) * num_actions_ + a];
  }
  const std::vector<double>& table() const { return table_; }

  bool operator==(const AgentPolicy&) const = default;

 private:
  int agent_id_ = 0;
  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<double> table_;
  double floor_ = 0.0;
};

// Row sums within `tol` of one and entries >= floor. Empty means valid.
std::vector<Violation> ValidatePolicy(const AgentPolicy& policy,
                                      double tol = 1e-12);

// Product policy pi(a|s) = prod_i pi^i(a^i|s); agent i sits at position i.
class JointPolicy {
 public:
  JointPolicy() = default;
  explicit JointPolicy(std::vector<AgentPolicy> agents);

  static JointPolicy Uniform(const CooperativeMarkovGame& game);
  // Every agent plays `row` at every state; all agents need |row| actions.
  static JointPolicy Symmetric(const CooperativeMarkovGame& game,
                               std::span<const double> row);

  int num_agents() const { return static_cast<int>(agents_.size()); }
  const AgentPolicy& agent(int i) const { return agents_[i]; }
  const AgentPolicy& operator[](int i) const { return agents_[i]; }
  void set_agent(int i, AgentPolicy policy);
  const std::vector<AgentPolicy>& agents() const { return agents_; }

  // Throws InvalidInput unless shapes match `game`.
  void CheckCompatible(const CooperativeMarkovGame& game) const;

  bool operator==(const JointPolicy&) const = default;

 private:
  std::vector<AgentPolicy> agents_;
};

// Max over agents, states and actions of |p - q|.
double SupNormDistance(const AgentPolicy& p, const AgentPolicy& q);
double SupNormDistance(const JointPolicy& p, const JointPolicy& q);

// A bijection on {0, ..., n-1}, read as an agent update order.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> ordering);

  static Permutation Identity(int n);

  int size() const { return static_cast<int>(ordering_.size()); }
  int operator[](int m) const { return ordering_[m]; }
  const std::vector<int>& ordering() const { return ordering_; }

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<int> ordering_;
};

// Shannon entropy in nats with 0 log 0 = 0.
double RowEntropy(std::span<const double> row);
double PolicyEntropy(const AgentPolicy& policy, int s);

double JointActionProb(const JointPolicy& policy, int s,
                       std::span<const int> joint_action);
double JointActionProb(const JointPolicy& policy,
                       const JointActionSpace& space, int s, int joint);

// pi(.|s) over all flattened joint actions.
std::vector<double> JointDistribution(const JointPolicy& policy,
                                      const JointActionSpace& space, int s);

// Expands one user seed into independent, reproducible streams.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

}  // namespace maxent_marl

#endif  // MAXENT_MARL_GAME_H_

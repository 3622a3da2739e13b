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

// Independent reference computations for the tests. Everything here works
// from the raw game tensors and policy tables with plain loops, and never
// calls the library's evaluation or update code.

#ifndef MAXENT_MARL_TESTS_ORACLES_H_
#define MAXENT_MARL_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "maxent_marl/game.h"

namespace maxent_marl::testing {

// Decodes a flat joint index with agent 0 as the slowest digit.
inline std::vector<int> DecodeJoint(const std::vector<int>& counts,
                                    int index) {
  std::vector<int> out(counts.size());
  for (int i = static_cast<int>(counts.size()) - 1; i >= 0; --i) {
    out[i] = index % counts[i];
    index /= counts[i];
  }
  return out;
}

inline int NumJoint(const std::vector<int>& counts) {
  int n = 1;
  for (int c : counts) n *= c;
  return n;
}

inline double ProductProb(const JointPolicy& policy, int s,
                          const std::vector<int>& actions) {
  double p = 1.0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    p *= policy.agent(static_cast<int>(i)).table()
             [static_cast<std::size_t>(s) *
                  policy.agent(static_cast<int>(i)).num_actions() +
              actions[i]];
  }
  return p;
}

inline double NaiveEntropy(const std::vector<double>& row) {
  double h = 0.0;
  for (double p : row) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

inline std::vector<double> RowOf(const AgentPolicy& policy, int s) {
  const auto row = policy.row(s);
  return {row.begin(), row.end()};
}

// Soft Q by fixed-point iteration of the plain recursion, to 1e-14.
// With alpha = 0 this is ordinary policy evaluation.
inline std::vector<std::vector<double>> BruteSoftQ(
    const CooperativeMarkovGame& game, const JointPolicy& policy,
    double alpha) {
  const auto& counts = game.action_counts();
  const int num_joint = NumJoint(counts);
  const int num_states = game.num_states();
  std::vector<double> bonus(num_states, 0.0);
  for (int s = 0; s < num_states; ++s) {
    for (int i = 0; i < game.num_agents(); ++i) {
      bonus[s] += alpha * NaiveEntropy(RowOf(policy.agent(i), s));
    }
  }
  std::vector<std::vector<double>> q(num_states,
                                     std::vector<double>(num_joint, 0.0));
  for (int sweep = 0; sweep < 200000; ++sweep) {
    std::vector<double> v(num_states, 0.0);
    for (int s = 0; s < num_states; ++s) {
      v[s] = bonus[s];
      for (int j = 0; j < num_joint; ++j) {
        v[s] += ProductProb(policy, s, DecodeJoint(counts, j)) * q[s][j];
      }
    }
    double change = 0.0;
    for (int s = 0; s < num_states; ++s) {
      for (int j = 0; j < num_joint; ++j) {
        double next = game.reward(s, j);
        const auto row = game.transition_row(s, j);
        for (int t = 0; t < num_states; ++t) {
          next += game.gamma() * row[t] * v[t];
        }
        change = std::max(change, std::abs(next - q[s][j]));
        q[s][j] = next;
      }
    }
    if (change < 1e-14 || game.gamma() == 0.0) break;
  }
  return q;
}

inline std::vector<double> BruteSoftV(const CooperativeMarkovGame& game,
                                      const JointPolicy& policy,
                                      double alpha) {
  const auto q = BruteSoftQ(game, policy, alpha);
  const auto& counts = game.action_counts();
  std::vector<double> v(game.num_states(), 0.0);
  for (int s = 0; s < game.num_states(); ++s) {
    for (int i = 0; i < game.num_agents(); ++i) {
      v[s] += alpha * NaiveEntropy(RowOf(policy.agent(i), s));
    }
    for (int j = 0; j < NumJoint(counts); ++j) {
      v[s] += ProductProb(policy, s, DecodeJoint(counts, j)) * q[s][j];
    }
  }
  return v;
}

inline double BruteReturn(const CooperativeMarkovGame& game,
                          const JointPolicy& policy, double alpha) {
  const auto v = BruteSoftV(game, policy, alpha);
  double j = 0.0;
  for (int s = 0; s < game.num_states(); ++s) j += game.initial_dist()[s] * v[s];
  return j;
}

struct OptimalSolution {
  std::vector<double> values;
  std::vector<int> greedy_joint;  // per state
};

// Standard value iteration over joint actions.
inline OptimalSolution ValueIteration(const CooperativeMarkovGame& game) {
  const int num_states = game.num_states();
  const int num_joint = game.num_joint_actions();
  OptimalSolution out{std::vector<double>(num_states, 0.0),
                      std::vector<int>(num_states, 0)};
  for (int sweep = 0; sweep < 200000; ++sweep) {
    double change = 0.0;
    std::vector<double> next(num_states);
    for (int s = 0; s < num_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < num_joint; ++j) {
        double value = game.reward(s, j);
        const auto row = game.transition_row(s, j);
        for (int t = 0; t < num_states; ++t) {
          value += game.gamma() * row[t] * out.values[t];
        }
        if (value > best) {
          best = value;
          out.greedy_joint[s] = j;
        }
      }
      next[s] = best;
      change = std::max(change, std::abs(best - out.values[s]));
    }
    out.values = next;
    if (change < 1e-14 || game.gamma() == 0.0) break;
  }
  return out;
}

// exp(c / alpha) / sum, without the max shift; fine for moderate inputs.
inline std::vector<double> NaiveSoftmax(const std::vector<double>& c,
                                        double alpha) {
  std::vector<double> out(c.size());
  double z = 0.0;
  for (std::size_t a = 0; a < c.size(); ++a) {
    out[a] = std::exp(c[a] / alpha);
    z += out[a];
  }
  for (double& p : out) p /= z;
  return out;
}

// Maximizes f over (p, 1 - p) on a uniform grid.
inline std::vector<double> GridArgmaxTwoActions(
    const std::function<double(const std::vector<double>&)>& f,
    double resolution) {
  std::vector<double> best = {0.0, 1.0};
  double best_value = -std::numeric_limits<double>::infinity();
  const int steps = static_cast<int>(std::lround(1.0 / resolution));
  for (int k = 1; k < steps; ++k) {
    const double p = k * resolution;
    const std::vector<double> row = {p, 1.0 - p};
    const double value = f(row);
    if (value > best_value) {
      best_value = value;
      best = row;
    }
  }
  return best;
}

}  // namespace maxent_marl::testing

#endif  // MAXENT_MARL_TESTS_ORACLES_H_

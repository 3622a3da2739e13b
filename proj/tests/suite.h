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

// The seeded random-game suite shared by property tests and the acceptance
// binary: 100 games with 2-3 agents, at most 5 states and 4 actions per agent,
// gamma in {0.5, 0.9}, rewards uniform on [-1, 1].

#ifndef MAXENT_MARL_TESTS_SUITE_H_
#define MAXENT_MARL_TESTS_SUITE_H_

#include <cstdint>
#include <random>
#include <vector>

#include "maxent_marl/game.h"

namespace maxent_marl::testing {

inline constexpr int kSuiteSize = 100;
inline constexpr std::uint64_t kSuiteSeed = 20240611;
inline constexpr double kSuiteAlphas[] = {0.1, 1.0, 5.0};

inline RandomGameParams SuiteParams(int index) {
  std::mt19937_64 rng(DeriveSeed(kSuiteSeed, static_cast<std::uint64_t>(index)));
  RandomGameParams params;
  params.seed = rng();
  params.num_agents = std::uniform_int_distribution<int>(2, 3)(rng);
  params.num_states = std::uniform_int_distribution<int>(1, 5)(rng);
  params.action_counts.clear();
  for (int i = 0; i < params.num_agents; ++i) {
    params.action_counts.push_back(std::uniform_int_distribution<int>(2, 4)(rng));
  }
  params.gamma = std::uniform_int_distribution<int>(0, 1)(rng) ? 0.9 : 0.5;
  return params;
}

inline CooperativeMarkovGame SuiteGame(int index) {
  return RandomGame(SuiteParams(index));
}

// A strictly positive random policy, for evaluation and decomposition checks.
inline JointPolicy RandomPolicy(const CooperativeMarkovGame& game,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::vector<AgentPolicy> agents;
  for (int i = 0; i < game.num_agents(); ++i) {
    std::vector<double> table;
    for (int s = 0; s < game.num_states(); ++s) {
      std::vector<double> row(game.num_actions(i));
      double total = 0.0;
      for (double& p : row) total += (p = unit(rng));
      for (double& p : row) table.push_back(p / total);
    }
    agents.emplace_back(i, game.num_states(), game.num_actions(i),
                        std::move(table));
  }
  return JointPolicy(std::move(agents));
}

}  // namespace maxent_marl::testing

#endif  // MAXENT_MARL_TESTS_SUITE_H_

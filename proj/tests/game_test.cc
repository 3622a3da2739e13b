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

#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "maxent_marl/error.h"
#include "maxent_marl/game.h"
#include "oracles.h"
#include "suite.h"

namespace maxent_marl {
namespace {

const std::vector<double> kStart = {0.6, 0.2, 0.2};

TEST(JointActionSpaceTest, AgentZeroVariesSlowest) {
  JointActionSpace space({2, 3, 4});
  EXPECT_EQ(space.size(), 24);
  EXPECT_EQ(space.Flatten(std::vector<int>{1, 0, 0}), 12);
  EXPECT_EQ(space.Flatten(std::vector<int>{0, 1, 0}), 4);
  EXPECT_EQ(space.Flatten(std::vector<int>{0, 0, 1}), 1);
  for (int j = 0; j < space.size(); ++j) {
    const std::vector<int> actions = space.Unflatten(j);
    EXPECT_EQ(actions, testing::DecodeJoint({2, 3, 4}, j));
    EXPECT_EQ(space.Flatten(actions), j);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(space.ActionOf(j, i), actions[i]);
  }
}

TEST(JointActionSpaceTest, RejectsOutOfRangeActions) {
  JointActionSpace space({2, 2});
  EXPECT_THROW(space.Flatten(std::vector<int>{2, 0}), InvalidInput);
  EXPECT_THROW(space.Flatten(std::vector<int>{0}), InvalidInput);
  EXPECT_THROW(JointActionSpace({2, 0}), InvalidInput);
}

TEST(MatrixGameTest, CoordinationGameIsValid) {
  const CooperativeMarkovGame game = CoordinationMatrixGame();
  EXPECT_TRUE(ValidateGame(game).empty());
  EXPECT_EQ(game.num_agents(), 2);
  EXPECT_EQ(game.num_states(), 1);
  EXPECT_EQ(game.gamma(), 0.0);
  const double diagonal[] = {5, 10, 20};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      EXPECT_EQ(game.reward(0, 3 * a + b), a == b ? diagonal[a] : -20.0);
    }
  }
}

TEST(MatrixGameTest, OneByOne) {
  const CooperativeMarkovGame game = NewMatrixGame({{0.0}});
  EXPECT_TRUE(ValidateGame(game).empty());
  EXPECT_EQ(game.num_joint_actions(), 1);
  EXPECT_EQ(game.reward(0, 0), 0.0);
}

TEST(MatrixGameTest, IdentityPayoffIsValid) {
  const CooperativeMarkovGame game = NewMatrixGame({{1, 0}, {0, 1}});
  EXPECT_TRUE(ValidateGame(game).empty());
  EXPECT_EQ(game.reward(0, 0), 1.0);
  EXPECT_EQ(game.reward(0, 3), 1.0);
  EXPECT_EQ(game.reward(0, 1), 0.0);
}

TEST(MatrixGameTest, RejectsRaggedAndNonFinite) {
  EXPECT_THROW(NewMatrixGame({{1, 2}, {3}}), InvalidInput);
  EXPECT_THROW(NewMatrixGame({}), InvalidInput);
  try {
    NewMatrixGame({{1, 2}, {3, NAN}});
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("(1, 1)"), std::string::npos)
        << e.what();
  }
}

TEST(RandomGameTest, SeedSevenIsValid) {
  RandomGameParams params;
  params.seed = 7;
  params.num_states = 3;
  const CooperativeMarkovGame game = RandomGame(params);
  EXPECT_TRUE(ValidateGame(game).empty());
  for (double r : game.reward_tensor()) {
    EXPECT_GE(r, -1.0);
    EXPECT_LE(r, 1.0);
  }
}

TEST(RandomGameTest, Deterministic) {
  for (int g = 0; g < 20; ++g) {
    const RandomGameParams params = testing::SuiteParams(g);
    const CooperativeMarkovGame a = RandomGame(params);
    const CooperativeMarkovGame b = RandomGame(params);
    EXPECT_EQ(a.reward_tensor(), b.reward_tensor());
    EXPECT_EQ(a.transition_tensor(), b.transition_tensor());
    EXPECT_TRUE(a == b);
  }
  RandomGameParams other = testing::SuiteParams(0);
  other.seed += 1;
  EXPECT_FALSE(RandomGame(other) == testing::SuiteGame(0));
}

TEST(RandomGameTest, RejectsBadParameters) {
  RandomGameParams params;
  params.seed = 7;
  params.num_states = 3;
  params.gamma = 1.0;
  EXPECT_THROW(RandomGame(params), InvalidInput);
  params.gamma = 0.9;
  params.num_states = 0;
  EXPECT_THROW(RandomGame(params), InvalidInput);
  params.num_states = 3;
  params.action_counts = {2, 0};
  EXPECT_THROW(RandomGame(params), InvalidInput);
  params.action_counts = {2, 2};
  params.reward_low = 2.0;
  EXPECT_THROW(RandomGame(params), InvalidInput);
}

TEST(ValidateGameTest, NamesTheBadTransitionRow) {
  const CooperativeMarkovGame good = testing::SuiteGame(3);
  std::vector<double> transition = good.transition_tensor();
  const int s = good.num_states() - 1;
  const int j = 1;
  const std::size_t offset =
      (static_cast<std::size_t>(s) * good.num_joint_actions() + j) *
      good.num_states();
  double total = 0.0;
  for (int t = 0; t < good.num_states(); ++t) {
    transition[offset + t] *= 0.9;
    total += transition[offset + t];
  }
  ASSERT_NEAR(total, 0.9, 1e-12);
  const CooperativeMarkovGame bad(
      good.action_counts(), good.num_states(), good.reward_tensor(), transition,
      good.gamma(),
      std::vector<double>(good.initial_dist().begin(), good.initial_dist().end()));
  const auto violations = ValidateGame(bad);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].field, "transition");
  EXPECT_EQ(violations[0].index, (std::vector<int>{s, j}));
}

TEST(ValidateGameTest, NamesGamma) {
  const CooperativeMarkovGame good = CoordinationMatrixGame();
  const CooperativeMarkovGame bad(good.action_counts(), 1, good.reward_tensor(),
                                  good.transition_tensor(), 1.0, {1.0});
  const auto violations = ValidateGame(bad);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].field, "gamma");
  EXPECT_NE(ToString(violations[0]).find("gamma"), std::string::npos);
}

TEST(ValidateGameTest, ReportsEveryProblem) {
  const CooperativeMarkovGame good = CoordinationMatrixGame();
  std::vector<double> reward = good.reward_tensor();
  reward[4] = INFINITY;
  std::vector<double> transition = good.transition_tensor();
  transition[2] = 0.5;
  const CooperativeMarkovGame bad(good.action_counts(), 1, reward, transition,
                                  -0.1, {0.7});
  std::set<std::string> fields;
  for (const Violation& v : ValidateGame(bad)) fields.insert(v.field);
  EXPECT_EQ(fields, (std::set<std::string>{"reward", "transition",
                                           "initial_dist", "gamma"}));
}

TEST(EntropyTest, KnownRows) {
  const double uniform[] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  EXPECT_NEAR(RowEntropy(uniform), std::log(3.0), 1e-15);
  EXPECT_NEAR(std::log(3.0), 1.0986, 1e-4);
  const double vertex[] = {1.0, 0.0, 0.0};
  EXPECT_EQ(RowEntropy(vertex), 0.0);
  const AgentPolicy start = AgentPolicy::FromRow(0, 1, kStart);
  EXPECT_NEAR(PolicyEntropy(start, 0), testing::NaiveEntropy(kStart), 1e-15);
  EXPECT_NEAR(PolicyEntropy(start, 0), 0.95027, 1e-5);
}

TEST(JointActionProbTest, CoordinationGameCells) {
  const CooperativeMarkovGame game = CoordinationMatrixGame();
  const JointPolicy policy = JointPolicy::Symmetric(game, kStart);
  EXPECT_NEAR(JointActionProb(policy, 0, std::vector<int>{0, 0}), 0.36, 1e-15);
  EXPECT_NEAR(JointActionProb(policy, 0, std::vector<int>{0, 1}), 0.12, 1e-15);
  const JointPolicy deterministic = JointPolicy::Symmetric(
      game, std::vector<double>{0.0, 0.0, 1.0});
  EXPECT_EQ(JointActionProb(deterministic, 0, std::vector<int>{2, 2}), 1.0);
  EXPECT_EQ(JointActionProb(deterministic, game.joint_actions(), 0, 8), 1.0);
}

TEST(JointActionProbTest, ProductConsistencyOnSuite) {
  for (int g = 0; g < testing::kSuiteSize; ++g) {
    const CooperativeMarkovGame game = testing::SuiteGame(g);
    const JointPolicy policy = testing::RandomPolicy(game, g);
    for (int s = 0; s < game.num_states(); ++s) {
      double total = 0.0;
      for (double p : JointDistribution(policy, game.joint_actions(), s)) {
        total += p;
      }
      EXPECT_NEAR(total, 1.0, 1e-10) << "game " << g << " state " << s;
      for (int j = 0; j < game.num_joint_actions(); ++j) {
        EXPECT_NEAR(JointActionProb(policy, game.joint_actions(), s, j),
                    testing::ProductProb(
                        policy, s, testing::DecodeJoint(game.action_counts(), j)),
                    1e-15);
      }
    }
  }
}

TEST(JointActionProbTest, EntropyIsAdditive) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomGameParams params;
    params.seed = seed;
    params.num_states = 2;
    params.action_counts = {2, 2};
    const CooperativeMarkovGame game = RandomGame(params);
    const JointPolicy policy = testing::RandomPolicy(game, seed + 100);
    for (int s = 0; s < game.num_states(); ++s) {
      const auto joint = JointDistribution(policy, game.joint_actions(), s);
      double sum = 0.0;
      for (int i = 0; i < game.num_agents(); ++i) sum += PolicyEntropy(policy[i], s);
      EXPECT_NEAR(testing::NaiveEntropy(joint), sum, 1e-12);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 100);
}

TEST(PolicyTest, ValidatePolicyFlagsBadRows) {
  AgentPolicy bad(0, 2, 2, {0.5, 0.5, 0.7, 0.2});
  const auto violations = ValidatePolicy(bad);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].index[1], 1);
  EXPECT_TRUE(ValidatePolicy(AgentPolicy::Uniform(0, 3, 4)).empty());
  AgentPolicy negative(0, 1, 2, {1.2, -0.2});
  EXPECT_FALSE(ValidatePolicy(negative).empty());
  AgentPolicy floored(0, 1, 2, {1.0, 0.0}, 0.01);
  EXPECT_FALSE(ValidatePolicy(floored).empty());
}

TEST(PolicyTest, JointPolicyChecksSlots) {
  std::vector<AgentPolicy> agents = {AgentPolicy::Uniform(1, 1, 2),
                                     AgentPolicy::Uniform(0, 1, 2)};
  EXPECT_THROW(JointPolicy{agents}, InvalidInput);
  const JointPolicy uniform = JointPolicy::Uniform(CoordinationMatrixGame());
  EXPECT_THROW(uniform.CheckCompatible(NewMatrixGame({{1, 2}, {3, 4}})),
               InvalidInput);
}

TEST(PermutationTest, RejectsNonBijections) {
  EXPECT_THROW(Permutation({0, 0}), InvalidInput);
  EXPECT_THROW(Permutation({1, 2}), InvalidInput);
  EXPECT_EQ(Permutation::Identity(3).ordering(), (std::vector<int>{0, 1, 2}));
}

TEST(DeriveSeedTest, StreamsAreDistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t stream = 0; stream < 1000; ++stream) {
    seen.insert(DeriveSeed(42, stream));
    EXPECT_EQ(DeriveSeed(42, stream), DeriveSeed(42, stream));
  }
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(DeriveSeed(1, 0), DeriveSeed(2, 0));
}

}  // namespace
}  // namespace maxent_marl

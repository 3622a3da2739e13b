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

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "maxent_marl/error.h"
#include "maxent_marl/game.h"
#include "maxent_marl/haspi.h"
#include "maxent_marl/qre_oracle.h"
#include "maxent_marl/soft_dp.h"
#include "oracles.h"
#include "suite.h"

namespace maxent_marl {
namespace {

const std::vector<double> kStart = {0.6, 0.2, 0.2};

// Largest gap between each agent's row and the softmax of its expected Q,
// with Q from the independent recursion.
double BruteResidual(const CooperativeMarkovGame& game, const JointPolicy& policy,
                     double alpha) {
  const auto q = testing::BruteSoftQ(game, policy, alpha);
  double worst = 0.0;
  for (int i = 0; i < game.num_agents(); ++i) {
    for (int s = 0; s < game.num_states(); ++s) {
      std::vector<double> coefs(game.num_actions(i), 0.0);
      for (int j = 0; j < game.num_joint_actions(); ++j) {
        const auto actions = testing::DecodeJoint(game.action_counts(), j);
        double others = 1.0;
        for (int k = 0; k < game.num_agents(); ++k) {
          if (k != i) others *= policy[k].prob(s, actions[k]);
        }
        coefs[actions[i]] += others * q[s][j];
      }
      const double top = *std::max_element(coefs.begin(), coefs.end());
      for (double& c : coefs) c -= top;
      const auto response = testing::NaiveSoftmax(coefs, alpha);
      for (int a = 0; a < game.num_actions(i); ++a) {
        worst = std::max(worst, std::abs(response[a] - policy[i].prob(s, a)));
      }
    }
  }
  return worst;
}

TEST(LogitResponseTest, CoordinationGameFirstAgent) {
  const CooperativeMarkovGame game = CoordinationMatrixGame();
  const JointPolicy start = JointPolicy::Symmetric(game, kStart);
  const AgentPolicy response = LogitResponse(game, start, 0, 1.0);
  EXPECT_NEAR(response.prob(0, 0), 0.9990, 5e-5);
  EXPECT_NEAR(response.prob(0, 1), 0.0001, 5e-5);
  EXPECT_NEAR(response.prob(0, 2), 0.0009, 5e-5);
}

TEST(LogitResponseTest, ConstantGameAndHotLimit) {
  const CooperativeMarkovGame flat = NewMatrixGame({{2, 2, 2}, {2, 2, 2}});
  const JointPolicy start(std::vector<AgentPolicy>{
      AgentPolicy::FromRow(0, 1, std::vector<double>{0.9, 0.1}),
      AgentPolicy::FromRow(1, 1, kStart)});
  const AgentPolicy flat_response = LogitResponse(flat, start, 1, 0.5);
  for (double p : flat_response.table()) {
    EXPECT_NEAR(p, 1.0 / 3, 1e-15);
  }
  const CooperativeMarkovGame game = CoordinationMatrixGame();
  const AgentPolicy hot =
      LogitResponse(game, JointPolicy::Symmetric(game, kStart), 0, 1e6);
  for (double p : hot.table()) {
    EXPECT_NEAR(p, 1.0 / 3, 1e-3);
  }
  EXPECT_THROW(LogitResponse(game, JointPolicy::Uniform(game), 0, 0.0),
               InvalidInput);
}

TEST(QreResidualTest, KnownValues) {
  const CooperativeMarkovGame game = CoordinationMatrixGame();
  const JointPolicy start = JointPolicy::Symmetric(game, kStart);
  EXPECT_NEAR(QreResidual(game, start, 1.0), 0.3990, 1e-4);
  EXPECT_NEAR(QreResidual(game, start, 1.0), BruteResidual(game, start, 1.0), 1e-12);

  const std::vector<double> rewards = {0.3, 1.1, -0.4};
  const CooperativeMarkovGame bandit({3}, 1, rewards, {1, 1, 1}, 0.0, {1.0});
  const JointPolicy optimal(std::vector<AgentPolicy>{
      AgentPolicy::FromRow(0, 1, testing::NaiveSoftmax(rewards, 0.7))});
  EXPECT_LE(QreResidual(bandit, optimal, 0.7), 1e-12);
}

TEST(QreFixedPointTest, CoordinationGameRows) {
  const CooperativeMarkovGame game = CoordinationMatrixGame();
  const JointPolicy start = JointPolicy::Symmetric(game, kStart);
  const struct {
    double alpha;
    std::vector<double> row;
  } cases[] = {{10.0, {0.0221, 0.0224, 0.9555}}, {20.0, {0.2514, 0.2790, 0.4697}}};
  for (const auto& c : cases) {
    const QreSolution solution = QreFixedPoint(game, c.alpha, QreOptions{}, start);
    EXPECT_TRUE(solution.converged);
    EXPECT_EQ(solution.damping, 0.5);
    for (int i = 0; i < 2; ++i) {
      for (int a = 0; a < 3; ++a) {
        EXPECT_NEAR(solution.policy[i].prob(0, a), c.row[a], 5e-5);
      }
    }
  }
}

TEST(QreFixedPointTest, StoredResidualIsReproducible) {
  for (int g = 0; g < 30; ++g) {
    const CooperativeMarkovGame game = testing::SuiteGame(g);
    const QreSolution solution =
        QreFixedPoint(game, 1.0, QreOptions{}, JointPolicy::Uniform(game));
    EXPECT_NEAR(QreResidual(game, solution.policy, 1.0), solution.residual, 1e-12);
    if (solution.converged) {
      EXPECT_LE(solution.residual, 1e-12);
      EXPECT_LE(BruteResidual(game, solution.policy, 1.0), 1e-10);
    }
  }
}

TEST(QreFixedPointTest, ReportsNonConvergence) {
  const CooperativeMarkovGame game = CoordinationMatrixGame();
  const QreSolution solution = QreFixedPoint(game, 15.0, QreOptions{0.5, 1e-12, 3},
                                             JointPolicy::Symmetric(game, kStart));
  EXPECT_FALSE(solution.converged);
  EXPECT_GT(solution.residual, 1e-12);
  EXPECT_THROW(QreFixedPoint(game, 1.0, QreOptions{0.0, 1e-12, 10},
                             JointPolicy::Uniform(game)),
               InvalidInput);
  EXPECT_THROW(QreFixedPoint(game, 1.0, QreOptions{1.5, 1e-12, 10},
                             JointPolicy::Uniform(game)),
               InvalidInput);
}

TEST(QreFixedPointTest, AgreesWithHaspiAtModerateTemperature) {
  int compared = 0;
  for (int g = 0; g < testing::kSuiteSize; ++g) {
    const CooperativeMarkovGame game = testing::SuiteGame(g);
    for (double alpha : {1.0, 5.0}) {
      HaspiOptions options;
      options.alpha = alpha;
      const SolveResult haspi = HaspiSolve(game, JointPolicy::Uniform(game), options);
      const QreSolution qre =
          QreFixedPoint(game, alpha, QreOptions{}, JointPolicy::Uniform(game));
      if (haspi.trace.status != SolveStatus::kConverged || !qre.converged) continue;
      EXPECT_LE(SupNormDistance(haspi.policy, qre.policy), 1e-6)
          << "game " << g << " alpha " << alpha;
      ++compared;
    }
  }
  EXPECT_GT(compared, 150);
}

// At low temperature a game can have several logit equilibria, and the two
// solvers may settle in different ones. Both limits must still be exact
// fixed points.
TEST(QreFixedPointTest, DistinctLimitsAreBothEquilibria) {
  int distinct = 0;
  for (int g = 0; g < testing::kSuiteSize; ++g) {
    const CooperativeMarkovGame game = testing::SuiteGame(g);
    HaspiOptions options;
    options.alpha = 0.1;
    const SolveResult haspi = HaspiSolve(game, JointPolicy::Uniform(game), options);
    const QreSolution qre =
        QreFixedPoint(game, 0.1, QreOptions{}, JointPolicy::Uniform(game));
    if (haspi.trace.status != SolveStatus::kConverged || !qre.converged) continue;
    if (SupNormDistance(haspi.policy, qre.policy) <= 1e-6) continue;
    ++distinct;
    EXPECT_LE(BruteResidual(game, haspi.policy, 0.1), 1e-8) << "game " << g;
    EXPECT_LE(BruteResidual(game, qre.policy, 0.1), 1e-8) << "game " << g;
  }
  EXPECT_GT(distinct, 0);
}

TEST(EnumeratePureNashTest, KnownGames) {
  using Profiles = std::vector<std::vector<int>>;
  auto sorted = [](Profiles p) {
    std::sort(p.begin(), p.end());
    return p;
  };
  EXPECT_EQ(sorted(EnumeratePureNash(CoordinationMatrixGame())),
            (Profiles{{0, 0}, {1, 1}, {2, 2}}));
  EXPECT_EQ(EnumeratePureNash(NewMatrixGame({{4, 4, 4}, {4, 4, 4}, {4, 4, 4}})).size(),
            9u);
  EXPECT_EQ(sorted(EnumeratePureNash(NewMatrixGame({{1, 0}, {0, 2}}))),
            (Profiles{{0, 0}, {1, 1}}));
  EXPECT_THROW(EnumeratePureNash(testing::SuiteGame(0).num_states() > 1
                                     ? testing::SuiteGame(0)
                                     : testing::SuiteGame(1)),
               InvalidInput);
}

TEST(EnumeratePureNashTest, ColdEquilibriumSitsOnAPureNash) {
  const CooperativeMarkovGame game = CoordinationMatrixGame();
  const QreSolution cold = QreFixedPoint(game, 0.1, QreOptions{},
                                         JointPolicy::Symmetric(game, kStart));
  const auto joint = JointDistribution(cold.policy, game.joint_actions(), 0);
  const int mode = static_cast<int>(
      std::max_element(joint.begin(), joint.end()) - joint.begin());
  EXPECT_GT(joint[mode], 0.99);
  const auto nash = EnumeratePureNash(game);
  EXPECT_NE(std::find(nash.begin(), nash.end(), game.joint_actions().Unflatten(mode)),
            nash.end());
}

TEST(JointKlObjectiveTest, ZeroWhenTheBoltzmannFactorizes) {
  // Additive rewards r(a, b) = u(a) + v(b) make exp(Q / alpha) a product.
  const std::vector<double> u = {0.5, -1.0, 2.0};
  const std::vector<double> v = {1.5, 0.0};
  std::vector<std::vector<double>> matrix(3, std::vector<double>(2));
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 2; ++b) matrix[a][b] = u[a] + v[b];
  }
  const CooperativeMarkovGame game = NewMatrixGame(matrix);
  const double alpha = 0.8;
  const JointPolicy boltzmann(std::vector<AgentPolicy>{
      AgentPolicy::FromRow(0, 1, testing::NaiveSoftmax(u, alpha)),
      AgentPolicy::FromRow(1, 1, testing::NaiveSoftmax(v, alpha))});
  const SoftQTable q = EvaluatePolicyExact(game, JointPolicy::Uniform(game), alpha);
  EXPECT_NEAR(JointKlObjective(game, q, boltzmann, alpha, 0), 0.0, 1e-12);
  EXPECT_GT(JointKlObjective(game, q, JointPolicy::Uniform(game), alpha, 0), 1e-3);

  const CooperativeMarkovGame flat = NewMatrixGame({{3, 3}, {3, 3}});
  const SoftQTable q_flat = EvaluatePolicyExact(flat, JointPolicy::Uniform(flat), 1.0);
  EXPECT_NEAR(JointKlObjective(flat, q_flat, JointPolicy::Uniform(flat), 1.0, 0), 0.0,
              1e-12);
}

TEST(JointKlObjectiveTest, MatchesDirectSum) {
  const CooperativeMarkovGame game = CoordinationMatrixGame();
  const JointPolicy start = JointPolicy::Symmetric(game, kStart);
  for (double alpha : {1.0, 10.0}) {
    const SoftQTable q = EvaluatePolicyExact(game, start, alpha);
    double z = 0.0;
    for (int j = 0; j < 9; ++j) z += std::exp(q.at(0, j) / alpha);
    double expected = 0.0;
    for (int j = 0; j < 9; ++j) {
      const double p = testing::ProductProb(start, 0, testing::DecodeJoint({3, 3}, j));
      expected += p * (std::log(p) - (q.at(0, j) / alpha - std::log(z)));
    }
    EXPECT_NEAR(JointKlObjective(game, q, start, alpha, 0), expected, 1e-12);
  }
}

TEST(SimplexGridTest, PointsAreDistributions) {
  EXPECT_EQ(SimplexGrid(3, 0.5).size(), 6u);
  EXPECT_EQ(SimplexGrid(2, 0.01).size(), 101u);
  EXPECT_EQ(SimplexGrid(1, 0.1).size(), 1u);
  for (const auto& point : SimplexGrid(4, 0.1)) {
    double total = 0.0;
    for (double p : point) {
      EXPECT_GE(p, 0.0);
      total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(UnilateralDeviationGainTest, EquilibriumAndStart) {
  const CooperativeMarkovGame game = CoordinationMatrixGame();
  const JointPolicy start = JointPolicy::Symmetric(game, kStart);
  HaspiOptions options;
  options.alpha = 10.0;
  options.tol_policy = 1e-12;
  const SolveResult solved = HaspiSolve(game, start, options);
  EXPECT_LE(UnilateralDeviationGain(game, solved.policy, 10.0, 0.01), 1e-3);
  EXPECT_GT(UnilateralDeviationGain(game, start, 1.0, 0.01), 0.1);
  // Q spans [-20, 20] at gamma = 0.
  EXPECT_NEAR(DeviationGridSlack(game, start, 1.0, 0.01), 0.4, 1e-12);
  EXPECT_LE(UnilateralDeviationGain(game, solved.policy, 10.0, 0.01),
            DeviationGridSlack(game, solved.policy, 10.0, 0.01));
  EXPECT_THROW(DeviationGridSlack(game, start, 1.0, 0.0), InvalidInput);
}

TEST(UnilateralDeviationGainTest, SingleActionAgentsAndLimits) {
  const CooperativeMarkovGame single = NewMatrixGame({{1.5}});
  EXPECT_EQ(UnilateralDeviationGain(single, JointPolicy::Uniform(single), 1.0), 0.0);
  const CooperativeMarkovGame wide =
      NewMatrixGame(std::vector<std::vector<double>>(5, std::vector<double>(2, 0.0)));
  EXPECT_THROW(UnilateralDeviationGain(wide, JointPolicy::Uniform(wide), 1.0),
               InvalidInput);
}

TEST(UnilateralDeviationGainTest, NoGainAtCertifiedEquilibria) {
  int checked = 0;
  for (int g = 0; g < testing::kSuiteSize && checked < 15; ++g) {
    const RandomGameParams params = testing::SuiteParams(g);
    if (params.num_states > 2 || params.num_agents > 2) continue;
    const CooperativeMarkovGame game = RandomGame(params);
    const QreSolution solution =
        QreFixedPoint(game, 1.0, QreOptions{}, JointPolicy::Uniform(game));
    if (solution.residual > 1e-8) continue;
    EXPECT_LE(UnilateralDeviationGain(game, solution.policy, 1.0, 0.05), 1e-7)
        << "game " << g;
    ++checked;
  }
  EXPECT_GT(checked, 5);
}

}  // namespace
}  // namespace maxent_marl

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

#include <vector>

#include <benchmark/benchmark.h>

#include "maxent_marl/game.h"
#include "maxent_marl/haspi.h"
#include "maxent_marl/mehaml.h"
#include "maxent_marl/qre_oracle.h"
#include "maxent_marl/soft_dp.h"

namespace maxent_marl {
namespace {

// Three agents with `actions` actions each over `states` states.
CooperativeMarkovGame BenchGame(int states, int actions) {
  RandomGameParams params;
  params.seed = 2024;
  params.num_agents = 3;
  params.num_states = states;
  params.action_counts.assign(3, actions);
  params.gamma = 0.9;
  return RandomGame(params);
}

void BM_EvaluatePolicyExact(benchmark::State& state) {
  const CooperativeMarkovGame game =
      BenchGame(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const JointPolicy policy = JointPolicy::Uniform(game);
  for (auto _ : state) {
    benchmark::DoNotOptimize(EvaluatePolicyExact(game, policy, 1.0));
  }
}
BENCHMARK(BM_EvaluatePolicyExact)->Args({5, 3})->Args({20, 3})->Args({50, 4});

void BM_EvaluatePolicyIterative(benchmark::State& state) {
  const CooperativeMarkovGame game = BenchGame(static_cast<int>(state.range(0)), 3);
  const JointPolicy policy = JointPolicy::Uniform(game);
  for (auto _ : state) {
    benchmark::DoNotOptimize(EvaluatePolicyIterative(game, policy, 1.0, 1e-10));
  }
}
BENCHMARK(BM_EvaluatePolicyIterative)->Arg(5)->Arg(20);

void BM_MultiAgentSoftQ(benchmark::State& state) {
  const CooperativeMarkovGame game = BenchGame(10, static_cast<int>(state.range(0)));
  const JointPolicy policy = JointPolicy::Uniform(game);
  const SoftQTable q = EvaluatePolicyExact(game, policy, 1.0);
  const std::vector<int> prefix = {2, 0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputeMultiAgentSoftQ(game, policy, q, prefix, 1.0));
  }
}
BENCHMARK(BM_MultiAgentSoftQ)->Arg(2)->Arg(4);

void BM_HaspiMatrixGame(benchmark::State& state) {
  const CooperativeMarkovGame game = CoordinationMatrixGame();
  const std::vector<double> start = {0.6, 0.2, 0.2};
  HaspiOptions options;
  options.alpha = static_cast<double>(state.range(0));
  options.tol_policy = 1e-12;
  options.record_trace = false;
  options.permutation_rule = PermutationRule::Fixed(Permutation({0, 1}));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        HaspiSolve(game, JointPolicy::Symmetric(game, start), options));
  }
}
BENCHMARK(BM_HaspiMatrixGame)->Arg(1)->Arg(10)->Arg(20);

void BM_HaspiMarkovGame(benchmark::State& state) {
  const CooperativeMarkovGame game = BenchGame(10, 3);
  HaspiOptions options;
  options.alpha = 1.0;
  options.record_trace = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(HaspiSolve(game, JointPolicy::Uniform(game), options));
  }
}
BENCHMARK(BM_HaspiMarkovGame);

void BM_MehamlKlDrift(benchmark::State& state) {
  const CooperativeMarkovGame game = BenchGame(10, 3);
  const DriftPtr drift = KlDrift(1.0);
  const NeighborhoodPtr full = FullNeighborhood();
  MehamlOptions options;
  options.alpha = 1.0;
  options.record_trace = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(MehamlSolve(game, JointPolicy::Uniform(game), *drift,
                                         *full, StateWeighting::Uniform(10), options));
  }
}
BENCHMARK(BM_MehamlKlDrift);

void BM_QreFixedPoint(benchmark::State& state) {
  const CooperativeMarkovGame game = CoordinationMatrixGame();
  const std::vector<double> start = {0.6, 0.2, 0.2};
  const double alpha = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(QreFixedPoint(game, alpha, QreOptions{},
                                           JointPolicy::Symmetric(game, start)));
  }
}
BENCHMARK(BM_QreFixedPoint)->Arg(1)->Arg(10);

}  // namespace
}  // namespace maxent_marl

BENCHMARK_MAIN();

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

#include "maxent_marl/solve_trace.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "maxent_marl/error.h"
#include "maxent_marl/qre_oracle.h"
#include "policy_iteration.h"

namespace maxent_marl {

PermutationRule PermutationRule::Fixed(Permutation ordering) {
  PermutationRule rule;
  rule.kind_ = Kind::kFixed;
  rule.fixed_ = std::move(ordering);
  return rule;
}

PermutationRule PermutationRule::Random(std::uint64_t seed) {
  PermutationRule rule;
  rule.kind_ = Kind::kRandom;
  rule.seed_ = seed;
  return rule;
}

PermutationRule PermutationRule::Cyclic() {
  PermutationRule rule;
  rule.kind_ = Kind::kCyclic;
  return rule;
}

Permutation PermutationRule::ForIteration(int iteration, int num_agents) const {
  switch (kind_) {
    case Kind::kFixed:
      if (fixed_.size() != num_agents) {
        throw InvalidInput("fixed ordering has " +
                           std::to_string(fixed_.size()) + " agents, game has " +
                           std::to_string(num_agents));
      }
      return fixed_;
    case Kind::kCyclic: {
      std::vector<int> ordering(num_agents);
      for (int m = 0; m < num_agents; ++m) {
        ordering[m] = (m + iteration) % num_agents;
      }
      return Permutation(std::move(ordering));
    }
    case Kind::kRandom: {
      std::vector<int> ordering(num_agents);
      std::iota(ordering.begin(), ordering.end(), 0);
      std::mt19937_64 rng(DeriveSeed(seed_, static_cast<std::uint64_t>(iteration)));
      std::shuffle(ordering.begin(), ordering.end(), rng);
      return Permutation(std::move(ordering));
    }
  }
  throw InternalError("unknown permutation rule");
}

std::string ToString(PermutationRule::Kind kind) {
  switch (kind) {
    case PermutationRule::Kind::kFixed:
      return "fixed";
    case PermutationRule::Kind::kRandom:
      return "random";
    case PermutationRule::Kind::kCyclic:
      return "cyclic";
  }
  return "unknown";
}

std::string ToString(SolveStatus status) {
  return status == SolveStatus::kConverged ? "converged" : "max_iters";
}

namespace internal {
namespace {

IterationRecord MakeRecord(const CooperativeMarkovGame& game,
                           const JointPolicy& policy, const SoftQTable& q,
                           double alpha, int iteration,
                           std::vector<int> permutation, double change) {
  IterationRecord record;
  record.iteration = iteration;
  record.state_values = SoftValue(game, policy, q, alpha).values;
  for (int s = 0; s < game.num_states(); ++s) {
    record.objective += game.initial_dist()[s] * record.state_values[s];
  }
  record.qre_residual = QreResidualGivenQ(game, policy, q, alpha);
  record.permutation = std::move(permutation);
  record.policy_change = change;
  record.policy = policy;
  return record;
}

}  // namespace

SolveResult RunPolicyIteration(const CooperativeMarkovGame& game,
                               const JointPolicy& initial_policy,
                               const LoopSettings& settings,
                               const ImproveFn& improve) {
  initial_policy.CheckCompatible(game);
  SolveResult result;
  result.policy = initial_policy;
  result.q = EvaluatePolicy(game, result.policy, settings.alpha,
                            settings.evaluation);
  result.trace.records.push_back(
      MakeRecord(game, result.policy, result.q, settings.alpha, 0, {}, 0.0));

  for (int k = 0; k < settings.max_outer_iters; ++k) {
    const Permutation order =
        settings.sequential
            ? settings.permutation_rule.ForIteration(k, game.num_agents())
            : Permutation::Identity(game.num_agents());
    JointPolicy next = improve(result.q, result.policy, order);
    const double change = SupNormDistance(next, result.policy);
    result.policy = std::move(next);
    result.q = EvaluatePolicy(game, result.policy, settings.alpha,
                              settings.evaluation);
    IterationRecord record = MakeRecord(
        game, result.policy, result.q, settings.alpha, k + 1,
        settings.sequential ? order.ordering() : std::vector<int>{}, change);
    if (settings.record_trace) {
      result.trace.records.push_back(std::move(record));
    } else {
      result.trace.records.back() = std::move(record);
    }
    result.trace.iterations = k + 1;
    if (change < settings.tol_policy) {
      result.trace.status = SolveStatus::kConverged;
      return result;
    }
  }
  result.trace.status = SolveStatus::kMaxIters;
  return result;
}

}  // namespace internal
}  // namespace maxent_marl

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

#ifndef MAXENT_MARL_SOFT_DP_H_
#define MAXENT_MARL_SOFT_DP_H_

#include <span>
#include <vector>

#include "maxent_marl/game.h"

namespace maxent_marl {

// Joint soft Q-function Q(s, a) under the entropy-augmented objective.
// Q(s, a) excludes the entropy bonus at s itself; it accrues from s' onward.
struct SoftQTable {
  double alpha = 0.0;
  int num_states = 0;
  int num_joint_actions = 0;
  std::vector<double> values;

  static SoftQTable Zeros(const CooperativeMarkovGame& game, double alpha);

  double at(int s, int joint) const {
    return values[static_cast<std::size_t>(s) * num_joint_actions + joint];
  }
  double& at(int s, int joint) {
    return values[static_cast<std::size_t>(s) * num_joint_actions + joint];
  }
  std::span<const double> row(int s) const {
    return {values.data() + static_cast<std::size_t>(s) * num_joint_actions,
            static_cast<std::size_t>(num_joint_actions)};
  }
};

// V(s) = E_{a~pi}[Q(s, a)] + alpha * sum_i H(pi^i(.|s)).
struct SoftValueTable {
  double alpha = 0.0;
  std::vector<double> values;

  double operator[](int s) const { return values[s]; }
};

// A table over (s, a^{k_1}, ..., a^{k_m}) for an ordered agent subset k_{1:m}.
// Entries are row-major in subset order. Used both for multi-agent soft Q
// values and for multi-agent soft advantages.
class AgentSubsetTable {
 public:
  AgentSubsetTable(double alpha, std::vector<int> agents,
                   const CooperativeMarkovGame& game,
                   std::vector<double> values);

  double alpha() const { return alpha_; }
  const std::vector<int>& agents() const { return agents_; }
  const JointActionSpace& space() const { return space_; }
  int num_states() const { return num_states_; }

  double at(int s, int flat) const {
    return values_[static_cast<std::size_t>(s) * space_.size() + flat];
  }
  double at(int s, std::span<const int> subset_actions) const {
    return at(s, space_.Flatten(subset_actions));
  }
  std::span<const double> row(int s) const {
    return {values_.data() + static_cast<std::size_t>(s) * space_.size(),
            static_cast<std::size_t>(space_.size())};
  }
  const std::vector<double>& values() const { return values_; }

 private:
  double alpha_;
  std::vector<int> agents_;
  JointActionSpace space_;
  int num_states_;
  std::vector<double> values_;
};

using MultiAgentSoftQ = AgentSubsetTable;
using MultiAgentSoftAdvantage = AgentSubsetTable;

// alpha * sum_i H(pi^i(.|s)).
double EntropyBonus(const JointPolicy& policy, int s, double alpha);

// Q'(s, a) = r(s, a) + gamma * sum_s' P(s'|s, a) V(s'), V from SoftValue.
SoftQTable SoftBellmanBackup(const CooperativeMarkovGame& game,
                             const JointPolicy& policy, const SoftQTable& q,
                             double alpha);

SoftValueTable SoftValue(const CooperativeMarkovGame& game,
                         const JointPolicy& policy, const SoftQTable& q,
                         double alpha);

// Sup-norm of SoftBellmanBackup(q) - q.
double SoftBellmanResidual(const CooperativeMarkovGame& game,
                           const JointPolicy& policy, const SoftQTable& q,
                           double alpha);

struct IterativeEvaluation {
  SoftQTable q;
  int iterations = 0;
  double residual = 0.0;  // sup-norm change of the last backup
};

// Repeated backups from Q = 0 until the contraction bound
// gamma / (1 - gamma) * |Q_k - Q_{k-1}| drops below `tol`, so the returned
// table is within `tol` of the fixed point. With gamma = 0 a single backup is exact and is returned immediately.
// Throws NonConvergence (carrying the last change) after `max_iters`.
IterativeEvaluation EvaluatePolicyIterative(const CooperativeMarkovGame& game,
                                            const JointPolicy& policy,
                                            double alpha, double tol = 1e-10,
                                            int max_iters = 100000);

// Direct solve of the soft Bellman fixed point. The entropy bonus depends on
// the policy but not on Q, so V solves (I - gamma M_pi) V = r_pi + h_pi and
// Q = r + gamma P V. Dense LU with partial pivoting.
SoftQTable EvaluatePolicyExact(const CooperativeMarkovGame& game,
                               const JointPolicy& policy, double alpha);

struct EvaluationOptions {
  enum class Method { kExact, kIterative };
  Method method = Method::kExact;
  double tol = 1e-10;
  int max_iters = 100000;
};

SoftQTable EvaluatePolicy(const CooperativeMarkovGame& game,
                          const JointPolicy& policy, double alpha,
                          const EvaluationOptions& options);

// Q^{i_{1:m}}(s, a^{i_{1:m}}) = E_{a^{-i_{1:m}} ~ pi}[Q(s, a)]
//                              + alpha * sum_{k not in prefix} H(pi^k(.|s)).
// An empty prefix yields V; the full ordering yields Q reindexed.
MultiAgentSoftQ ComputeMultiAgentSoftQ(const CooperativeMarkovGame& game,
                                       const JointPolicy& policy,
                                       const SoftQTable& q,
                                       std::span<const int> prefix,
                                       double alpha);

// A^{subset}(s, a^{cond}, a^{subset}) = Q^{cond, subset} - Q^{cond}. The
// result is keyed by the concatenation cond ++ subset.
MultiAgentSoftAdvantage ComputeMultiAgentSoftAdvantage(
    const CooperativeMarkovGame& game, const JointPolicy& policy,
    const SoftQTable& q, std::span<const int> cond, std::span<const int> subset,
    double alpha);

// Softmax of coefficients / alpha, computed after subtracting the maximum.
// Rows are strictly positive for finite input; throws InvalidInput for
// alpha <= 0 and InternalError if an exponent is still non-finite.
std::vector<double> BoltzmannRow(std::span<const double> coefficients,
                                 double alpha);

// J = sum_s d(s) V(s), with V from the exact evaluation.
double MaxEntReturn(const CooperativeMarkovGame& game,
                    const JointPolicy& policy, double alpha);

}  // namespace maxent_marl

#endif  // MAXENT_MARL_SOFT_DP_H_

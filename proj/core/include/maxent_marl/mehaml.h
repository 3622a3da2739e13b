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

#ifndef MAXENT_MARL_MEHAML_H_
#define MAXENT_MARL_MEHAML_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maxent_marl/game.h"
#include "maxent_marl/soft_dp.h"
#include "maxent_marl/solve_trace.h"

namespace maxent_marl {

// Heterogeneous-agent drift functional D_pi^i(candidate | s, updated prefix).
// Implementations must be non-negative, vanish at candidate == pi^i and have
// zero directional derivative there; HadfPropertyCheck probes both.
class DriftFunctional {
 public:
  virtual ~DriftFunctional() = default;

  virtual std::string name() const = 0;

  // `candidate.agent_id()` names the agent whose current policy is
  // current[candidate.agent_id()].
  virtual double Evaluate(const JointPolicy& current,
                          const AgentPolicy& candidate, int s,
                          std::span<const AgentPolicy> updated_prefix) const = 0;

  // Set when the drift is c * KL(candidate || current) at every state, which
  // admits a closed-form MEHAMO maximizer.
  virtual std::optional<double> KlCoefficient() const { return std::nullopt; }
};

using DriftPtr = std::shared_ptr<const DriftFunctional>;

// D = 0.
DriftPtr TrivialDrift();
// D = beta_coef * KL(candidate(.|s) || pi^i(.|s)); beta_coef >= 0.
DriftPtr KlDrift(double beta_coef);
// D = coef * 0.5 * ||candidate(.|s) - pi^i(.|s)||_1. Non-negative but not
// flat at the identity, so it is not a valid HADF.
DriftPtr TotalVariationDrift(double coef);

// Feasible region U(pi^i) around the incumbent policy. Every instance
// contains the incumbent itself.
class NeighborhoodOperator {
 public:
  virtual ~NeighborhoodOperator() = default;

  virtual std::string name() const = 0;
  virtual double radius() const = 0;
  virtual bool is_full() const { return false; }
  virtual bool Contains(const AgentPolicy& current,
                        std::span<const double> candidate_row, int s) const = 0;
};

using NeighborhoodPtr = std::shared_ptr<const NeighborhoodOperator>;

NeighborhoodPtr FullNeighborhood();
// { p : KL(p || pi^i(.|s)) <= radius }.
NeighborhoodPtr KlBallNeighborhood(double radius);

// Sampling distribution beta over states. States with zero weight keep the
// incumbent row, since the expected MEHAMO does not depend on them.
struct StateWeighting {
  std::vector<double> weights;

  static StateWeighting Uniform(int num_states);
  void Validate(int num_states) const;
};

// [M V_pi](s) = E_{a^prefix ~ updated, a^i ~ candidate}[Q^{prefix, i}_pi(s, .)
//               - alpha log candidate(a^i|s)] - D_pi^i(candidate | s, prefix).
double MehamoEval(const CooperativeMarkovGame& game, const JointPolicy& policy,
                  const SoftQTable& q, const DriftFunctional& drift,
                  const AgentPolicy& candidate,
                  std::span<const AgentPolicy> updated_prefix, int agent,
                  double alpha, int s);

// E_{s ~ beta}[[M V_pi](s)].
double ExpectedMehamo(const CooperativeMarkovGame& game,
                      const JointPolicy& policy, const SoftQTable& q,
                      const DriftFunctional& drift,
                      const AgentPolicy& candidate,
                      std::span<const AgentPolicy> updated_prefix, int agent,
                      double alpha, const StateWeighting& weighting);

enum class MehamlUpdateMode {
  // Exact maximizer; needs a KL-type (or trivial) drift and the full
  // neighborhood.
  kClosedForm,
  // Backtracking along (1 - t) pi_old + t target, accepting the first t that
  // stays in the neighborhood and does not lower the MEHAMO.
  kLineSearch,
};

std::string ToString(MehamlUpdateMode mode);

AgentPolicy MehamlLocalUpdate(const CooperativeMarkovGame& game,
                              const SoftQTable& q_old,
                              const JointPolicy& policy_old,
                              std::span<const AgentPolicy> updated_prefix,
                              int agent, double alpha,
                              const DriftFunctional& drift,
                              const NeighborhoodOperator& neighborhood,
                              MehamlUpdateMode mode,
                              const StateWeighting* weighting = nullptr);

struct MehamlOptions {
  double alpha = 1.0;
  double tol_policy = 1e-10;
  EvaluationOptions evaluation;
  int max_outer_iters = 10000;
  PermutationRule permutation_rule = PermutationRule::Random(0);
  bool record_trace = true;
  MehamlUpdateMode mode = MehamlUpdateMode::kClosedForm;

  void Validate() const;
};

SolveResult MehamlSolve(const CooperativeMarkovGame& game,
                        const JointPolicy& initial_policy,
                        const DriftFunctional& drift,
                        const NeighborhoodOperator& neighborhood,
                        const StateWeighting& weighting,
                        const MehamlOptions& options);

struct HadfReport {
  double min_value = 0.0;           // most negative D(pi, candidate) seen
  double max_identity_value = 0.0;  // largest |D(pi, pi)|
  // Largest ratio D(pi + eps delta) / eps^2 at the smallest and the largest
  // probe size; a flat drift keeps these comparable.
  double small_eps_ratio = 0.0;
  double large_eps_ratio = 0.0;
  bool nonnegative = true;
  bool zero_gradient = true;

  bool passed() const { return nonnegative && zero_gradient; }
};

// Non-negativity over all ordered pairs of sample rows, and quadratic decay
// along random simplex-tangent directions at each interior sample.
HadfReport HadfPropertyCheck(const DriftFunctional& drift,
                             std::span<const std::vector<double>> sample_rows,
                             std::span<const double> epsilons,
                             std::uint64_t seed = 0);

}  // namespace maxent_marl

#endif  // MAXENT_MARL_MEHAML_H_

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

#ifndef MAXENT_MARL_SOLVE_TRACE_H_
#define MAXENT_MARL_SOLVE_TRACE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "maxent_marl/game.h"
#include "maxent_marl/soft_dp.h"

namespace maxent_marl {

// Chooses the agent update order for each outer iteration. Random orders are
// a pure function of (seed, iteration), so two solvers sharing a seed see the
// same sequence of permutations.
class PermutationRule {
 public:
  enum class Kind { kFixed, kRandom, kCyclic };

  static PermutationRule Fixed(Permutation ordering);
  static PermutationRule Random(std::uint64_t seed);
  // Identity rotated left by the iteration number.
  static PermutationRule Cyclic();

  Kind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  const Permutation& fixed_ordering() const { return fixed_; }

  Permutation ForIteration(int iteration, int num_agents) const;

 private:
  Kind kind_ = Kind::kRandom;
  Permutation fixed_;
  std::uint64_t seed_ = 0;
};

std::string ToString(PermutationRule::Kind kind);

enum class SolveStatus { kConverged, kMaxIters };

std::string ToString(SolveStatus status);

// One evaluated iterate pi_k.
struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;  // J(pi_k); MaxEnt for soft solvers, standard for baselines
  std::vector<double> state_values;
  double qre_residual = 0.0;
  // Order used to produce pi_k from pi_{k-1}; empty for k = 0 or for
  // simultaneous updates.
  std::vector<int> permutation;
  double policy_change = 0.0;  // sup-norm |pi_k - pi_{k-1}|, 0 for k = 0
  JointPolicy policy;
};

struct SolveTrace {
  std::vector<IterationRecord> records;
  SolveStatus status = SolveStatus::kMaxIters;
  int iterations = 0;  // number of improvement steps taken
};

struct SolveResult {
  JointPolicy policy;
  SoftQTable q;
  SolveTrace trace;
};

}  // namespace maxent_marl

#endif  // MAXENT_MARL_SOLVE_TRACE_H_

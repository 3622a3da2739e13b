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

#ifndef MAXENT_MARL_QRE_ORACLE_H_
#define MAXENT_MARL_QRE_ORACLE_H_

#include <vector>

#include "maxent_marl/game.h"
#include "maxent_marl/soft_dp.h"

namespace maxent_marl {

// Equilibrium machinery used to check the policy-iteration solvers. Nothing
// here calls into the HASPI/MEHAML update code.

// Per state, the Boltzmann distribution at temperature alpha over
// E_{a^{-i} ~ pi^{-i}}[Q_pi(s, a^i, a^{-i})], with Q_pi the exact soft Q of
// the current joint policy.
AgentPolicy LogitResponse(const CooperativeMarkovGame& game,
                          const JointPolicy& policy, int agent, double alpha);

// Same, reusing an already evaluated Q_pi.
AgentPolicy LogitResponseGivenQ(const CooperativeMarkovGame& game,
                                const JointPolicy& policy, const SoftQTable& q,
                                int agent, double alpha);

// max_i max_s || pi^i(.|s) - LogitResponse_i(.|s) ||_inf.
double QreResidual(const CooperativeMarkovGame& game, const JointPolicy& policy,
                   double alpha);
double QreResidualGivenQ(const CooperativeMarkovGame& game,
                         const JointPolicy& policy, const SoftQTable& q,
                         double alpha);

struct QreOptions {
  double damping = 0.5;
  double tol = 1e-12;
  int max_iters = 100000;
};

struct QreSolution {
  JointPolicy policy;
  double residual = 0.0;
  int iterations = 0;
  double damping = 0.0;
  bool converged = false;
};

// Damped simultaneous logit iteration
//   pi <- (1 - damping) pi + damping * LogitResponse(pi)   (all agents at once)
// with Q re-evaluated every sweep. Returns the lowest-residual iterate; a
// run that never gets below tol comes back with converged = false.
QreSolution QreFixedPoint(const CooperativeMarkovGame& game, double alpha,
                          const QreOptions& options,
                          const JointPolicy& initial_policy);

// All joint actions of a single-state game where no agent can strictly raise
// the reward by a unilateral deviation.
std::vector<std::vector<int>> EnumeratePureNash(
    const CooperativeMarkovGame& game);

// KL(pi(.|s) || exp(Q_old(s, .) / alpha) / Z(s)) for the product policy pi,
// by enumeration of joint actions.
double JointKlObjective(const CooperativeMarkovGame& game,
                        const SoftQTable& q_old,
                        const JointPolicy& candidate, double alpha, int s);

// Points of the probability simplex on a grid of the given resolution.
std::vector<std::vector<double>> SimplexGrid(int num_actions,
                                             double resolution);

// Largest MaxEnt-return gain J(alt) - J(pi) over deviations in which one
// agent replaces its row at one state by a simplex grid point. Staying put is
// always an option, so the result is >= 0. Agents with more than four actions
// are rejected.
double UnilateralDeviationGain(const CooperativeMarkovGame& game,
                               const JointPolicy& policy, double alpha,
                               double grid_resolution = 0.01);

// Allowance for the grid in UnilateralDeviationGain: L * resolution, with L
// the spread max Q - min Q of the policy's soft Q table.
double DeviationGridSlack(const CooperativeMarkovGame& game,
                          const JointPolicy& policy, double alpha,
                          double grid_resolution = 0.01);

}  // namespace maxent_marl

#endif  // MAXENT_MARL_QRE_ORACLE_H_

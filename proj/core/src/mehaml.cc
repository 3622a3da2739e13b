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

#include "maxent_marl/mehaml.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "maxent_marl/error.h"
#include "maxent_marl/haspi.h"
#include "policy_iteration.h"

namespace maxent_marl {
namespace {

constexpr int kMaxBacktracks = 60;

double RowKl(std::span<const double> p, std::span<const double> q) {
  double kl = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] <= 0.0) continue;
    if (q[a] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p[a] * std::log(p[a] / q[a]);
  }
  return kl;
}

class Trivial final : public DriftFunctional {
 public:
  std::string name() const override { return "trivial"; }
  double Evaluate(const JointPolicy&, const AgentPolicy&, int,
                  std::span<const AgentPolicy>) const override {
    return 0.0;
  }
  std::optional<double> KlCoefficient() const override { return 0.0; }
};

class Kl final : public DriftFunctional {
 public:
  explicit Kl(double beta) : beta_(beta) {}
  std::string name() const override { return "kl"; }
  double Evaluate(const JointPolicy& current, const AgentPolicy& candidate,
                  int s, std::span<const AgentPolicy>) const override {
    if (beta_ == 0.0) return 0.0;
    return beta_ *
           RowKl(candidate.row(s), current[candidate.agent_id()].row(s));
  }
  std::optional<double> KlCoefficient() const override { return beta_; }

 private:
  double beta_;
};

class TotalVariation final : public DriftFunctional {
 public:
  explicit TotalVariation(double coef) : coef_(coef) {}
  std::string name() const override { return "tv"; }
  double Evaluate(const JointPolicy& current, const AgentPolicy& candidate,
                  int s, std::span<const AgentPolicy>) const override {
    const auto p = candidate.row(s);
    const auto q = current[candidate.agent_id()].row(s);
    double l1 = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) l1 += std::abs(p[a] - q[a]);
    return coef_ * 0.5 * l1;
  }

 private:
  double coef_;
};

class Full final : public NeighborhoodOperator {
 public:
  std::string name() const override { return "full"; }
  double radius() const override {
    return std::numeric_limits<double>::infinity();
  }
  bool is_full() const override { return true; }
  bool Contains(const AgentPolicy&, std::span<const double>,
                int) const override {
    return true;
  }
};

class KlBall final : public NeighborhoodOperator {
 public:
  explicit KlBall(double radius) : radius_(radius) {}
  std::string name() const override { return "kl_ball"; }
  double radius() const override { return radius_; }
  bool Contains(const AgentPolicy& current, std::span<const double> candidate,
                int s) const override {
    return RowKl(candidate, current.row(s)) <= radius_;
  }

 private:
  double radius_;
};

// argmax_p sum_a p(a) (qbar(a) - alpha log p(a)) - beta KL(p || incumbent),
// i.e. p proportional to incumbent^{beta/(alpha+beta)} exp(qbar/(alpha+beta)).
std::vector<double> KlClosedFormRow(std::span<const double> qbar,
                                    std::span<const double> incumbent,
                                    double alpha, double beta) {
  if (beta == 0.0) return BoltzmannRow(qbar, alpha);
  std::vector<double> logits;
  std::vector<std::size_t> support;
  for (std::size_t a = 0; a < qbar.size(); ++a) {
    if (incumbent[a] > 0.0) {
      support.push_back(a);
      logits.push_back(beta * std::log(incumbent[a]) + qbar[a]);
    }
  }
  const std::vector<double> on_support = BoltzmannRow(logits, alpha + beta);
  std::vector<double> row(qbar.size(), 0.0);
  for (std::size_t k = 0; k < support.size(); ++k) {
    row[support[k]] = on_support[k];
  }
  return row;
}

double EntropyRegularizedValue(std::span<const double> qbar,
                               std::span<const double> row, double alpha) {
  double value = 0.0;
  for (std::size_t a = 0; a < row.size(); ++a) {
    if (row[a] > 0.0) value += row[a] * (qbar[a] - alpha * std::log(row[a]));
  }
  return value;
}

void CheckCandidate(const CooperativeMarkovGame& game,
                    const AgentPolicy& candidate, int agent) {
  if (candidate.agent_id() != agent) {
    throw InvalidInput("candidate policy belongs to agent " +
                       std::to_string(candidate.agent_id()) + ", not " +
                       std::to_string(agent));
  }
  if (candidate.num_states() != game.num_states() ||
      candidate.num_actions() != game.num_actions(agent)) {
    throw InvalidInput("candidate policy shape does not match the game");
  }
}

}  // namespace

DriftPtr TrivialDrift() { return std::make_shared<Trivial>(); }

DriftPtr KlDrift(double beta_coef) {
  if (!(beta_coef >= 0.0) || !std::isfinite(beta_coef)) {
    throw InvalidInput("KL drift coefficient must be finite and >= 0");
  }
  return std::make_shared<Kl>(beta_coef);
}

DriftPtr TotalVariationDrift(double coef) {
  if (!(coef >= 0.0)) throw InvalidInput("drift coefficient must be >= 0");
  return std::make_shared<TotalVariation>(coef);
}

NeighborhoodPtr FullNeighborhood() { return std::make_shared<Full>(); }

NeighborhoodPtr KlBallNeighborhood(double radius) {
  if (!(radius > 0.0)) throw InvalidInput("KL ball radius must be positive");
  return std::make_shared<KlBall>(radius);
}

StateWeighting StateWeighting::Uniform(int num_states) {
  return {std::vector<double>(num_states, 1.0 / num_states)};
}

void StateWeighting::Validate(int num_states) const {
  if (static_cast<int>(weights.size()) != num_states) {
    throw InvalidInput("state weighting length differs from the state count");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidInput("state weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidInput("state weights must sum to one");
  }
}

std::string ToString(MehamlUpdateMode mode) {
  return mode == MehamlUpdateMode::kClosedForm ? "closed_form" : "line_search";
}

double MehamoEval(const CooperativeMarkovGame& game, const JointPolicy& policy,
                  const SoftQTable& q, const DriftFunctional& drift,
                  const AgentPolicy& candidate,
                  std::span<const AgentPolicy> updated_prefix, int agent,
                  double alpha, int s) {
  CheckCandidate(game, candidate, agent);
  const std::vector<double> qbar =
      PrefixAveragedSoftQ(game, q, policy, updated_prefix, agent, alpha);
  const int n = game.num_actions(agent);
  return EntropyRegularizedValue(
             std::span<const double>(qbar).subspan(
                 static_cast<std::size_t>(s) * n, n),
             candidate.row(s), alpha) -
         drift.Evaluate(policy, candidate, s, updated_prefix);
}

double ExpectedMehamo(const CooperativeMarkovGame& game,
                      const JointPolicy& policy, const SoftQTable& q,
                      const DriftFunctional& drift,
                      const AgentPolicy& candidate,
                      std::span<const AgentPolicy> updated_prefix, int agent,
                      double alpha, const StateWeighting& weighting) {
  weighting.Validate(game.num_states());
  CheckCandidate(game, candidate, agent);
  const std::vector<double> qbar =
      PrefixAveragedSoftQ(game, q, policy, updated_prefix, agent, alpha);
  const int n = game.num_actions(agent);
  double total = 0.0;
  for (int s = 0; s < game.num_states(); ++s) {
    if (weighting.weights[s] == 0.0) continue;
    const double value =
        EntropyRegularizedValue(std::span<const double>(qbar).subspan(
                                    static_cast<std::size_t>(s) * n, n),
                                candidate.row(s), alpha) -
        drift.Evaluate(policy, candidate, s, updated_prefix);
    total += weighting.weights[s] * value;
  }
  return total;
}

AgentPolicy MehamlLocalUpdate(const CooperativeMarkovGame& game,
                              const SoftQTable& q_old,
                              const JointPolicy& policy_old,
                              std::span<const AgentPolicy> updated_prefix,
                              int agent, double alpha,
                              const DriftFunctional& drift,
                              const NeighborhoodOperator& neighborhood,
                              MehamlUpdateMode mode,
                              const StateWeighting* weighting) {
  if (!(alpha > 0.0)) throw InvalidInput("temperature alpha must be positive");
  const std::optional<double> kl_coef = drift.KlCoefficient();
  if (mode == MehamlUpdateMode::kClosedForm) {
    if (!kl_coef) {
      throw InvalidInput("drift '" + drift.name() +
                         "' has no closed-form update; use line_search mode");
    }
    if (!neighborhood.is_full()) {
      throw InvalidInput("closed_form ignores the '" + neighborhood.name() +
                         "' constraint; use line_search mode");
    }
  }
  if (weighting != nullptr) weighting->Validate(game.num_states());

  const std::vector<double> qbar =
      PrefixAveragedSoftQ(game, q_old, policy_old, updated_prefix, agent, alpha);
  const AgentPolicy& incumbent = policy_old[agent];
  const int n = game.num_actions(agent);
  AgentPolicy updated = incumbent;

  for (int s = 0; s < game.num_states(); ++s) {
    if (weighting != nullptr && weighting->weights[s] == 0.0) continue;
    const auto qbar_s =
        std::span<const double>(qbar).subspan(static_cast<std::size_t>(s) * n, n);
    const std::vector<double> target =
        kl_coef ? KlClosedFormRow(qbar_s, incumbent.row(s), alpha, *kl_coef)
                : BoltzmannRow(qbar_s, alpha);

    if (mode == MehamlUpdateMode::kClosedForm) {
      std::copy(target.begin(), target.end(), updated.mutable_row(s).begin());
      continue;
    }

    AgentPolicy probe = incumbent;
    auto score = [&](std::span<const double> row) {
      std::copy(row.begin(), row.end(), probe.mutable_row(s).begin());
      return EntropyRegularizedValue(qbar_s, row, alpha) -
             drift.Evaluate(policy_old, probe, s, updated_prefix);
    };
    const double incumbent_score = score(incumbent.row(s));
    std::vector<double> mix(n);
    double t = 1.0;
    for (int attempt = 0; attempt <= kMaxBacktracks; ++attempt, t *= 0.5) {
      for (int a = 0; a < n; ++a) {
        mix[a] = (1.0 - t) * incumbent.prob(s, a) + t * target[a];
      }
      if (neighborhood.Contains(incumbent, mix, s) &&
          score(mix) >= incumbent_score) {
        std::copy(mix.begin(), mix.end(), updated.mutable_row(s).begin());
        break;
      }
    }
  }
  return updated;
}

void MehamlOptions::Validate() const {
  if (!(alpha > 0.0)) throw InvalidInput("temperature alpha must be positive");
  if (!(tol_policy > 0.0)) throw InvalidInput("tol_policy must be positive");
  if (!(evaluation.tol > 0.0)) throw InvalidInput("evaluation tol must be positive");
  if (max_outer_iters < 0) throw InvalidInput("max_outer_iters must be >= 0");
}

SolveResult MehamlSolve(const CooperativeMarkovGame& game,
                        const JointPolicy& initial_policy,
                        const DriftFunctional& drift,
                        const NeighborhoodOperator& neighborhood,
                        const StateWeighting& weighting,
                        const MehamlOptions& options) {
  options.Validate();
  weighting.Validate(game.num_states());

  internal::LoopSettings settings;
  settings.alpha = options.alpha;
  settings.tol_policy = options.tol_policy;
  settings.evaluation = options.evaluation;
  settings.max_outer_iters = options.max_outer_iters;
  settings.record_trace = options.record_trace;
  settings.permutation_rule = options.permutation_rule;

  return internal::RunPolicyIteration(
      game, initial_policy, settings,
      [&](const SoftQTable& q, const JointPolicy& policy,
          const Permutation& order) {
        JointPolicy next = policy;
        std::vector<AgentPolicy> prefix;
        for (int m = 0; m < order.size(); ++m) {
          AgentPolicy updated = MehamlLocalUpdate(
              game, q, policy, prefix, order[m], options.alpha, drift,
              neighborhood, options.mode, &weighting);
          next.set_agent(order[m], updated);
          prefix.push_back(std::move(updated));
        }
        return next;
      });
}

HadfReport HadfPropertyCheck(const DriftFunctional& drift,
                             std::span<const std::vector<double>> sample_rows,
                             std::span<const double> epsilons,
                             std::uint64_t seed) {
  HadfReport report;
  auto as_policy = [](const std::vector<double>& row) {
    return AgentPolicy(0, 1, static_cast<int>(row.size()), row);
  };

  for (const auto& base : sample_rows) {
    const JointPolicy current({as_policy(base)});
    report.max_identity_value =
        std::max(report.max_identity_value,
                 std::abs(drift.Evaluate(current, current[0], 0, {})));
    for (const auto& other : sample_rows) {
      if (other.size() != base.size()) continue;
      report.min_value = std::min(
          report.min_value, drift.Evaluate(current, as_policy(other), 0, {}));
    }
  }
  report.nonnegative = report.min_value >= 0.0 &&
                       report.max_identity_value <= 1e-15;

  if (epsilons.empty()) return report;
  const double eps_small = *std::min_element(epsilons.begin(), epsilons.end());
  const double eps_large = *std::max_element(epsilons.begin(), epsilons.end());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  constexpr int kDirectionsPerSample = 8;
  for (const auto& base : sample_rows) {
    if (base.size() < 2) continue;
    if (*std::min_element(base.begin(), base.end()) <= eps_large) continue;
    const JointPolicy current({as_policy(base)});
    for (int d = 0; d < kDirectionsPerSample; ++d) {
      std::vector<double> direction(base.size());
      for (double& x : direction) x = normal(rng);
      const double mean =
          std::accumulate(direction.begin(), direction.end(), 0.0) /
          direction.size();
      double norm = 0.0;
      for (double& x : direction) {
        x -= mean;
        norm += x * x;
      }
      norm = std::sqrt(norm);
      if (norm == 0.0) continue;
      for (double& x : direction) x /= norm;

      auto ratio_at = [&](double eps) {
        std::vector<double> moved(base.size());
        for (std::size_t a = 0; a < base.size(); ++a) {
          moved[a] = base[a] + eps * direction[a];
        }
        return drift.Evaluate(current, as_policy(moved), 0, {}) / (eps * eps);
      };
      const double small = ratio_at(eps_small);
      const double large = ratio_at(eps_large);
      report.small_eps_ratio = std::max(report.small_eps_ratio, small);
      report.large_eps_ratio = std::max(report.large_eps_ratio, large);
      // D = O(eps^2) keeps the ratio bounded as eps shrinks; a first-order
      // term makes it blow up like 1 / eps.
      if (small > 4.0 * large + 1e-9) report.zero_gradient = false;
    }
  }
  return report;
}

}  // namespace maxent_marl

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

#include "maxent_marl/experiment.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "maxent_marl/haspi.h"
#include "maxent_marl/qre_oracle.h"

namespace maxent_marl {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string JoinLines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (k > 0) out += "\n";
    out += lines[k];
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError({path + ": cannot open file"});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json ParseJson(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const long line = 1 + std::count(text.begin(), text.begin() + byte, '\n');
    throw SpecError({source + ":" + std::to_string(line) +
                     ": parse error: " + e.what()});
  }
}

std::string FormatFull(double value) {
  if (std::isnan(value)) return "";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

json SixDigits(double value) {
  if (!std::isfinite(value)) return nullptr;
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return std::stod(buffer);
}

// Collects problems for one JSON object while reading typed fields.
class FieldReader {
 public:
  FieldReader(const json& object, std::string source)
      : object_(object), source_(std::move(source)) {}

  void Problem(const std::string& field, const std::string& message) {
    problems_.push_back(source_ + ": field '" + field + "': " + message);
  }

  void RejectUnknown(const std::set<std::string>& allowed,
                     const std::string& context) {
    for (const auto& item : object_.items()) {
      if (!allowed.count(item.key())) {
        problems_.push_back(source_ + ": key '" + item.key() +
                            "' is not valid" + context);
      }
    }
  }

  const json* Find(const std::string& key) const {
    const auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  std::optional<double> Number(const std::string& key, bool required) {
    const json* value = Find(key);
    if (value == nullptr) {
      if (required) Problem(key, "missing");
      return std::nullopt;
    }
    if (!value->is_number()) {
      Problem(key, "expected a number");
      return std::nullopt;
    }
    return value->get<double>();
  }

  std::optional<long long> Integer(const std::string& key, bool required) {
    const json* value = Find(key);
    if (value == nullptr) {
      if (required) Problem(key, "missing");
      return std::nullopt;
    }
    if (!value->is_number_integer()) {
      Problem(key, "expected an integer");
      return std::nullopt;
    }
    return value->get<long long>();
  }

  std::optional<std::string> String(const std::string& key) {
    const json* value = Find(key);
    if (value == nullptr) return std::nullopt;
    if (!value->is_string()) {
      Problem(key, "expected a string");
      return std::nullopt;
    }
    return value->get<std::string>();
  }

  std::optional<std::vector<double>> NumberArray(const json& value,
                                                 const std::string& field) {
    if (!value.is_array()) {
      Problem(field, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < value.size(); ++k) {
      if (!value[k].is_number()) {
        Problem(field + "[" + std::to_string(k) + "]", "expected a number");
        return std::nullopt;
      }
      out.push_back(value[k].get<double>());
    }
    return out;
  }

  std::vector<std::string>& problems() { return problems_; }
  void ThrowIfAny() {
    if (!problems_.empty()) throw SpecError(problems_);
  }

 private:
  const json& object_;
  std::string source_;
  std::vector<std::string> problems_;
};

CooperativeMarkovGame GameFromMatrix(FieldReader& reader, const json& matrix) {
  std::vector<std::vector<double>> rows;
  if (!matrix.is_array() || matrix.empty()) {
    reader.Problem("matrix", "expected a non-empty array of rows");
  } else {
    for (std::size_t r = 0; r < matrix.size(); ++r) {
      auto row =
          reader.NumberArray(matrix[r], "matrix[" + std::to_string(r) + "]");
      if (row) rows.push_back(std::move(*row));
    }
  }
  reader.ThrowIfAny();
  try {
    return NewMatrixGame(rows);
  } catch (const InvalidInput& e) {
    reader.Problem("matrix", e.what());
    reader.ThrowIfAny();
    throw;
  }
}

CooperativeMarkovGame GameFromDense(FieldReader& reader) {
  reader.RejectUnknown({"name", "n_agents", "states", "action_counts", "gamma",
                        "initial_dist", "reward", "transition"},
                       " in a game file");
  const auto n_agents = reader.Integer("n_agents", true);
  const auto gamma = reader.Number("gamma", true);

  int num_states = 0;
  if (const json* states = reader.Find("states")) {
    if (states->is_number_integer()) {
      num_states = states->get<int>();
    } else if (states->is_array()) {
      num_states = static_cast<int>(states->size());
    } else {
      reader.Problem("states", "expected a count or an array of labels");
    }
    if (num_states <= 0 && states->is_number_integer()) {
      reader.Problem("states", "must be positive");
    }
  } else {
    reader.Problem("states", "missing");
  }

  std::vector<int> action_counts;
  bool counts_ok = false;
  if (const json* counts = reader.Find("action_counts")) {
    if (auto values = reader.NumberArray(*counts, "action_counts")) {
      for (double c : *values) {
        if (c < 1 || c != std::floor(c)) {
          reader.Problem("action_counts", "entries must be positive integers");
          break;
        }
        action_counts.push_back(static_cast<int>(c));
      }
      counts_ok = action_counts.size() == values->size() && !action_counts.empty();
    }
  } else {
    reader.Problem("action_counts", "missing");
  }
  if (n_agents && static_cast<long long>(action_counts.size()) != *n_agents &&
      !action_counts.empty()) {
    reader.Problem("action_counts", "expected " + std::to_string(*n_agents) +
                                        " entries, got " +
                                        std::to_string(action_counts.size()));
  }

  std::vector<double> initial;
  if (const json* d = reader.Find("initial_dist")) {
    if (auto values = reader.NumberArray(*d, "initial_dist")) initial = *values;
  } else {
    reader.Problem("initial_dist", "missing");
  }
  // The tensors can still be checked once their shape is known.
  if (num_states <= 0 || !counts_ok) reader.ThrowIfAny();

  int num_joint = 1;
  for (int c : action_counts) num_joint *= c;

  std::vector<double> reward;
  if (const json* r = reader.Find("reward")) {
    if (!r->is_array() || static_cast<int>(r->size()) != num_states) {
      reader.Problem("reward", "expected " + std::to_string(num_states) +
                                   " per-state rows");
    } else {
      for (int s = 0; s < num_states; ++s) {
        const std::string field = "reward[" + std::to_string(s) + "]";
        auto row = reader.NumberArray((*r)[s], field);
        if (!row) continue;
        if (static_cast<int>(row->size()) != num_joint) {
          reader.Problem(field, "expected " + std::to_string(num_joint) +
                                    " joint-action entries, got " +
                                    std::to_string(row->size()));
          continue;
        }
        reward.insert(reward.end(), row->begin(), row->end());
      }
    }
  } else {
    reader.Problem("reward", "missing");
  }

  std::vector<double> transition;
  if (const json* p = reader.Find("transition")) {
    if (!p->is_array() || static_cast<int>(p->size()) != num_states) {
      reader.Problem("transition", "expected " + std::to_string(num_states) +
                                       " per-state blocks");
    } else {
      for (int s = 0; s < num_states; ++s) {
        const json& block = (*p)[s];
        const std::string field = "transition[" + std::to_string(s) + "]";
        if (!block.is_array() || static_cast<int>(block.size()) != num_joint) {
          reader.Problem(field, "expected " + std::to_string(num_joint) +
                                    " joint-action rows");
          continue;
        }
        for (int j = 0; j < num_joint; ++j) {
          const std::string row_field = field + "[" + std::to_string(j) + "]";
          auto row = reader.NumberArray(block[j], row_field);
          if (!row) continue;
          if (static_cast<int>(row->size()) != num_states) {
            reader.Problem(row_field, "expected " +
                                          std::to_string(num_states) +
                                          " next-state probabilities");
            continue;
          }
          transition.insert(transition.end(), row->begin(), row->end());
        }
      }
    }
  } else if (num_states == 1) {
    transition.assign(num_joint, 1.0);
  } else {
    reader.Problem("transition", "missing (only single-state games may omit it)");
  }
  reader.ThrowIfAny();

  CooperativeMarkovGame game(action_counts, num_states, std::move(reward),
                             std::move(transition), *gamma, std::move(initial));
  for (const Violation& v : ValidateGame(game)) {
    reader.problems().push_back(ToString(v));
  }
  reader.ThrowIfAny();
  return game;
}

SolverKind ParseSolver(const std::string& name) {
  if (name == "haspi") return SolverKind::kHaspi;
  if (name == "masac") return SolverKind::kMasac;
  if (name == "mehaml") return SolverKind::kMehaml;
  if (name == "mappo") return SolverKind::kMappo;
  if (name == "happo") return SolverKind::kHappo;
  if (name == "qre-oracle") return SolverKind::kQreOracle;
  throw SpecError({"unknown solver '" + name +
                   "' (expected haspi, masac, mehaml, mappo, happo or "
                   "qre-oracle)"});
}

std::set<std::string> AllowedKeys(SolverKind solver) {
  std::set<std::string> keys = {"game",        "solver",      "initial_policy",
                                "seed",        "output_dir",  "output_name",
                                "record_trace"};
  const std::set<std::string> soft = {"alpha", "alphas", "tol_policy",
                                      "max_iters"};
  switch (solver) {
    case SolverKind::kHaspi:
      keys.insert(soft.begin(), soft.end());
      keys.insert({"tol_eval", "evaluation", "permutation"});
      break;
    case SolverKind::kMasac:
      keys.insert(soft.begin(), soft.end());
      keys.insert({"tol_eval", "evaluation"});
      break;
    case SolverKind::kMehaml:
      keys.insert(soft.begin(), soft.end());
      keys.insert({"tol_eval", "evaluation", "permutation", "drift",
                   "neighborhood", "mode", "state_weighting"});
      break;
    case SolverKind::kQreOracle:
      keys.insert(soft.begin(), soft.end());
      keys.insert("damping");
      break;
    case SolverKind::kHappo:
      keys.insert("order");
      [[fallthrough]];
    case SolverKind::kMappo:
      keys.insert({"update", "step_size", "iterations"});
      break;
  }
  return keys;
}

std::optional<JointPolicy> ParseInitialPolicy(FieldReader& reader,
                                              const json& value,
                                              const CooperativeMarkovGame& game) {
  if (value.is_string()) {
    if (value.get<std::string>() == "uniform") return JointPolicy::Uniform(game);
    reader.Problem("initial_policy", "expected \"uniform\" or explicit rows");
    return std::nullopt;
  }
  if (!value.is_array() || static_cast<int>(value.size()) != game.num_agents()) {
    reader.Problem("initial_policy", "expected one entry per agent (" +
                                         std::to_string(game.num_agents()) + ")");
    return std::nullopt;
  }
  std::vector<AgentPolicy> agents;
  for (int i = 0; i < game.num_agents(); ++i) {
    const json& entry = value[i];
    const std::string field = "initial_policy[" + std::to_string(i) + "]";
    std::vector<double> table;
    if (entry.is_array() && !entry.empty() && entry[0].is_number()) {
      auto row = reader.NumberArray(entry, field);
      if (!row) return std::nullopt;
      for (int s = 0; s < game.num_states(); ++s) {
        table.insert(table.end(), row->begin(), row->end());
      }
    } else if (entry.is_array() &&
               static_cast<int>(entry.size()) == game.num_states()) {
      for (int s = 0; s < game.num_states(); ++s) {
        auto row = reader.NumberArray(entry[s], field + "[" + std::to_string(s) + "]");
        if (!row) return std::nullopt;
        table.insert(table.end(), row->begin(), row->end());
      }
    } else {
      reader.Problem(field, "expected a row or one row per state");
      return std::nullopt;
    }
    if (table.size() != static_cast<std::size_t>(game.num_states()) *
                            game.num_actions(i)) {
      reader.Problem(field, "rows must have " +
                                std::to_string(game.num_actions(i)) +
                                " entries");
      return std::nullopt;
    }
    AgentPolicy policy(i, game.num_states(), game.num_actions(i),
                       std::move(table));
    const auto violations = ValidatePolicy(policy, 1e-9);
    if (!violations.empty()) {
      reader.Problem(field, ToString(violations.front()));
      return std::nullopt;
    }
    agents.push_back(std::move(policy));
  }
  return JointPolicy(std::move(agents));
}

std::string JoinOrder(const std::vector<int>& order) {
  std::string out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0) out += "-";
    out += std::to_string(order[k]);
  }
  return out;
}

}  // namespace

SpecError::SpecError(std::vector<std::string> problems)
    : InvalidInput(JoinLines(problems)), problems_(std::move(problems)) {}

CooperativeMarkovGame ParseGame(const std::string& text,
                                const std::string& source) {
  const json doc = ParseJson(text, source);
  if (!doc.is_object()) throw SpecError({source + ": expected a JSON object"});
  FieldReader reader(doc, source);
  if (const json* matrix = reader.Find("matrix")) {
    reader.RejectUnknown({"matrix", "name"}, " next to the matrix shorthand");
    return GameFromMatrix(reader, *matrix);
  }
  return GameFromDense(reader);
}

CooperativeMarkovGame LoadGame(const std::string& path) {
  return ParseGame(ReadFile(path), path);
}

std::string SerializeGame(const CooperativeMarkovGame& game) {
  json doc;
  doc["n_agents"] = game.num_agents();
  doc["states"] = game.num_states();
  doc["action_counts"] = game.action_counts();
  doc["gamma"] = game.gamma();
  doc["initial_dist"] = std::vector<double>(game.initial_dist().begin(),
                                            game.initial_dist().end());
  json reward = json::array();
  json transition = json::array();
  for (int s = 0; s < game.num_states(); ++s) {
    json reward_row = json::array();
    json block = json::array();
    for (int j = 0; j < game.num_joint_actions(); ++j) {
      reward_row.push_back(game.reward(s, j));
      const auto row = game.transition_row(s, j);
      block.push_back(std::vector<double>(row.begin(), row.end()));
    }
    reward.push_back(std::move(reward_row));
    transition.push_back(std::move(block));
  }
  doc["reward"] = std::move(reward);
  doc["transition"] = std::move(transition);
  return doc.dump(2) + "\n";
}

void SaveGame(const CooperativeMarkovGame& game, const std::string& path) {
  WriteFileAtomic(path, SerializeGame(game));
}

std::string ToString(SolverKind solver) {
  switch (solver) {
    case SolverKind::kHaspi:
      return "haspi";
    case SolverKind::kMasac:
      return "masac";
    case SolverKind::kMehaml:
      return "mehaml";
    case SolverKind::kMappo:
      return "mappo";
    case SolverKind::kHappo:
      return "happo";
    case SolverKind::kQreOracle:
      return "qre-oracle";
  }
  return "unknown";
}

const CooperativeMarkovGame& ExperimentSpec::resolved_game() const {
  if (!game) throw InvalidInput("experiment spec has no game");
  return *game;
}

JointPolicy ExperimentSpec::ResolvedInitialPolicy() const {
  return initial_policy ? *initial_policy
                        : JointPolicy::Uniform(resolved_game());
}

PermutationRule ExperimentSpec::ResolvedPermutationRule(int branch) const {
  switch (permutation_kind) {
    case PermutationRule::Kind::kFixed:
      return PermutationRule::Fixed(Permutation(fixed_order));
    case PermutationRule::Kind::kCyclic:
      return PermutationRule::Cyclic();
    case PermutationRule::Kind::kRandom:
      break;
  }
  return PermutationRule::Random(
      DeriveSeed(seed, static_cast<std::uint64_t>(branch)));
}

ExperimentSpec ParseExperimentSpec(const std::string& text,
                                   const std::string& base_dir,
                                   SolverKind default_solver) {
  const std::string source = "experiment spec";
  const json doc = ParseJson(text, source);
  if (!doc.is_object()) throw SpecError({source + ": expected a JSON object"});
  FieldReader reader(doc, source);

  ExperimentSpec spec;
  spec.solver = default_solver;
  if (auto name = reader.String("solver")) spec.solver = ParseSolver(*name);
  reader.RejectUnknown(AllowedKeys(spec.solver),
                       " for solver '" + ToString(spec.solver) + "'");
  reader.ThrowIfAny();

  const json* game = reader.Find("game");
  if (game == nullptr) {
    reader.Problem("game", "missing");
  } else if (game->is_string()) {
    fs::path path(game->get<std::string>());
    if (path.is_relative()) path = fs::path(base_dir) / path;
    spec.game_source = path.string();
    spec.game = LoadGame(spec.game_source);
  } else if (game->is_object()) {
    spec.game_source = "<inline>";
    spec.game = ParseGame(game->dump(), "inline game");
  } else {
    reader.Problem("game", "expected a file path or an inline game object");
  }
  reader.ThrowIfAny();

  if (const json* alphas = reader.Find("alphas")) {
    if (reader.Find("alpha")) reader.Problem("alphas", "give alpha or alphas, not both");
    if (auto values = reader.NumberArray(*alphas, "alphas")) {
      if (values->empty()) reader.Problem("alphas", "must not be empty");
      spec.alphas = *values;
    }
  } else if (auto alpha = reader.Number("alpha", false)) {
    spec.alphas = {*alpha};
  }
  for (double a : spec.alphas) {
    if (!(a > 0.0)) reader.Problem("alpha", "temperatures must be positive");
  }

  if (const json* init = reader.Find("initial_policy")) {
    spec.initial_policy = ParseInitialPolicy(reader, *init, *spec.game);
  }
  if (auto seed = reader.Integer("seed", false)) {
    spec.seed = static_cast<std::uint64_t>(*seed);
  }
  if (auto tol = reader.Number("tol_policy", false)) {
    if (!(*tol > 0.0)) reader.Problem("tol_policy", "must be positive");
    spec.tol_policy = *tol;
  }
  if (auto tol = reader.Number("tol_eval", false)) {
    if (!(*tol > 0.0)) reader.Problem("tol_eval", "must be positive");
    spec.evaluation.tol = *tol;
  }
  if (auto method = reader.String("evaluation")) {
    if (*method == "exact") {
      spec.evaluation.method = EvaluationOptions::Method::kExact;
    } else if (*method == "iterative") {
      spec.evaluation.method = EvaluationOptions::Method::kIterative;
    } else {
      reader.Problem("evaluation", "expected \"exact\" or \"iterative\"");
    }
  }
  if (auto iters = reader.Integer("max_iters", false)) {
    if (*iters < 0) reader.Problem("max_iters", "must be >= 0");
    spec.max_iters = static_cast<int>(*iters);
  }
  if (const json* record = reader.Find("record_trace")) {
    if (record->is_boolean()) {
      spec.record_trace = record->get<bool>();
    } else {
      reader.Problem("record_trace", "expected true or false");
    }
  }

  if (const json* perm = reader.Find("permutation")) {
    if (perm->is_string() && perm->get<std::string>() == "random") {
      spec.permutation_kind = PermutationRule::Kind::kRandom;
    } else if (perm->is_string() && perm->get<std::string>() == "cyclic") {
      spec.permutation_kind = PermutationRule::Kind::kCyclic;
    } else if (perm->is_array()) {
      spec.permutation_kind = PermutationRule::Kind::kFixed;
      for (const json& v : *perm) {
        if (!v.is_number_integer()) {
          reader.Problem("permutation", "fixed orderings are integer lists");
          break;
        }
        spec.fixed_order.push_back(v.get<int>());
      }
      try {
        Permutation check(spec.fixed_order);
        if (check.size() != spec.game->num_agents()) {
          reader.Problem("permutation", "must order every agent");
        }
      } catch (const InvalidInput& e) {
        reader.Problem("permutation", e.what());
      }
    } else {
      reader.Problem("permutation",
                     "expected \"random\", \"cyclic\" or an agent list");
    }
  }

  auto named_component = [&](const std::string& key, std::string& name,
                             const std::string& param, double& param_value) {
    const json* value = reader.Find(key);
    if (value == nullptr) return;
    if (value->is_string()) {
      name = value->get<std::string>();
      return;
    }
    if (!value->is_object()) {
      reader.Problem(key, "expected a name or {\"name\": ..., \"" + param +
                              "\": ...}");
      return;
    }
    FieldReader sub(*value, source + " " + key);
    sub.RejectUnknown({"name", param}, "");
    if (auto n = sub.String("name")) name = *n;
    if (auto p = sub.Number(param, false)) param_value = *p;
    for (auto& problem : sub.problems()) reader.problems().push_back(problem);
  };
  named_component("drift", spec.drift, "coef", spec.drift_coef);
  named_component("neighborhood", spec.neighborhood, "radius",
                  spec.neighborhood_radius);
  if (spec.solver == SolverKind::kMehaml) {
    if (spec.drift != "trivial" && spec.drift != "kl" && spec.drift != "tv") {
      reader.Problem("drift", "expected trivial, kl or tv");
    }
    if (spec.drift_coef < 0.0) reader.Problem("drift", "coef must be >= 0");
    if (spec.neighborhood == "kl_ball") {
      if (!(spec.neighborhood_radius > 0.0)) {
        reader.Problem("neighborhood", "kl_ball needs a positive radius");
      }
    } else if (spec.neighborhood != "full") {
      reader.Problem("neighborhood", "expected full or kl_ball");
    }
  }
  if (auto mode = reader.String("mode")) {
    if (*mode == "closed_form") {
      spec.mode = MehamlUpdateMode::kClosedForm;
    } else if (*mode == "line_search") {
      spec.mode = MehamlUpdateMode::kLineSearch;
    } else {
      reader.Problem("mode", "expected closed_form or line_search");
    }
  }
  if (const json* weights = reader.Find("state_weighting")) {
    if (auto values = reader.NumberArray(*weights, "state_weighting")) {
      StateWeighting w{*values};
      try {
        w.Validate(spec.game->num_states());
        spec.state_weighting = w;
      } catch (const InvalidInput& e) {
        reader.Problem("state_weighting", e.what());
      }
    }
  }

  if (spec.solver == SolverKind::kMappo || spec.solver == SolverKind::kHappo) {
    spec.baseline.algorithm = spec.solver == SolverKind::kMappo
                                  ? BaselineAlgorithm::kMappo
                                  : BaselineAlgorithm::kHappo;
    spec.baseline.order = Permutation::Identity(spec.game->num_agents());
    if (auto update = reader.String("update")) {
      if (*update == "argmax") {
        spec.baseline.update_mode = BaselineOptions::UpdateMode::kArgmax;
      } else if (*update == "mirror") {
        spec.baseline.update_mode = BaselineOptions::UpdateMode::kMirror;
      } else {
        reader.Problem("update", "expected argmax or mirror");
      }
    }
    if (auto step = reader.Number("step_size", false)) {
      spec.baseline.step_size = *step;
    }
    if (auto iters = reader.Integer("iterations", false)) {
      spec.baseline.iterations = static_cast<int>(*iters);
    }
    if (const json* order = reader.Find("order")) {
      std::vector<int> ordering;
      if (order->is_array()) {
        for (const json& v : *order) {
          if (v.is_number_integer()) ordering.push_back(v.get<int>());
        }
      }
      try {
        spec.baseline.order = Permutation(ordering);
      } catch (const InvalidInput& e) {
        reader.Problem("order", e.what());
      }
    }
    try {
      spec.baseline.Validate(spec.game->num_agents());
      if (spec.game->num_states() != 1 || spec.game->gamma() != 0.0) {
        reader.Problem("game", "baselines need a single-state gamma = 0 game");
      }
    } catch (const InvalidInput& e) {
      reader.Problem("baseline", e.what());
    }
  }

  if (auto damping = reader.Number("damping", false)) {
    if (!(*damping > 0.0 && *damping <= 1.0)) {
      reader.Problem("damping", "must lie in (0, 1]");
    }
    spec.damping = *damping;
  }
  if (auto dir = reader.String("output_dir")) spec.output_dir = *dir;
  if (auto name = reader.String("output_name")) spec.output_name = *name;

  reader.ThrowIfAny();
  return spec;
}

ExperimentSpec LoadExperimentSpec(const std::string& path,
                                  SolverKind default_solver) {
  const fs::path p(path);
  return ParseExperimentSpec(
      ReadFile(path),
      p.parent_path().empty() ? std::string(".") : p.parent_path().string(),
      default_solver);
}

SolverKind ParseSolverName(const std::string& name) { return ParseSolver(name); }

ResultRecord RunExperiment(const ExperimentSpec& spec, int branch) {
  const CooperativeMarkovGame& game = spec.resolved_game();
  if (branch < 0 || branch >= static_cast<int>(spec.alphas.size())) {
    throw InvalidInput("sweep branch out of range");
  }
  const auto start = std::chrono::steady_clock::now();
  const JointPolicy initial = spec.ResolvedInitialPolicy();

  ResultRecord record;
  record.solver = spec.solver;
  record.seed = spec.seed;
  record.alpha = spec.alphas[branch];

  SolveResult result;
  switch (spec.solver) {
    case SolverKind::kHaspi:
    case SolverKind::kMasac: {
      HaspiOptions options;
      options.alpha = record.alpha;
      options.tol_policy = spec.tol_policy;
      options.evaluation = spec.evaluation;
      options.max_outer_iters = spec.max_iters;
      options.permutation_rule = spec.ResolvedPermutationRule(branch);
      options.record_trace = spec.record_trace;
      result = spec.solver == SolverKind::kHaspi
                   ? HaspiSolve(game, initial, options)
                   : MasacSolve(game, initial, options);
      break;
    }
    case SolverKind::kMehaml: {
      MehamlOptions options;
      options.alpha = record.alpha;
      options.tol_policy = spec.tol_policy;
      options.evaluation = spec.evaluation;
      options.max_outer_iters = spec.max_iters;
      options.permutation_rule = spec.ResolvedPermutationRule(branch);
      options.record_trace = spec.record_trace;
      options.mode = spec.mode;
      const DriftPtr drift = spec.drift == "kl"   ? KlDrift(spec.drift_coef)
                             : spec.drift == "tv" ? TotalVariationDrift(spec.drift_coef)
                                                  : TrivialDrift();
      const NeighborhoodPtr neighborhood =
          spec.neighborhood == "kl_ball"
              ? KlBallNeighborhood(spec.neighborhood_radius)
              : FullNeighborhood();
      const StateWeighting weighting =
          spec.state_weighting ? *spec.state_weighting
                               : StateWeighting::Uniform(game.num_states());
      result = MehamlSolve(game, initial, *drift, *neighborhood, weighting,
                           options);
      break;
    }
    case SolverKind::kMappo:
    case SolverKind::kHappo:
      record.alpha = 0.0;
      result = BaselineRun(game, initial, spec.baseline);
      if (!spec.record_trace) {
        result.trace.records.erase(result.trace.records.begin(),
                                   result.trace.records.end() - 1);
      }
      break;
    case SolverKind::kQreOracle: {
      const QreSolution solution = QreFixedPoint(
          game, record.alpha,
          QreOptions{spec.damping, spec.tol_policy, spec.max_iters}, initial);
      auto snapshot = [&](const JointPolicy& policy, int iteration) {
        const SoftQTable q = EvaluatePolicyExact(game, policy, record.alpha);
        IterationRecord r;
        r.iteration = iteration;
        r.state_values = SoftValue(game, policy, q, record.alpha).values;
        for (int s = 0; s < game.num_states(); ++s) {
          r.objective += game.initial_dist()[s] * r.state_values[s];
        }
        r.qre_residual = QreResidualGivenQ(game, policy, q, record.alpha);
        r.policy_change = SupNormDistance(policy, initial);
        r.policy = policy;
        return std::pair(r, q);
      };
      if (spec.record_trace) {
        result.trace.records.push_back(snapshot(initial, 0).first);
      }
      auto [last, q] = snapshot(solution.policy, solution.iterations);
      result.trace.records.push_back(std::move(last));
      result.trace.iterations = solution.iterations;
      result.trace.status = solution.converged ? SolveStatus::kConverged
                                               : SolveStatus::kMaxIters;
      result.policy = solution.policy;
      result.q = std::move(q);
      break;
    }
  }

  record.trace = std::move(result.trace);
  record.final_policy = result.policy;
  record.status = record.trace.status;
  record.final_objective = record.trace.records.back().objective;
  record.final_residual = record.trace.records.back().qre_residual;
  record.greedy_joint_action = GreedyJointAction(record.final_policy, 0);
  record.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return record;
}

std::string TraceCsvHeader(const JointPolicy& policy) {
  std::string header =
      "iteration,objective,qre_residual,policy_change,permutation";
  for (const AgentPolicy& agent : policy.agents()) {
    for (int s = 0; s < agent.num_states(); ++s) {
      for (int a = 0; a < agent.num_actions(); ++a) {
        header += ",pi_" + std::to_string(agent.agent_id()) + "_" +
                  std::to_string(s) + "_" + std::to_string(a);
      }
    }
  }
  return header;
}

namespace {

std::string TraceRow(const IterationRecord& r) {
  std::string row = std::to_string(r.iteration) + "," +
                    FormatFull(r.objective) + "," +
                    FormatFull(r.qre_residual) + "," +
                    FormatFull(r.policy_change) + "," +
                    JoinOrder(r.permutation);
  for (const AgentPolicy& agent : r.policy.agents()) {
    for (double p : agent.table()) row += "," + FormatFull(p);
  }
  return row;
}

}  // namespace

std::string TraceCsv(const ResultRecord& record) {
  std::string out = TraceCsvHeader(record.final_policy) + "\n";
  for (const IterationRecord& r : record.trace.records) {
    out += TraceRow(r) + "\n";
  }
  return out;
}

std::string SummaryJson(const ResultRecord& record) {
  json doc;
  doc["solver"] = ToString(record.solver);
  doc["alpha"] = SixDigits(record.alpha);
  doc["seed"] = record.seed;
  doc["status"] = ToString(record.status);
  doc["iterations"] = record.trace.iterations;
  doc["final_objective"] = SixDigits(record.final_objective);
  doc["final_qre_residual"] = SixDigits(record.final_residual);
  doc["greedy_joint_action"] = record.greedy_joint_action;
  json policy = json::array();
  for (const AgentPolicy& agent : record.final_policy.agents()) {
    json rows = json::array();
    for (int s = 0; s < agent.num_states(); ++s) {
      json row = json::array();
      for (double p : agent.row(s)) row.push_back(SixDigits(p));
      rows.push_back(std::move(row));
    }
    policy.push_back(std::move(rows));
  }
  doc["final_policy"] = std::move(policy);
  doc["wall_clock_seconds"] = SixDigits(record.wall_clock_seconds);
  return doc.dump(2) + "\n";
}

void WriteFileAtomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + temp.string());
    out << content;
    if (!out) throw std::runtime_error("failed writing " + temp.string());
  }
  fs::rename(temp, target);
}

void WriteResult(const ResultRecord& record, const std::string& dir,
                 const std::string& name) {
  const fs::path base(dir);
  WriteFileAtomic((base / (name + "_trace.csv")).string(), TraceCsv(record));
  WriteFileAtomic((base / (name + "_summary.json")).string(),
                  SummaryJson(record));
}

std::vector<SweepOutcome> SweepAlpha(const ExperimentSpec& spec) {
  if (spec.alphas.empty()) throw InvalidInput("alpha sweep needs at least one alpha");
  if (spec.solver == SolverKind::kMappo || spec.solver == SolverKind::kHappo) {
    throw InvalidInput("baselines have no temperature to sweep");
  }
  std::vector<std::future<SweepOutcome>> branches;
  for (int b = 0; b < static_cast<int>(spec.alphas.size()); ++b) {
    branches.push_back(std::async(std::launch::async, [&spec, b] {
      SweepOutcome outcome;
      outcome.alpha = spec.alphas[b];
      try {
        outcome.result = RunExperiment(spec, b);
      } catch (const std::exception& e) {
        outcome.error = e.what();
      }
      return outcome;
    }));
  }
  std::vector<SweepOutcome> outcomes;
  for (auto& branch : branches) outcomes.push_back(branch.get());
  return outcomes;
}

std::string SweepCsv(const std::vector<SweepOutcome>& outcomes) {
  std::string out;
  for (const SweepOutcome& outcome : outcomes) {
    if (!outcome.result) continue;
    if (out.empty()) {
      out = "alpha," + TraceCsvHeader(outcome.result->final_policy) + "\n";
    }
    for (const IterationRecord& r : outcome.result->trace.records) {
      out += FormatFull(outcome.alpha) + "," + TraceRow(r) + "\n";
    }
  }
  return out;
}

ReplicationTable ReplicateAppendixB(double tolerance) {
  if (!(tolerance >= 0.0)) throw InvalidInput("cell tolerance must be >= 0");
  struct Reference {
    double alpha;
    std::array<double, 3> first;
    std::array<double, 3> convergent;
  };
  // Four-decimal reference values for the 3x3 coordination game.
  static constexpr std::array<Reference, 6> kReference = {{
      {1.0, {0.9990, 0.0001, 0.0009}, {1.0000, 0.0000, 0.0000}},
      {2.0, {0.9603, 0.0107, 0.0290}, {1.0000, 0.0000, 0.0000}},
      {5.0, {0.7083, 0.1171, 0.1747}, {0.9849, 0.0075, 0.0076}},
      {10.0, {0.5254, 0.2136, 0.2609}, {0.0221, 0.0224, 0.9555}},
      {15.0, {0.4596, 0.2522, 0.2882}, {0.1278, 0.1354, 0.7368}},
      {20.0, {0.4269, 0.2722, 0.3009}, {0.2514, 0.2790, 0.4697}},
  }};

  const CooperativeMarkovGame game = CoordinationMatrixGame();
  const std::array<double, 3> start = {0.6, 0.2, 0.2};
  const JointPolicy initial = JointPolicy::Symmetric(game, start);
  const Permutation order({0, 1});

  ReplicationTable table;
  table.tolerance = tolerance;
  auto check = [&](const char* block, double alpha, int agent,
                   const std::array<double, 3>& got,
                   const std::array<double, 3>& want) {
    for (int a = 0; a < 3; ++a) {
      if (std::abs(got[a] - want[a]) > table.tolerance) {
        char buffer[160];
        std::snprintf(buffer, sizeof(buffer),
                      "alpha=%g %s agent %d action %d: got %.6f, expected %.4f",
                      alpha, block, agent, a, got[a], want[a]);
        table.mismatches.emplace_back(buffer);
      }
    }
  };
  auto to_array = [](const AgentPolicy& p) {
    return std::array<double, 3>{p.prob(0, 0), p.prob(0, 1), p.prob(0, 2)};
  };

  for (const Reference& ref : kReference) {
    ReplicationRow row;
    row.alpha = ref.alpha;
    row.reference_first = ref.first;
    row.reference_convergent = ref.convergent;

    row.first_update = to_array(HaspiStep(game, initial, ref.alpha, order)[0]);

    HaspiOptions options;
    options.alpha = ref.alpha;
    options.tol_policy = 1e-12;
    options.max_outer_iters = 100000;
    options.permutation_rule = PermutationRule::Fixed(order);
    options.record_trace = false;
    const SolveResult solved = HaspiSolve(game, initial, options);
    row.convergent = to_array(solved.policy[0]);
    row.convergent_other = to_array(solved.policy[1]);
    row.iterations = solved.trace.iterations;

    check("first-update", ref.alpha, 0, row.first_update, ref.first);
    check("convergent", ref.alpha, 0, row.convergent, ref.convergent);
    check("convergent", ref.alpha, 1, row.convergent_other, ref.convergent);
    if (solved.trace.status != SolveStatus::kConverged) {
      table.mismatches.push_back("alpha=" + FormatFull(ref.alpha) +
                                 ": solve hit the iteration limit");
    }
    table.rows.push_back(row);
  }
  return table;
}

std::string ReplicationCsv(const ReplicationTable& table) {
  std::string out =
      "alpha,first_p1,first_p2,first_p3,convergent_p1,convergent_p2,"
      "convergent_p3,ref_first_p1,ref_first_p2,ref_first_p3,"
      "ref_convergent_p1,ref_convergent_p2,ref_convergent_p3,iterations\n";
  for (const ReplicationRow& row : table.rows) {
    out += FormatFull(row.alpha);
    for (double v : row.first_update) out += "," + FormatFull(v);
    for (double v : row.convergent) out += "," + FormatFull(v);
    for (double v : row.reference_first) out += "," + FormatFull(v);
    for (double v : row.reference_convergent) out += "," + FormatFull(v);
    out += "," + std::to_string(row.iterations) + "\n";
  }
  return out;
}

}  // namespace maxent_marl

#include "retrace/simenv.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace retrace {

namespace {

const std::map<std::string, Directive::Behavior>& behaviors() {
  static const std::map<std::string, Directive::Behavior> table{
      {"comply", Directive::Behavior::kComply},
      {"silent-fail", Directive::Behavior::kSilentFail},
      {"wrong-action", Directive::Behavior::kWrongAction},
      {"press-cannot", Directive::Behavior::kPressCannot},
      {"timeout", Directive::Behavior::kTimeout}};
  return table;
}

Literal parse_positive(const std::string& text) {
  GroundLiteral g = parse_ground_literal(text);
  if (!g.positive) throw ValidationError("initial_world lists only true literals: " + text, {});
  return g.literal;
}

}  // namespace

std::string to_string(Directive::Behavior b) {
  for (const auto& [name, value] : behaviors())
    if (value == b) return name;
  return "?";
}

Directive::Behavior parse_behavior(const std::string& text) {
  auto it = behaviors().find(text);
  if (it == behaviors().end()) throw ValidationError("unknown behavior '" + text + "'", {});
  return it->second;
}

Scenario parse_scenario(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("scenario: ") + e.what(), {});
  }
  static const std::set<std::string> known{
      "name", "description", "model", "task", "task_constants", "initial_world", "directives",
      "alpha_overrides", "prompt_answers", "seed", "stochastic"};
  if (!j.is_object()) throw ValidationError("scenario must be a JSON object", {});
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ValidationError("scenario: unknown field '" + k + "'", {});
  Scenario s;
  try {
    s.name = j.value("name", "");
    s.description = j.value("description", "");
    s.model = j.value("model", "");
    s.task = j.value("task", "");
    s.seed = j.value("seed", std::uint64_t{0});
    s.stochastic = j.value("stochastic", false);
    if (j.contains("task_constants"))
      for (const auto& [k, v] : j.at("task_constants").items()) s.task_constants[k] = v.get<long>();
    if (j.contains("initial_world"))
      for (const auto& lit : j.at("initial_world")) s.initial_world.push_back(parse_positive(lit.get<std::string>()));
    if (j.contains("alpha_overrides"))
      for (const auto& [k, v] : j.at("alpha_overrides").items()) s.alpha_overrides[k] = v.get<double>();
    if (j.contains("prompt_answers"))
      for (const auto& a : j.at("prompt_answers")) s.prompt_answers.push_back(a.get<std::string>());
    if (j.contains("directives")) {
      for (const auto& d : j.at("directives")) {
        Directive out;
        out.action = d.at("action").get<std::string>();
        out.occurrence = d.value("occurrence", 1);
        out.behavior = parse_behavior(d.value("behavior", "comply"));
        if (out.occurrence < 1)
          throw ValidationError("directive for " + out.action + ": occurrence counts from 1", {});
        if (d.contains("effects"))
          for (const auto& e : d.at("effects")) out.effects.push_back(parse_ground_literal(e.get<std::string>()));
        out.label = d.value("label", "");
        if (out.behavior == Directive::Behavior::kPressCannot && out.label.empty())
          throw ValidationError("press-cannot directive for " + out.action + " needs a label", {});
        if (out.behavior == Directive::Behavior::kWrongAction && out.effects.empty())
          throw ValidationError("wrong-action directive for " + out.action + " needs effects", {});
        s.directives.push_back(std::move(out));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scenario: ") + e.what(), {});
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("scenario: ") + e.what(), {});
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario " + path, {});
  std::stringstream ss;
  ss << in.rdbuf();
  Scenario s = parse_scenario(ss.str());
  auto dir = std::filesystem::path(path).parent_path();
  if (!s.model.empty()) s.model = (dir / s.model).lexically_normal().string();
  if (!s.task.empty()) s.task = (dir / s.task).lexically_normal().string();
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["description"] = s.description;
  if (!s.model.empty()) j["model"] = s.model;
  if (!s.task.empty()) j["task"] = s.task;
  if (!s.task_constants.empty()) j["task_constants"] = s.task_constants;
  j["initial_world"] = nlohmann::ordered_json::array();
  for (const auto& l : s.initial_world) j["initial_world"].push_back(to_string(l));
  j["directives"] = nlohmann::ordered_json::array();
  for (const auto& d : s.directives) {
    nlohmann::ordered_json o{{"action", d.action}, {"occurrence", d.occurrence}, {"behavior", to_string(d.behavior)}};
    if (!d.effects.empty()) {
      o["effects"] = nlohmann::ordered_json::array();
      for (const auto& e : d.effects) o["effects"].push_back(to_string(e));
    }
    if (!d.label.empty()) o["label"] = d.label;
    j["directives"].push_back(o);
  }
  j["alpha_overrides"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : s.alpha_overrides) j["alpha_overrides"][k] = v;
  j["prompt_answers"] = s.prompt_answers;
  j["seed"] = s.seed;
  j["stochastic"] = s.stochastic;
  return j.dump(2) + "\n";
}

SimEnvironment::SimEnvironment(const RobotModel& model, Scenario scenario,
                               std::set<std::string> exclusive)
    : model_(model), scenario_(std::move(scenario)), exclusive_(std::move(exclusive)), rng_(scenario_.seed) {
  for (const auto& l : scenario_.initial_world) apply({GroundLiteral{l, true}});
  std::set<std::pair<std::string, int>> seen;
  for (const auto& d : scenario_.directives) {
    if (!seen.emplace(d.action, d.occurrence).second)
      throw ValidationError("two directives for " + d.action + " occurrence " + std::to_string(d.occurrence), {});
    auto open = d.action.find('(');
    std::string name = d.action.substr(0, open);
    if (!model_.actions.count(name)) throw ValidationError("directive names unknown action " + d.action, {});
    if (d.behavior == Directive::Behavior::kPressCannot && !model_.action(name).find_evidence(d.label))
      throw ValidationError("directive label '" + d.label + "' is not declared by " + name, {});
  }
}

const Directive* SimEnvironment::find(const std::string& key, int occurrence) const {
  for (const auto& d : scenario_.directives)
    if (d.action == key && d.occurrence == occurrence) return &d;
  return nullptr;
}

std::vector<Directive> SimEnvironment::unused_directives() const {
  std::vector<Directive> out;
  for (const auto& d : scenario_.directives)
    if (!used_.count({d.action, d.occurrence})) out.push_back(d);
  return out;
}

bool SimEnvironment::holds(const std::vector<GroundLiteral>& conj) const {
  for (const auto& c : conj)
    if ((world_.count(c.literal) > 0) != c.positive) return false;
  return true;
}

void SimEnvironment::apply(const std::vector<GroundLiteral>& effects) {
  for (const auto& e : effects) {
    if (!e.positive) {
      world_.erase(e.literal);
      continue;
    }
    if (exclusive_.count(e.literal.predicate))
      std::erase_if(world_, [&](const Literal& l) { return l.predicate == e.literal.predicate; });
    world_.insert(e.literal);
  }
}

ActionOutcome SimEnvironment::perform(const GroundAction& action, int occurrence) {
  Directive::Behavior behavior = Directive::Behavior::kComply;
  if (const Directive* d = find(action.key(), occurrence)) {
    used_.insert({d->action, d->occurrence});
    switch (d->behavior) {
      case Directive::Behavior::kComply:
        break;
      case Directive::Behavior::kSilentFail:
        return ActionOutcome::confirmed();
      case Directive::Behavior::kWrongAction:
        apply(d->effects);
        return ActionOutcome::confirmed();
      case Directive::Behavior::kPressCannot:
        return ActionOutcome::cannot(d->label);
      case Directive::Behavior::kTimeout:
        return ActionOutcome::timeout();
    }
    behavior = d->behavior;
  } else if (scenario_.stochastic) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& v : action.vars) {
      bool fails = u(rng_) < v.alpha;
      if (v.success && fails) behavior = Directive::Behavior::kSilentFail;
    }
    if (behavior == Directive::Behavior::kSilentFail) return ActionOutcome::confirmed();
  }
  if (!holds(action.precondition)) {
    if (action.failure_evidence.empty()) return ActionOutcome::confirmed();
    return ActionOutcome::cannot(action.failure_evidence.front().first);
  }
  apply(action.postcondition);
  return ActionOutcome::confirmed();
}

std::string SimEnvironment::answer_prompt(int, const PromptRequest& prompt) {
  if (next_answer_ < scenario_.prompt_answers.size()) return scenario_.prompt_answers[next_answer_++];
  return prompt.buttons.front();
}

}  // namespace retrace

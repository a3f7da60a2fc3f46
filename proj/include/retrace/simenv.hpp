#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "retrace/executor.hpp"

namespace retrace {

// What the person (or robot) does on one dispatch of an action.
struct Directive {
  enum class Behavior { kComply, kSilentFail, kWrongAction, kPressCannot, kTimeout };

  std::string action;  // GroundAction::key(), e.g. pickup(Package B)
  int occurrence = 1;
  Behavior behavior = Behavior::kComply;
  std::vector<GroundLiteral> effects;  // kWrongAction: applied instead of the postcondition
  std::string label;                   // kPressCannot
};

std::string to_string(Directive::Behavior b);
Directive::Behavior parse_behavior(const std::string& text);

// A .scenario file. `model` and `task` are paths relative to the scenario
// file; both are optional so the same script can drive another program.
struct Scenario {
  std::string name;
  std::string description;
  std::string model;
  std::string task;
  std::map<std::string, long> task_constants;
  std::vector<Literal> initial_world;
  std::vector<Directive> directives;
  std::map<std::string, double> alpha_overrides;
  std::vector<std::string> prompt_answers;
  std::uint64_t seed = 0;
  bool stochastic = false;
};

Scenario parse_scenario(const std::string& json_text);
// Resolves `model` and `task` against the file's directory.
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& s);

// Scripted ground truth. Actions without a directive comply; a complying
// person who finds a precondition false in the true world answers with the
// schema's first failure label (or confirms without effect when it has
// none). Predicates listed as exclusive hold for at most one argument tuple
// at a time, which keeps the robot at one location.
class SimEnvironment : public Environment {
 public:
  SimEnvironment(const RobotModel& model, Scenario scenario,
                 std::set<std::string> exclusive = {"at"});

  ActionOutcome perform(const GroundAction& action, int occurrence) override;
  std::string answer_prompt(int id, const PromptRequest& prompt) override;

  const std::set<Literal>& world() const { return world_; }
  // Directives that never matched a dispatch.
  std::vector<Directive> unused_directives() const;

 private:
  const Directive* find(const std::string& key, int occurrence) const;
  void apply(const std::vector<GroundLiteral>& effects);
  bool holds(const std::vector<GroundLiteral>& conj) const;

  const RobotModel& model_;
  Scenario scenario_;
  std::set<std::string> exclusive_;
  std::set<Literal> world_;
  std::set<std::pair<std::string, int>> used_;
  size_t next_answer_ = 0;
  std::mt19937_64 rng_;
};

}  // namespace retrace

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "retrace/bayesnet.hpp"
#include "retrace/belief.hpp"
#include "retrace/diagnosis.hpp"
#include "retrace/model.hpp"
#include "retrace/recovery.hpp"
#include "retrace/task.hpp"
#include "retrace/tracelog.hpp"

namespace retrace {

struct ActionOutcome {
  enum class Status { kConfirmed, kCannot, kTimeout };

  Status status = Status::kConfirmed;
  std::string label;  // kCannot: key into the schema's failure evidence

  static ActionOutcome confirmed() { return {}; }
  static ActionOutcome cannot(std::string label) { return {Status::kCannot, std::move(label)}; }
  static ActionOutcome timeout() { return {Status::kTimeout, {}}; }
};

// Where actions and prompts go: a scripted simulator, a terminal or a
// remote console.
class Environment {
 public:
  virtual ~Environment() = default;

  // `occurrence` counts dispatches of the same action key, from 1.
  virtual ActionOutcome perform(const GroundAction& action, int occurrence) = 0;
  virtual std::string answer_prompt(int id, const PromptRequest& prompt) = 0;
};

// The prompt a live person sees for an action: "confirm" plus one
// "cannot: <label>" button per failure label ("cannot" when there are none).
PromptRequest action_prompt(const GroundAction& action);
// Inverse of the button naming above; throws std::invalid_argument.
ActionOutcome parse_action_answer(const std::string& button);

// Raised by an environment that can no longer answer (e.g. a console left).
class EnvironmentClosed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExecutorConfig {
  int retry_limit = 3;
  InferenceBackend backend = InferenceBackend::kVariableElimination;
  // Cross-check every recovery plan against the brute-force search too.
  bool verify_with_oracle = false;
};

enum class RunStatus { kDone, kUnrecoverable, kRetryLimit, kConfigError };

int exit_code(RunStatus s);
std::string to_string(RunStatus s);

// One run of a task program against an environment.
class Session {
 public:
  Session(const RobotModel& model, const TaskProgram& program, Environment& env,
          ExecutorConfig config = {});

  RunStatus run();

  const TraceLog& log() const { return log_; }
  const TraceNet& net() const { return net_; }
  const BeliefState& belief() const { return belief_; }
  // BeliefState after each executed timestep, index t-1.
  const std::vector<BeliefState>& belief_history() const { return beliefs_; }
  const std::vector<Diagnosis>& diagnoses() const { return diagnoses_; }
  int recovery_actions() const { return recovery_actions_; }

  // Called for every event as it is appended.
  std::function<void(const TraceEvent&)> on_event;
  // Called after each executed action with the new timestep.
  std::function<void(int, const BeliefState&)> on_belief;

 private:
  struct Failure {
    FailureEvidence evidence;
    bool precondition = false;
    std::string abort_reason;  // set when the failure carries no usable evidence
  };

  void emit(EventKind kind, int t, nlohmann::ordered_json payload = nlohmann::ordered_json::object());
  // The three-step execution of one ground action.
  bool attempt(const GroundAction& g, Failure& failure);
  // nullopt when recovery succeeded and the program may continue.
  std::optional<RunStatus> recover(const GroundAction& failing, Failure failure);
  RunStatus abort(const std::string& reason, const std::string& detail = {});
  GroundAction ground_request(const ActionRequest& r) const;
  GroundAction reground(const GroundAction& original) const;

  const RobotModel& model_;
  const TaskProgram& program_;
  Environment& env_;
  ExecutorConfig config_;
  TaskCursor cursor_;
  BeliefState belief_;
  std::vector<BeliefState> beliefs_;
  TraceNet net_;
  TraceLog log_;
  std::vector<Diagnosis> diagnoses_;
  std::map<std::string, int> occurrences_;
  int prompts_ = 0;
  int recovery_actions_ = 0;
  bool in_recovery_ = false;
};

}  // namespace retrace

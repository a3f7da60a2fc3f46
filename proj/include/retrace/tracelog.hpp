#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "retrace/literal.hpp"

namespace retrace {

enum class EventKind {
  kPromptShown,
  kPromptAnswered,
  kActionStart,
  kActionOk,
  kActionCannot,
  kPrecondFail,
  kDiagnosis,
  kRecoveryPlan,
  kRecoveryStart,
  kResume,
  kAbort,
  kDone
};

// PROMPT_SHOWN, ACTION_OK, ...
std::string event_tag(EventKind kind);

struct TraceEvent {
  EventKind kind = EventKind::kDone;
  int timestep = 0;
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();

  // The stable one-line rendering used in log files.
  std::string line() const;
  nlohmann::ordered_json to_json() const;
};

class TraceLog {
 public:
  void append(TraceEvent e) { events_.push_back(std::move(e)); }
  const std::vector<TraceEvent>& events() const { return events_; }
  std::string text() const;
  nlohmann::ordered_json to_json() const;

 private:
  std::vector<TraceEvent> events_;
};

std::string format_literals(const std::vector<GroundLiteral>& lits);
std::string format_literals(const std::vector<Literal>& lits);

}  // namespace retrace

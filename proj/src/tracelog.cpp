#include "retrace/tracelog.hpp"

namespace retrace {

std::string event_tag(EventKind kind) {
  switch (kind) {
    case EventKind::kPromptShown: return "PROMPT_SHOWN";
    case EventKind::kPromptAnswered: return "PROMPT_ANSWERED";
    case EventKind::kActionStart: return "ACTION_START";
    case EventKind::kActionOk: return "ACTION_OK";
    case EventKind::kActionCannot: return "ACTION_CANNOT";
    case EventKind::kPrecondFail: return "PRECOND_FAIL";
    case EventKind::kDiagnosis: return "DIAG";
    case EventKind::kRecoveryPlan: return "RECOVER";
    case EventKind::kRecoveryStart: return "RECOVERY_START";
    case EventKind::kResume: return "RESUME";
    case EventKind::kAbort: return "ABORT";
    case EventKind::kDone: return "DONE";
  }
  return "?";
}

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string braces(const nlohmann::ordered_json& list) {
  std::string out = "{";
  bool first = true;
  for (const auto& item : list) {
    out += (first ? "" : ", ") + item.get<std::string>();
    first = false;
  }
  return out + "}";
}

}  // namespace

std::string TraceEvent::line() const {
  const auto& p = payload;
  std::string out = event_tag(kind);
  auto t = [&] { return " t=" + std::to_string(timestep); };
  switch (kind) {
    case EventKind::kPromptShown: {
      out += " id=" + std::to_string(p.at("id").get<int>()) + " text=" + quoted(p.at("text"));
      std::string buttons;
      for (const auto& b : p.at("buttons")) buttons += (buttons.empty() ? "" : "|") + b.get<std::string>();
      out += " buttons=[" + buttons + "]";
      break;
    }
    case EventKind::kPromptAnswered:
      out += " id=" + std::to_string(p.at("id").get<int>()) + " button=" + p.at("button").get<std::string>();
      break;
    case EventKind::kActionStart:
    case EventKind::kActionOk:
      out += t() + " " + p.at("action").get<std::string>();
      break;
    case EventKind::kActionCannot:
      out += t() + " " + p.at("action").get<std::string>() + " label=" + p.at("label").get<std::string>() +
             " evidence=" + braces(p.at("evidence"));
      break;
    case EventKind::kPrecondFail:
      out += t() + " " + p.at("action").get<std::string>() + " evidence=" + braces(p.at("evidence"));
      break;
    case EventKind::kDiagnosis:
      out += " t_f=" + std::to_string(p.at("t_f").get<int>()) + " r_f=" + braces(p.at("r_f")) +
             " class=" + p.at("class").get<std::string>() + " culprit=" + p.at("culprit").get<std::string>();
      break;
    case EventKind::kRecoveryPlan: {
      std::string inc;
      for (const auto& i : p.at("include")) inc += (inc.empty() ? "" : ",") + std::to_string(i.get<int>());
      out += " include=[" + inc + "] len=" + std::to_string(p.at("len").get<int>());
      break;
    }
    case EventKind::kRecoveryStart:
      out += " round=" + std::to_string(p.at("round").get<int>());
      break;
    case EventKind::kResume:
      out += " after=" + p.at("after").get<std::string>();
      break;
    case EventKind::kAbort:
      out += " reason=" + p.at("reason").get<std::string>();
      if (p.contains("detail")) out += " detail=" + quoted(p.at("detail"));
      break;
    case EventKind::kDone:
      break;
  }
  return out;
}

nlohmann::ordered_json TraceEvent::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = event_tag(kind);
  j["t"] = timestep;
  for (const auto& [k, v] : payload.items()) j[k] = v;
  return j;
}

std::string TraceLog::text() const {
  std::string out;
  for (const auto& e : events_) out += e.line() + "\n";
  return out;
}

nlohmann::ordered_json TraceLog::to_json() const {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& e : events_) out.push_back(e.to_json());
  return out;
}

std::string format_literals(const std::vector<GroundLiteral>& lits) {
  std::string out = "{";
  for (size_t i = 0; i < lits.size(); ++i) out += (i ? ", " : "") + to_string(lits[i]);
  return out + "}";
}

std::string format_literals(const std::vector<Literal>& lits) {
  std::string out = "{";
  for (size_t i = 0; i < lits.size(); ++i) out += (i ? ", " : "") + to_string(lits[i]);
  return out + "}";
}

}  // namespace retrace

#include "retrace/executor.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

namespace retrace {

int exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::kDone: return 0;
    case RunStatus::kUnrecoverable: return 2;
    case RunStatus::kRetryLimit: return 3;
    case RunStatus::kConfigError: return 4;
  }
  return 1;
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kDone: return "done";
    case RunStatus::kUnrecoverable: return "unrecoverable";
    case RunStatus::kRetryLimit: return "retry-limit";
    case RunStatus::kConfigError: return "config-error";
  }
  return "?";
}

PromptRequest action_prompt(const GroundAction& action) {
  PromptRequest p;
  p.text = action.display();
  p.buttons.push_back("confirm");
  for (const auto& [label, lits] : action.failure_evidence) p.buttons.push_back("cannot: " + label);
  if (action.failure_evidence.empty()) p.buttons.push_back("cannot");
  return p;
}

ActionOutcome parse_action_answer(const std::string& button) {
  if (button == "confirm") return ActionOutcome::confirmed();
  if (button == "timeout") return ActionOutcome::timeout();
  if (button == "cannot") return ActionOutcome::cannot("");
  if (button.starts_with("cannot: ")) return ActionOutcome::cannot(button.substr(8));
  throw std::invalid_argument("unknown action answer '" + button + "'");
}

namespace {

nlohmann::ordered_json literal_list(const std::vector<GroundLiteral>& lits) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& l : lits) out.push_back(to_string(l));
  return out;
}

}  // namespace

Session::Session(const RobotModel& model, const TaskProgram& program, Environment& env,
                 ExecutorConfig config)
    : model_(model), program_(program), env_(env), config_(config), cursor_(program) {}

void Session::emit(EventKind kind, int t, nlohmann::ordered_json payload) {
  TraceEvent e{kind, t, std::move(payload)};
  log_.append(e);
  if (on_event) on_event(e);
}

RunStatus Session::abort(const std::string& reason, const std::string& detail) {
  nlohmann::ordered_json p{{"reason", reason}};
  if (!detail.empty()) p["detail"] = detail;
  emit(EventKind::kAbort, net_.frontier(), std::move(p));
  if (reason == "retry-limit") return RunStatus::kRetryLimit;
  if (reason == "config") return RunStatus::kConfigError;
  return RunStatus::kUnrecoverable;
}

GroundAction Session::ground_request(const ActionRequest& r) const {
  ArgMap args = bind_arguments(model_, r.name, r.positional, r.named);
  return ground_action(model_, r.name, args, [&](const Literal& l) { return ml_literal(belief_, l); });
}

GroundAction Session::reground(const GroundAction& original) const {
  return ground_action(model_, original.schema, original.frozen_args(),
                       [&](const Literal& l) { return ml_literal(belief_, l); });
}

bool Session::attempt(const GroundAction& g, Failure& failure) {
  const int t = net_.frontier() + 1;
  emit(EventKind::kActionStart, t, {{"action", g.display()}});
  if (in_recovery_) ++recovery_actions_;
  if (auto ev = detect(belief_, g, t - 1)) {
    failure.evidence = *ev;
    failure.precondition = true;
    emit(EventKind::kPrecondFail, t, {{"action", g.display()}, {"evidence", literal_list(ev->literals)}});
    return false;
  }
  const int occurrence = ++occurrences_[g.key()];
  ActionOutcome out = env_.perform(g, occurrence);
  if (out.status == ActionOutcome::Status::kConfirmed) {
    belief_ = forward_update(belief_, g);
    net_.extend(g, t);
    beliefs_.push_back(belief_);
    emit(EventKind::kActionOk, t, {{"action", g.display()}});
    if (on_belief) on_belief(t, belief_);
    return true;
  }
  std::string label = out.label;
  if (out.status == ActionOutcome::Status::kTimeout) {
    label = "timeout";
    if (!g.evidence_for(label) && !g.failure_evidence.empty()) label = g.failure_evidence.front().first;
  }
  const std::vector<GroundLiteral>* lits = g.evidence_for(label);
  emit(EventKind::kActionCannot, t,
       {{"action", g.display()}, {"label", label},
        {"evidence", lits ? literal_list(*lits) : nlohmann::ordered_json::array()}});
  if (!lits || lits->empty()) {
    failure.abort_reason = "no-evidence";
    return false;
  }
  failure.evidence = {t - 1, *lits};
  return false;
}

std::optional<RunStatus> Session::recover(const GroundAction& failing, Failure failure) {
  const std::string resume_after = failing.display();
  GroundAction current = failing;
  std::deque<GroundAction> queue;
  std::optional<std::tuple<int, std::vector<int>, std::vector<Literal>>> previous;
  for (int round = 1;; ++round) {
    if (!failure.abort_reason.empty()) return abort(failure.abort_reason, current.display());
    if (round > config_.retry_limit) return abort("retry-limit");
    Diagnosis d;
    try {
      d = diagnose(net_, failure.evidence, current, config_.backend);
    } catch (const InconsistentEvidence& e) {
      return abort("inconsistent-evidence", e.what());
    }
    diagnoses_.push_back(d);
    auto r_f = nlohmann::ordered_json::array();
    for (const auto& l : d.r_f) r_f.push_back(to_string(l));
    emit(EventKind::kDiagnosis, net_.frontier(),
         {{"t_f", d.t_f}, {"r_f", r_f}, {"class", to_string(d.failure_class)}, {"culprit", d.culprit}});

    auto key = std::make_tuple(d.t_f, d.r_f_nodes, d.r_f);
    if (previous && *previous == key)
      return abort("no-progress", "recovery failed again at " + d.culprit);
    previous = key;
    if (d.failure_class == FailureClass::kUnintendedEffect) return abort("unintended-effect", format_literals(d.r_f) + " changed unexpectedly by " + d.culprit);

    RecoveryProblem p;
    p.model = &model_;
    for (int t = 1; t <= net_.frontier(); ++t) p.history.push_back(net_.step(t).action);
    p.history.push_back(current);
    p.t_f = d.t_f;
    p.start = posterior_ml_world(net_, d.posterior, net_.frontier());
    std::optional<PerforatedTrace> trace = search_min_trace(p);
    if (!trace) return abort("no-valid-trace");
    if (!check_trace(p, *trace)) throw std::logic_error("recovery plan failed the validity re-check");
    if (config_.verify_with_oracle && p.history.size() <= 21) {
      auto oracle = brute_force_trace(p);
      if (!oracle || !(*oracle == *trace))
        throw std::logic_error("recovery plan differs from the exhaustive search");
    }
    auto include = nlohmann::ordered_json::array();
    for (int i : trace->indices()) include.push_back(i);
    emit(EventKind::kRecoveryPlan, net_.frontier(), {{"include", include}, {"len", trace->length()}});
    emit(EventKind::kRecoveryStart, net_.frontier(), {{"round", round}});

    std::deque<GroundAction> next;
    for (int i : trace->indices()) next.push_back(p.history[i - 1]);
    next.insert(next.end(), queue.begin(), queue.end());
    queue = std::move(next);

    bool failed = false;
    in_recovery_ = true;
    while (!queue.empty()) {
      GroundAction original = queue.front();
      queue.pop_front();
      GroundAction g;
      try {
        g = reground(original);
      } catch (const GroundingError& e) {
        in_recovery_ = false;
        return abort("grounding", e.what());
      }
      Failure nested;
      if (!attempt(g, nested)) {
        current = g;
        failure = nested;
        failed = true;
        break;
      }
    }
    in_recovery_ = false;
    if (!failed) {
      emit(EventKind::kResume, net_.frontier(), {{"after", resume_after}});
      return std::nullopt;
    }
  }
}

RunStatus Session::run() {
  try {
    check_task(program_, model_);
  } catch (const ValidationError& e) {
    return abort("config", e.what());
  }
  try {
    while (true) {
      TaskStep step;
      try {
        step = cursor_.next();
      } catch (const ValidationError& e) {
        return abort("config", e.what());
      }
      if (std::holds_alternative<EndOfProgram>(step)) {
        emit(EventKind::kDone, net_.frontier());
        return RunStatus::kDone;
      }
      if (auto* prompt = std::get_if<PromptRequest>(&step)) {
        const int id = ++prompts_;
        auto buttons = nlohmann::ordered_json::array();
        for (const auto& b : prompt->buttons) buttons.push_back(b);
        emit(EventKind::kPromptShown, net_.frontier(), {{"id", id}, {"text", prompt->text}, {"buttons", buttons}});
        std::string answer = env_.answer_prompt(id, *prompt);
        if (std::find(prompt->buttons.begin(), prompt->buttons.end(), answer) == prompt->buttons.end())
          return abort("config", "answer '" + answer + "' is not one of the prompt's buttons");
        emit(EventKind::kPromptAnswered, net_.frontier(), {{"id", id}, {"button", answer}});
        cursor_.answer(answer);
        continue;
      }
      const auto& request = std::get<ActionRequest>(step);
      GroundAction g;
      try {
        g = ground_request(request);
      } catch (const GroundingError& e) {
        return abort("grounding", e.what());
      }
      Failure failure;
      if (attempt(g, failure)) continue;
      if (auto status = recover(g, failure)) return *status;
    }
  } catch (const EnvironmentClosed& e) {
    return abort("environment-closed", e.what());
  }
}

}  // namespace retrace

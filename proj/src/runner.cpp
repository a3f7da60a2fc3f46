#include "retrace/runner.hpp"

namespace retrace {

RunInputs load_run_inputs(const std::string& model_path, const std::string& task_path,
                          const std::string& scenario_path,
                          const std::map<std::string, long>& overrides,
                          const std::map<std::string, double>& alpha_overrides) {
  RunInputs in;
  if (!scenario_path.empty()) in.scenario = load_scenario(scenario_path);
  const std::string& mp = model_path.empty() ? in.scenario.model : model_path;
  const std::string& tp = task_path.empty() ? in.scenario.task : task_path;
  if (mp.empty()) throw ValidationError("no model given", {});
  if (tp.empty()) throw ValidationError("no task given", {});
  in.model = load_model(mp);
  set_params(in.model, in.scenario.alpha_overrides);
  set_params(in.model, alpha_overrides);
  std::map<std::string, long> constants = in.scenario.task_constants;
  for (const auto& [k, v] : overrides) constants[k] = v;
  in.program = load_task(tp, constants);
  check_task(in.program, in.model);
  return in;
}

RunResult run_scripted(const RunInputs& inputs, const ExecutorConfig& config) {
  SimEnvironment env(inputs.model, inputs.scenario);
  Session session(inputs.model, inputs.program, env, config);
  RunResult r;
  r.status = session.run();
  r.log = session.log();
  r.diagnoses = session.diagnoses();
  r.beliefs = session.belief_history();
  r.net = session.net();
  r.actions_executed = 0;
  for (const auto& e : r.log.events())
    if (e.kind == EventKind::kActionStart) ++r.actions_executed;
  r.recovery_actions = session.recovery_actions();
  return r;
}

}  // namespace retrace

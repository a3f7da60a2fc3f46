#pragma once

#include <map>
#include <string>
#include <vector>

#include "retrace/executor.hpp"
#include "retrace/simenv.hpp"

namespace retrace {

// Everything a scripted run needs, loaded and validated.
struct RunInputs {
  RobotModel model;
  TaskProgram program;
  Scenario scenario;
};

// Empty model or task paths fall back to the ones named by the scenario.
// Scenario task constants apply first; `overrides` win over them.
RunInputs load_run_inputs(const std::string& model_path, const std::string& task_path,
                          const std::string& scenario_path,
                          const std::map<std::string, long>& overrides = {},
                          const std::map<std::string, double>& alpha_overrides = {});

struct RunResult {
  RunStatus status = RunStatus::kDone;
  TraceLog log;
  std::vector<Diagnosis> diagnoses;
  std::vector<BeliefState> beliefs;
  TraceNet net;
  int actions_executed = 0;
  int recovery_actions = 0;
};

// Runs the program against a SimEnvironment driven by the scenario.
RunResult run_scripted(const RunInputs& inputs, const ExecutorConfig& config = {});

}  // namespace retrace

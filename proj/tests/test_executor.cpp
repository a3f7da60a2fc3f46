#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "retrace/runner.hpp"

using namespace retrace;

namespace {

const std::string kData = RETRACE_DATA_DIR;
const std::string kGolden = RETRACE_GOLDEN_DIR;

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& scenario) {
  return run_scripted(load_run_inputs("", "", kData + "/scenarios/" + scenario + ".scenario"));
}

std::vector<std::string> golden_names() {
  std::vector<std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(kGolden))
    if (entry.path().extension() == ".log") out.push_back(entry.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

// Scripted environment answering from a fixed list.
class ListEnvironment : public Environment {
 public:
  explicit ListEnvironment(std::vector<ActionOutcome> outcomes) : outcomes_(std::move(outcomes)) {}
  ActionOutcome perform(const GroundAction&, int) override {
    if (next_ >= outcomes_.size()) return ActionOutcome::confirmed();
    return outcomes_[next_++];
  }
  std::string answer_prompt(int, const PromptRequest& p) override { return answer.empty() ? p.buttons[0] : answer; }
  std::string answer;

 private:
  std::vector<ActionOutcome> outcomes_;
  size_t next_ = 0;
};

}  // namespace

class Golden : public ::testing::TestWithParam<std::string> {};

TEST_P(Golden, LogMatchesAndIsDeterministic) {
  RunResult first = run(GetParam());
  EXPECT_EQ(first.log.text(), read(kGolden + "/" + GetParam() + ".log"));
  EXPECT_EQ(run(GetParam()).log.text(), first.log.text());
}

TEST_P(Golden, BeliefsEqualNetMarginals) {
  RunResult r = run(GetParam());
  ASSERT_EQ(static_cast<int>(r.beliefs.size()), r.net.frontier());
  for (int t = 1; t <= r.net.frontier(); ++t) {
    BeliefState from_net = beliefs_at(r.net, t);
    for (const auto& [lit, p] : r.beliefs[t - 1].entries()) EXPECT_NEAR(from_net.p(lit), p, 1e-12);
    for (const auto& [lit, p] : from_net.entries()) EXPECT_NEAR(r.beliefs[t - 1].p(lit), p, 1e-12);
  }
}

TEST_P(Golden, RecoveryPlansMatchExhaustiveSearch) {
  ExecutorConfig config;
  config.verify_with_oracle = true;
  RunResult checked = run_scripted(
      load_run_inputs("", "", kData + "/scenarios/" + GetParam() + ".scenario"), config);
  EXPECT_EQ(checked.log.text(), run(GetParam()).log.text());
}

INSTANTIATE_TEST_SUITE_P(Scenarios, Golden, ::testing::ValuesIn(golden_names()),
                         [](const auto& info) {
                           std::string s = info.param;
                           std::replace(s.begin(), s.end(), '-', '_');
                           return s;
                         });

TEST(Executor, OutcomesOfTheTraceScenarios) {
  EXPECT_EQ(run("pd2-package-b-missing").status, RunStatus::kDone);
  EXPECT_EQ(run("el-wrong-floor").status, RunStatus::kDone);
  EXPECT_EQ(run("es-restarted").status, RunStatus::kDone);
  EXPECT_EQ(run("es-lost").status, RunStatus::kUnrecoverable);
  EXPECT_EQ(run("sc5-not-returned").status, RunStatus::kUnrecoverable);
  RunResult ue = run("pd2-wrong-package");
  EXPECT_EQ(exit_code(ue.status), 2);
  ASSERT_FALSE(ue.diagnoses.empty());
  EXPECT_EQ(ue.log.events().back().kind, EventKind::kAbort);
}

TEST(Executor, RecoveryIsCheaperThanStartingOver) {
  EXPECT_EQ(run("pd2-package-b-missing").recovery_actions, 4);
  EXPECT_EQ(run("pd3-package-2-missing").recovery_actions, 4);
  EXPECT_EQ(run("el-wrong-floor").recovery_actions, 3);
}

TEST(Executor, AllComplyRunsEveryProgramWithoutDiagnosis) {
  for (const auto& task : {"pickup2", "npd", "el", "sc", "es"}) {
    RunResult r = run_scripted(load_run_inputs(kData + "/models/service.rmodel", kData + "/tasks/" + task + ".task",
                                               kData + "/scenarios/all-comply.scenario"));
    EXPECT_EQ(r.status, RunStatus::kDone) << task;
    EXPECT_TRUE(r.diagnoses.empty()) << task;
  }
}

TEST(Executor, EmptyProgramIsDone) {
  RobotModel m = load_model(kData + "/models/service.rmodel");
  TaskProgram p = parse_task("");
  ListEnvironment env({});
  Session s(m, p, env);
  EXPECT_EQ(s.run(), RunStatus::kDone);
  EXPECT_EQ(s.net().frontier(), 0);
  EXPECT_EQ(s.log().text(), "DONE\n");
}

TEST(Executor, FailureOnTheLastStatementResumesIntoDone) {
  RobotModel m = load_model(kData + "/models/service.rmodel");
  TaskProgram p = parse_task("robot.goto(\"mail room\")\nrobot.pickup(\"Package A\")\nrobot.give(\"Package A\")\n");
  ListEnvironment env({ActionOutcome::confirmed(), ActionOutcome::confirmed(), ActionOutcome::cannot("missing")});
  Session s(m, p, env);
  EXPECT_EQ(s.run(), RunStatus::kDone);
  const auto& ev = s.log().events();
  ASSERT_GE(ev.size(), 2u);
  EXPECT_EQ(ev[ev.size() - 2].line(), "RESUME after=give(Package A)[l=mail room]");
  EXPECT_EQ(ev.back().kind, EventKind::kDone);
}

TEST(Executor, PredictedFailureIsCaughtBeforeDispatch) {
  RobotModel m = load_model(kData + "/models/service.rmodel");
  TaskProgram p = parse_task("robot.goto(\"mail room\")\nrobot.give(\"Package A\")\n");
  ListEnvironment env({});
  Session s(m, p, env);
  EXPECT_EQ(s.run(), RunStatus::kUnrecoverable);
  bool pf = false;
  for (const auto& e : s.log().events()) pf = pf || e.kind == EventKind::kPrecondFail;
  EXPECT_TRUE(pf);
  EXPECT_EQ(s.net().frontier(), 1);
}

TEST(Executor, RetryLimitStopsRepeatedFailures) {
  RobotModel m = load_model(kData + "/models/service.rmodel");
  TaskProgram p = parse_task("robot.goto(\"mail room\")\nrobot.pickup(\"Package A\")\nrobot.give(\"Package A\")\n");
  // Every give fails; each round blames the latest pickup, so diagnoses differ.
  std::vector<ActionOutcome> outcomes{ActionOutcome::confirmed(), ActionOutcome::confirmed()};
  for (int i = 0; i < 10; ++i) {
    outcomes.push_back(ActionOutcome::cannot("missing"));
    outcomes.push_back(ActionOutcome::confirmed());
  }
  ListEnvironment env(outcomes);
  ExecutorConfig config;
  config.retry_limit = 2;
  Session s(m, p, env, config);
  EXPECT_EQ(s.run(), RunStatus::kRetryLimit);
  EXPECT_EQ(exit_code(RunStatus::kRetryLimit), 3);
  EXPECT_EQ(s.diagnoses().size(), 2u);
}

TEST(Executor, LabelWithoutEvidenceAborts) {
  RobotModel m = load_model(kData + "/models/service.rmodel");
  TaskProgram p = parse_task("robot.goto(\"mail room\")\n");
  ListEnvironment env({ActionOutcome::cannot("")});
  Session s(m, p, env);
  EXPECT_EQ(s.run(), RunStatus::kUnrecoverable);
  EXPECT_EQ(s.log().events().back().line(), "ABORT reason=no-evidence detail=\"goto(mail room)\"");
}

TEST(Executor, TimeoutUsesTheDeclaredLabel) {
  RobotModel m = load_model(kData + "/models/service.rmodel");
  TaskProgram p = parse_task("robot.goto(\"lab\")\nrobot.askFollow(\"lab\")\nrobot.askFollow(\"lab\")\n");
  ListEnvironment env({ActionOutcome::confirmed(), ActionOutcome::confirmed(), ActionOutcome::timeout()});
  Session s(m, p, env);
  s.run();
  bool seen = false;
  for (const auto& e : s.log().events())
    if (e.kind == EventKind::kActionCannot) {
      EXPECT_EQ(e.payload.at("label"), "timeout");
      seen = true;
    }
  EXPECT_TRUE(seen);
}

TEST(Executor, AnswersOutsideThePromptButtonsAreConfigErrors) {
  RobotModel m = load_model(kData + "/models/service.rmodel");
  TaskProgram p = parse_task("x = robot.prompt(\"Ready?\", buttons=[\"yes\", \"no\"])\n");
  ListEnvironment env({});
  env.answer = "maybe";
  Session s(m, p, env);
  EXPECT_EQ(s.run(), RunStatus::kConfigError);
  EXPECT_EQ(exit_code(RunStatus::kConfigError), 4);
}

TEST(Executor, UnknownActionIsConfigError) {
  RobotModel m = load_model(kData + "/models/service.rmodel");
  TaskProgram p = parse_task("robot.fly(\"lab\")\n");
  ListEnvironment env({});
  Session s(m, p, env);
  EXPECT_EQ(s.run(), RunStatus::kConfigError);
}

TEST(Executor, ActionPromptsAndAnswers) {
  RobotModel m = load_model(kData + "/models/service.rmodel");
  GroundAction g = ground_action(m, "pickup", {{"x", "Package A"}, {"l", "mail room"}}, [](const Literal&) { return false; });
  PromptRequest p = action_prompt(g);
  EXPECT_EQ(p.buttons, (std::vector<std::string>{"confirm", "cannot: missing", "cannot: unavailable"}));
  EXPECT_EQ(parse_action_answer("cannot: missing").label, "missing");
  EXPECT_EQ(parse_action_answer("confirm").status, ActionOutcome::Status::kConfirmed);
  EXPECT_THROW(parse_action_answer("nope"), std::invalid_argument);
}

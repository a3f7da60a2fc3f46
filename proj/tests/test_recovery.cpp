#include <gtest/gtest.h>

#include "retrace/recovery.hpp"

#include "retrace/belief.hpp"

using namespace retrace;

namespace {

PerforatedTrace trace(std::vector<bool> v) { return PerforatedTrace{std::move(v)}; }

struct TwoPackages {
  RobotModel model = load_model(RETRACE_DATA_DIR "/models/service.rmodel");
  RecoveryProblem problem;

  TwoPackages() {
    BeliefState b;
    std::vector<std::pair<std::string, ArgMap>> program = {
        {"goto", {{"dst", "mail room"}}},  {"pickup", {{"x", "Package A"}}},
        {"pickup", {{"x", "Package B"}}},  {"goto", {{"dst", "location A"}}},
        {"give", {{"x", "Package A"}}},    {"goto", {{"dst", "location B"}}},
        {"give", {{"x", "Package B"}}}};
    for (const auto& [name, args] : program) {
      GroundAction g = ground_action(model, name, args, [&](const Literal& l) { return ml_literal(b, l); });
      problem.history.push_back(g);
      b = forward_update(b, g);
    }
    problem.model = &model;
    problem.t_f = 3;
    problem.start = {Literal{"at", {"location B"}}};
  }
};

}  // namespace

TEST(Recovery, TieBreakPrefersShortThenLate) {
  EXPECT_TRUE(preferred(trace({1, 0, 1}), trace({1, 1, 1})));
  EXPECT_TRUE(preferred(trace({0, 1, 1}), trace({1, 0, 1})));
  EXPECT_FALSE(preferred(trace({1, 0, 1}), trace({0, 1, 1})));
  EXPECT_FALSE(preferred(trace({1, 0, 1}), trace({1, 0, 1})));
  EXPECT_EQ(trace({1, 0, 1, 1}).indices(), (std::vector<int>{1, 3, 4}));
  EXPECT_EQ(trace({1, 0, 1, 1}).length(), 3);
}

TEST(Recovery, MissingPackageBTrace) {
  TwoPackages p;
  auto t = search_min_trace(p.problem);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->indices(), (std::vector<int>{1, 3, 6, 7}));
  EXPECT_TRUE(check_trace(p.problem, *t));
  EXPECT_EQ(brute_force_trace(p.problem), t);
}

TEST(Recovery, MissingPackageATrace) {
  TwoPackages p;
  p.problem.history.resize(5);
  p.problem.t_f = 2;
  p.problem.start = {Literal{"at", {"location A"}}, Literal{"have", {"Package B"}}};
  auto t = search_min_trace(p.problem);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->indices(), (std::vector<int>{1, 2, 4, 5}));
  EXPECT_EQ(brute_force_trace(p.problem), t);
}

TEST(Recovery, GotoSourceIsResolvedAgainstTheSimulatedWorld) {
  TwoPackages p;
  RecoverySimulator sim(p.model);
  auto g = sim.reground(p.problem.history[0], {Literal{"at", {"location B"}}});
  ASSERT_TRUE(g);
  EXPECT_EQ(g->display(), "goto(mail room)[src=location B]");
  World w = *sim.step(p.problem.history[0], {Literal{"at", {"location B"}}});
  EXPECT_EQ(w, (World{Literal{"at", {"mail room"}}}));
  EXPECT_FALSE(sim.step(p.problem.history[1], {Literal{"at", {"location B"}}}));
}

TEST(Recovery, InvalidTracesAreRejected) {
  TwoPackages p;
  EXPECT_FALSE(check_trace(p.problem, trace({0, 0, 1, 0, 0, 1, 1})));  // pickup away from the mail room
  EXPECT_FALSE(check_trace(p.problem, trace({1, 0, 0, 0, 0, 1, 1})));  // t_f left out
  EXPECT_FALSE(check_trace(p.problem, trace({1, 0, 1})));
}

TEST(Recovery, NoTraceWhenTheFailedStepCannotRun) {
  TwoPackages p;
  p.problem.history = {p.problem.history[1], p.problem.history[4]};  // pickup, give; never at the mail room
  p.problem.t_f = 1;
  EXPECT_FALSE(search_min_trace(p.problem));
  EXPECT_FALSE(brute_force_trace(p.problem));
}

TEST(Recovery, ProblemBoundsAreChecked) {
  TwoPackages p;
  p.problem.t_f = 8;
  EXPECT_THROW(search_min_trace(p.problem), std::invalid_argument);
  p.problem.t_f = 1;
  p.problem.history.resize(22, p.problem.history[0]);
  EXPECT_THROW(brute_force_trace(p.problem), std::invalid_argument);
  EXPECT_TRUE(search_min_trace(p.problem));
}

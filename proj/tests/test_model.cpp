#include <gtest/gtest.h>

#include "retrace/model.hpp"

using namespace retrace;

namespace {

const char* kEnterRoom = R"(
(define (domain rooms)
  (:types room location door)
  (:objects r1 - room "r1 in" "r1 out" - location "d1" - door)
  (:functions (inside ?r - room) - location ((r1 "r1 in"))
              (outside ?r - room) - location ((r1 "r1 out"))
              (door ?r - room) - door ((r1 d1)))
  (:params (alpha 0.1))
  (:action enter-room
    :parameters (?r - room)
    :precondition (and (door-open (door ?r)) (at (outside ?r)))
    :postcondition (and (at (inside ?r)) (not (at (outside ?r))))
    :belief-update ((success s alpha)
                    (:= (at (inside ?r)) (and s (at (outside ?r))))
                    (:= (at (outside ?r)) (and (not s) (at (outside ?r)))))))
)";

RobotModel service() { return load_model(RETRACE_DATA_DIR "/models/service.rmodel"); }

HoldsFn holds_set(std::set<Literal> world) {
  return [world](const Literal& l) { return world.count(l) > 0; };
}

}  // namespace

TEST(Model, ParsesShippedModel) {
  RobotModel m = service();
  EXPECT_EQ(m.actions.size(), 13u);
  EXPECT_DOUBLE_EQ(m.params.at("alpha_pickup"), 0.2);
  EXPECT_EQ(m.objects.at("mail room"), "location");
}

TEST(Model, RoundTripsThroughPrinter) {
  RobotModel m = service();
  RobotModel again = parse_model(print_model(m));
  EXPECT_EQ(m, again);
  EXPECT_EQ(print_model(again), print_model(m));
  RobotModel rooms = parse_model(kEnterRoom);
  EXPECT_EQ(parse_model(print_model(rooms)), rooms);
}

TEST(Model, EmptyModelIsValid) {
  RobotModel m = parse_model("(define (domain empty))");
  EXPECT_TRUE(m.actions.empty());
  EXPECT_TRUE(m.objects.empty());
}

TEST(Model, RejectsInvalidModels) {
  EXPECT_THROW(parse_model("(define (domain x) (:params (a 1.3)))"), ValidationError);
  EXPECT_THROW(parse_model("(define (domain x) (:objects a - nope))"), ValidationError);
  const char* dup = R"((define (domain x) (:types t) (:params (a 0.1))
    (:action f :parameters () :belief-update ((success s a)))
    (:action f :parameters () :belief-update ((success s a)))))";
  EXPECT_THROW(parse_model(dup), ValidationError);
  const char* forward = R"((define (domain x) (:types t) (:params (a 0.1))
    (:action f :parameters ()
      :belief-update ((success s a) (:= (p) (new (q))) (:= (q) s)))))";
  EXPECT_THROW(parse_model(forward), ValidationError);
  const char* unknown_var = R"((define (domain x) (:types t) (:params (a 0.1))
    (:action f :parameters () :precondition (p ?y)
      :belief-update ((success s a)))))";
  EXPECT_THROW(parse_model(unknown_var), ValidationError);
  const char* no_success = R"((define (domain x) (:params (a 0.1))
    (:action f :parameters () :belief-update ((aux k a)))))";
  EXPECT_THROW(parse_model(no_success), ValidationError);
  const char* bad_evidence = R"((define (domain x) (:params (a 0.1))
    (:action f :parameters () :precondition (p) :belief-update ((success s a))
      :failure-evidence ((oops (not (q)))))))";
  EXPECT_THROW(parse_model(bad_evidence), ValidationError);
  EXPECT_THROW(parse_model("(define (domain x) (:params (a zero)))"), ParseError);
}

TEST(Model, ErrorsCarryPosition) {
  try {
    parse_model("(define (domain x)\n  (:bogus))");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.loc().line, 2);
    EXPECT_EQ(e.loc().column, 3);
  }
}

TEST(Grounding, EvaluatesFunctions) {
  RobotModel m = parse_model(kEnterRoom);
  GroundAction g = ground_action(m, "enter-room", {{"r", "r1"}}, holds_set({}));
  ASSERT_EQ(g.precondition.size(), 2u);
  EXPECT_EQ(to_string(g.precondition[0]), "door-open(d1)");
  EXPECT_EQ(to_string(g.precondition[1]), "at(r1 out)");
  ASSERT_EQ(g.updates.size(), 2u);
  EXPECT_EQ(to_string(g.updates[0].value, g), "(and s at(r1 out))");
}

TEST(Grounding, ResolvesImplicitLocation) {
  RobotModel m = service();
  GroundAction g = ground_action(m, "pickup", {{"x", "Package A"}},
                                 holds_set({{"at", {"mail room"}}}));
  EXPECT_EQ(g.display(), "pickup(Package A)[l=mail room]");
  EXPECT_EQ(g.key(), "pickup(Package A)");
  EXPECT_EQ(to_string(g.precondition[0]), "at(mail room)");
  EXPECT_EQ(g.frozen_args().at("l"), "mail room");
}

TEST(Grounding, ImplicitErrors) {
  RobotModel m = service();
  EXPECT_THROW(ground_action(m, "pickup", {{"x", "Package A"}},
                             holds_set({{"at", {"mail room"}}, {"at", {"lab"}}})),
               GroundingError);
  EXPECT_THROW(ground_action(m, "pickup", {{"x", "Package A"}}, holds_set({})),
               GroundingError);
  EXPECT_THROW(ground_action(m, "pickup", {{"x", "lab"}}, holds_set({{"at", {"lab"}}})),
               GroundingError);
  EXPECT_THROW(ground_action(m, "fly", {}, holds_set({})), GroundingError);
}

TEST(Grounding, OptionalSourceStaysUnbound) {
  RobotModel m = service();
  GroundAction first = ground_action(m, "goto", {{"dst", "mail room"}}, holds_set({}));
  EXPECT_EQ(first.display(), "goto(mail room)");
  ASSERT_EQ(first.updates.size(), 1u);
  EXPECT_EQ(to_string(first.updates[0].value, first), "s");
  ASSERT_EQ(first.postcondition.size(), 1u);

  GroundAction second = ground_action(m, "goto", {{"dst", "location A"}},
                                      holds_set({{"at", {"mail room"}}}));
  EXPECT_EQ(second.display(), "goto(location A)[src=mail room]");
  ASSERT_EQ(second.updates.size(), 2u);
  EXPECT_EQ(to_string(second.updates[1].value, second),
            "(or s (not (and (not s) at(mail room))))");
  EXPECT_TRUE(second.frozen_args().count("src") == 0);
}

TEST(Grounding, ForallExpandsOverOtherItems) {
  RobotModel m = service();
  GroundAction g = ground_action(m, "give", {{"x", "Package A"}},
                                 holds_set({{"at", {"location A"}}}));
  // the given item plus every other item
  EXPECT_EQ(g.updates.size(), m.objects_of_type("item").size());
  EXPECT_EQ(g.vars.size(), 2u);
  EXPECT_EQ(g.success_var(), 0);
  ASSERT_NE(g.evidence_for("missing"), nullptr);
  EXPECT_EQ(g.evidence_for("nope"), nullptr);
}

TEST(Grounding, IsDeterministic) {
  RobotModel m = service();
  auto world = holds_set({{"at", {"office 0"}}});
  EXPECT_EQ(ground_action(m, "give", {{"x", "package 0"}}, world),
            ground_action(m, "give", {{"x", "package 0"}}, world));
}

TEST(Grounding, BindArguments) {
  RobotModel m = service();
  ArgMap a = bind_arguments(m, "getSignature", {"office 0", "signature 0", "dissertation"});
  EXPECT_EQ(a.at("o"), "office 0");
  EXPECT_EQ(a.at("x"), "dissertation");
  EXPECT_THROW(bind_arguments(m, "pickup", {"a", "b"}), GroundingError);
}

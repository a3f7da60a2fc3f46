#pragma once

#include <optional>
#include <string>
#include <vector>

#include "retrace/bayesnet.hpp"
#include "retrace/belief.hpp"
#include "retrace/model.hpp"

namespace retrace {

// Observed literal values at detection time. A GroundLiteral here means
// "literal has value `positive`".
struct FailureEvidence {
  int timestep = 0;  // frontier when the failure was detected
  std::vector<GroundLiteral> literals;
};

// Precondition check before dispatch. On failure the evidence assigns each
// unsatisfied conjunct the value that makes it false.
std::optional<FailureEvidence> detect(const BeliefState& state, const GroundAction& action,
                                      int timestep);

// Maps evidence literals to their latest defining nodes. A literal with no
// node is identically false: "false" evidence on it carries no information
// and is dropped; "true" evidence is impossible and throws
// InconsistentEvidence.
Evidence to_net_evidence(const TraceNet& net, const FailureEvidence& e);

enum class FailureClass { kPostconditionFailure, kUnintendedEffect };

std::string to_string(FailureClass c);

struct Diagnosis {
  int t_f = 0;
  std::vector<Literal> r_f;
  std::vector<int> r_f_nodes;  // empty when there was no divergence
  FailureClass failure_class = FailureClass::kUnintendedEffect;
  bool no_divergence = false;
  std::string culprit;         // display string of a^{t_f}
  std::vector<double> posterior;
};

// Smallest timestep holding a literal node whose posterior ML differs from
// its forward ML; nullopt when evidence agrees with the forward prediction.
std::optional<int> localize(const TraceNet& net, const std::vector<double>& post);

// Literal nodes defined at t_f whose ML value flipped.
std::vector<int> failure_set(const TraceNet& net, const std::vector<double>& post, int t_f);

// Postcondition failure iff every flipped literal is a postcondition of
// a^{t_f} with the polarity the forward ML value agreed with, and the success
// variable of a^{t_f} is ML-false a posteriori.
FailureClass classify(const TraceNet& net, const std::vector<double>& post, int t_f,
                      const std::vector<int>& r_f_nodes);

// Full diagnosis of `evidence` raised by `failing` (not yet in the net).
// Without divergence the failure is placed at the failing action itself:
// t_f = frontier + 1, r_f = evidence literals, and the class follows from
// whether they are postconditions of the failing action.
Diagnosis diagnose(const TraceNet& net, const FailureEvidence& evidence,
                   const GroundAction& failing,
                   InferenceBackend backend = InferenceBackend::kVariableElimination);

}  // namespace retrace

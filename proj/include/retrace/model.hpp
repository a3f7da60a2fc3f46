#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "retrace/error.hpp"
#include "retrace/literal.hpp"

// The expert tier: typed action schemas with nominal pre/postconditions,
// a declarative belief-update program and a failure-evidence table.
//
// Surface syntax (.rmodel) is an s-expression superset of PDDL domains:
//
//   (define (domain office)
//     (:types location item)
//     (:objects "mail room" "office 0" - location "package 0" - item)
//     (:predicates (at ?l - location) (have ?x - item))
//     (:functions (inside ?r - room) - location ((lab "lab desk")))
//     (:params (alpha_pickup 0.2))
//     (:action pickup
//       :parameters (?x - item)
//       :implicit ((?l - location at))
//       :precondition (at ?l)
//       :postcondition (have ?x)
//       :belief-update ((success s alpha_pickup)
//                       (:= (have ?x) s))
//       :failure-evidence ((missing (not (have ?x))))))
//
// See docs/model-format.md for the full grammar.
namespace retrace {

// Positions are diagnostic only; two models that differ only in where their
// text came from compare equal.
inline bool operator==(const SourceLoc&, const SourceLoc&) { return true; }

struct Term {
  enum class Kind { kVariable, kConstant, kApply };

  Kind kind = Kind::kConstant;
  std::string name;  // variable name without '?', object name, or function
  std::vector<Term> args;

  bool operator==(const Term&) const = default;
};

struct LiteralTemplate {
  std::string predicate;
  std::vector<Term> args;
  bool positive = true;
  SourceLoc loc;

  bool operator==(const LiteralTemplate&) const = default;
  // Same predicate and argument terms, ignoring polarity.
  bool same_atom(const LiteralTemplate& other) const {
    return predicate == other.predicate && args == other.args;
  }
};

// Boolean expression of a belief-update statement. kPrior reads the literal's
// value before the action; kNew reads a value assigned earlier in the same
// program. kBound and kEqual are decided at grounding time.
struct Expr {
  enum class Kind {
    kTrue,
    kFalse,
    kActionVar,
    kPrior,
    kNew,
    kNot,
    kAnd,
    kOr,
    kBound,
    kEqual
  };

  Kind kind = Kind::kTrue;
  std::string name;         // kActionVar, kBound
  LiteralTemplate literal;  // kPrior, kNew
  std::vector<Term> terms;  // kEqual
  std::vector<Expr> operands;
  SourceLoc loc;

  bool operator==(const Expr&) const = default;
};

struct Parameter {
  std::string name;
  std::string type;

  bool operator==(const Parameter&) const = default;
};

// A parameter the task program may omit. Its value is the unique object o of
// `type` for which family(o) is ML-true in the current world. Optional ones
// stay unbound when there is no candidate.
struct ImplicitParameter {
  std::string name;
  std::string type;
  std::string family;
  bool optional = false;

  bool operator==(const ImplicitParameter&) const = default;
};

struct Statement {
  enum class Kind { kAssign, kWhen, kForall };

  Kind kind = Kind::kAssign;
  LiteralTemplate target;        // kAssign
  Expr value;                    // kAssign
  Expr condition;                // kWhen
  std::vector<Parameter> bound;  // kForall
  std::vector<Statement> body;   // kWhen, kForall
  SourceLoc loc;

  bool operator==(const Statement&) const = default;
};

// An action-specific Bernoulli variable; P(true) = 1 - params[alpha].
struct ActionVarDecl {
  std::string name;
  std::string alpha;
  bool success = false;

  bool operator==(const ActionVarDecl&) const = default;
};

struct BeliefUpdateProgram {
  std::vector<ActionVarDecl> vars;
  std::vector<Statement> statements;

  bool operator==(const BeliefUpdateProgram&) const = default;
};

struct FailureEvidenceEntry {
  std::string label;
  std::vector<LiteralTemplate> literals;

  bool operator==(const FailureEvidenceEntry&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<Parameter> parameters;
  std::vector<ImplicitParameter> implicit;
  std::vector<LiteralTemplate> precondition;
  std::vector<LiteralTemplate> postcondition;
  BeliefUpdateProgram belief_update;
  std::vector<FailureEvidenceEntry> failure_evidence;
  SourceLoc loc;

  bool operator==(const ActionSchema&) const = default;

  const ActionVarDecl& success_var() const;
  const FailureEvidenceEntry* find_evidence(std::string_view label) const;
};

struct FunctionDecl {
  std::string name;
  std::string argument_type;
  std::string result_type;
  std::map<std::string, std::string> mapping;

  bool operator==(const FunctionDecl&) const = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<std::string> arg_types;  // empty entries when undeclared

  bool operator==(const PredicateDecl&) const = default;
};

struct RobotModel {
  std::string name;
  std::set<std::string> types;
  std::map<std::string, std::string> objects;  // object -> type
  std::map<std::string, PredicateDecl> predicates;
  std::vector<FunctionDecl> functions;
  std::map<std::string, ActionSchema> actions;
  std::map<std::string, double> params;

  bool operator==(const RobotModel&) const = default;

  const ActionSchema& action(std::string_view name) const;
  const FunctionDecl* function(std::string_view name) const;
  std::vector<std::string> objects_of_type(std::string_view type) const;
};

// Parses and validates a .rmodel document.
RobotModel parse_model(std::string_view text);
RobotModel load_model(const std::string& path);

// Canonical text that parse_model reads back to an equal model.
std::string print_model(const RobotModel& model);

// Re-checks every model invariant; parse_model calls this.
void validate_model(const RobotModel& model);

// Overrides α values, checking names and bounds.
void set_params(RobotModel& model, const std::map<std::string, double>& values);

// ---------------------------------------------------------------------------
// Grounding

// Ground Boolean expression. kNew references are inlined during grounding, so
// leaves are constants, action variables (index into GroundAction::vars) and
// prior literals.
struct GroundExpr {
  enum class Kind { kConst, kVar, kPrior, kNot, kAnd, kOr };

  Kind kind = Kind::kConst;
  bool value = false;
  int var = -1;
  Literal literal;
  std::vector<GroundExpr> operands;

  bool operator==(const GroundExpr&) const = default;

  static GroundExpr constant(bool v) {
    GroundExpr e;
    e.value = v;
    return e;
  }
  bool is_const(bool v) const { return kind == Kind::kConst && value == v; }
};

struct GroundAssignment {
  Literal target;
  GroundExpr value;

  bool operator==(const GroundAssignment&) const = default;
};

struct GroundActionVar {
  std::string name;
  std::string alpha_name;
  double alpha = 0.0;
  bool success = false;

  bool operator==(const GroundActionVar&) const = default;
};

using ArgMap = std::map<std::string, std::string>;

struct GroundAction {
  std::string schema;
  std::vector<std::pair<std::string, std::string>> explicit_args;
  std::vector<std::pair<std::string, std::optional<std::string>>> implicit_args;
  std::set<std::string> optional_params;
  std::vector<GroundLiteral> precondition;
  std::vector<GroundLiteral> postcondition;
  std::vector<GroundActionVar> vars;
  // One entry per distinct target, in first-assignment order; a later
  // assignment to the same target replaces the earlier value.
  std::vector<GroundAssignment> updates;
  std::vector<std::pair<std::string, std::vector<GroundLiteral>>>
      failure_evidence;

  bool operator==(const GroundAction&) const = default;

  int success_var() const;
  // Evidence for an outcome label; nullptr if the schema declares none.
  const std::vector<GroundLiteral>* evidence_for(std::string_view label) const;
  // pickup(package 0)[l=mail room]
  std::string display() const;
  // pickup(package 0): explicit arguments only.
  std::string key() const;
  // Explicit and required implicit bindings; optional implicit bindings are
  // left out so re-grounding resolves them against the world at hand.
  ArgMap frozen_args() const;
};

// Truth of a literal in the world used to resolve implicit arguments.
using HoldsFn = std::function<bool(const Literal&)>;

// Grounds `action` with `args` (parameter name -> object, names without '?').
// Omitted implicit parameters are resolved with `holds`. Parameters listed in
// `unbound` are optional implicit parameters forced to stay unbound.
GroundAction ground_action(const RobotModel& model, std::string_view action,
                           const ArgMap& args, const HoldsFn& holds,
                           const std::set<std::string>& unbound = {});

// Maps positional arguments onto the schema's explicit parameters and merges
// named ones.
ArgMap bind_arguments(const RobotModel& model, std::string_view action,
                      const std::vector<std::string>& positional,
                      const ArgMap& named = {});

// Folds constants, treating the listed-absent priors as false.
GroundExpr simplify(const GroundExpr& e,
                    const std::function<bool(const Literal&)>& present);

// Evaluates with fixed leaf values.
bool evaluate(const GroundExpr& e, const std::function<bool(int)>& var_value,
              const std::function<bool(const Literal&)>& prior_value);

// Distinct leaves of an expression.
void collect_leaves(const GroundExpr& e, std::set<int>& vars,
                    std::set<Literal>& priors);

std::string to_string(const GroundExpr& e, const GroundAction& owner);

}  // namespace retrace

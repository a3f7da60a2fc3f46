#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "retrace/literal.hpp"
#include "retrace/model.hpp"

namespace retrace {

// Bernoulli marginal per literal. Literals that were never defined are
// identically false.
class BeliefState {
 public:
  double p(const Literal& lit) const;
  bool contains(const Literal& lit) const { return probs_.count(lit) > 0; }
  void set(const Literal& lit, double p);
  const std::map<Literal, double>& entries() const { return probs_; }
  bool empty() const { return probs_.empty(); }

  bool operator==(const BeliefState&) const = default;

 private:
  std::map<Literal, double> probs_;
};

// p(lit) > 0.5; ties are false.
bool ml_literal(const BeliefState& state, const Literal& lit);

// Conjunction of ML values; negative conjuncts use the negated ML value.
bool eval_predicate(const BeliefState& state, const std::vector<GroundLiteral>& conj);

// The ML-true literals.
std::set<Literal> ml_world(const BeliefState& state);

// An assignment is skipped when its target has never been defined and its
// expression is constant false once undefined priors are read as false.
// Otherwise e.g. a forall over every item would define have(y)=0 for items
// the robot never saw.
bool update_applies(const GroundAssignment& update,
                    const std::function<bool(const Literal&)>& defined);

// Exact P(expr) with action variables ~ Bern(1 - alpha) and prior literals
// read from `state`, all independent.
double expression_marginal(const GroundExpr& expr, const GroundAction& action,
                           const BeliefState& state);

BeliefState forward_update(const BeliefState& state, const GroundAction& action);

// Sorted "pred(args)=p" lines.
std::string dump(const BeliefState& state);

}  // namespace retrace

#include "retrace/belief.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace retrace {

double BeliefState::p(const Literal& lit) const {
  auto it = probs_.find(lit);
  return it == probs_.end() ? 0.0 : it->second;
}

void BeliefState::set(const Literal& lit, double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("probability out of range for " + to_string(lit));
  probs_[lit] = p;
}

bool ml_literal(const BeliefState& state, const Literal& lit) {
  return state.p(lit) > 0.5;
}

bool eval_predicate(const BeliefState& state, const std::vector<GroundLiteral>& conj) {
  for (const auto& g : conj)
    if (ml_literal(state, g.literal) != g.positive) return false;
  return true;
}

std::set<Literal> ml_world(const BeliefState& state) {
  std::set<Literal> out;
  for (const auto& [lit, p] : state.entries())
    if (p > 0.5) out.insert(lit);
  return out;
}

bool update_applies(const GroundAssignment& update,
                    const std::function<bool(const Literal&)>& defined) {
  if (defined(update.target)) return true;
  return !simplify(update.value, defined).is_const(false);
}

double expression_marginal(const GroundExpr& expr, const GroundAction& action,
                           const BeliefState& state) {
  std::set<int> var_set;
  std::set<Literal> prior_set;
  collect_leaves(expr, var_set, prior_set);
  std::vector<int> vars(var_set.begin(), var_set.end());
  std::vector<Literal> priors(prior_set.begin(), prior_set.end());
  const size_t n = vars.size() + priors.size();
  if (n > 24) throw std::runtime_error("belief-update expression has too many leaves");

  std::vector<double> p_true;
  for (int v : vars) p_true.push_back(1.0 - action.vars.at(v).alpha);
  for (const auto& l : priors) p_true.push_back(state.p(l));

  std::map<int, size_t> var_pos;
  for (size_t i = 0; i < vars.size(); ++i) var_pos[vars[i]] = i;
  std::map<Literal, size_t> prior_pos;
  for (size_t i = 0; i < priors.size(); ++i) prior_pos[priors[i]] = vars.size() + i;

  double total = 0.0;
  for (uint64_t bits = 0; bits < (uint64_t{1} << n); ++bits) {
    double w = 1.0;
    for (size_t i = 0; i < n && w > 0.0; ++i)
      w *= (bits >> i & 1) ? p_true[i] : 1.0 - p_true[i];
    if (w == 0.0) continue;
    bool v = evaluate(
        expr, [&](int var) { return (bits >> var_pos.at(var) & 1) != 0; },
        [&](const Literal& l) { return (bits >> prior_pos.at(l) & 1) != 0; });
    if (v) total += w;
  }
  return total;
}

BeliefState forward_update(const BeliefState& state, const GroundAction& action) {
  BeliefState next = state;
  auto defined = [&](const Literal& l) { return state.contains(l); };
  for (const auto& u : action.updates) {
    if (!update_applies(u, defined)) continue;
    double p = expression_marginal(u.value, action, state);
    next.set(u.target, std::clamp(p, 0.0, 1.0));
  }
  return next;
}

std::string dump(const BeliefState& state) {
  std::string out;
  char buf[64];
  for (const auto& [lit, p] : state.entries()) {
    std::snprintf(buf, sizeof buf, "=%.6f\n", p);
    out += to_string(lit) + buf;
  }
  return out;
}

}  // namespace retrace

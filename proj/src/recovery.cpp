#include "retrace/recovery.hpp"

#include <map>
#include <stdexcept>

#include "retrace/belief.hpp"

namespace retrace {

int PerforatedTrace::length() const {
  int n = 0;
  for (bool b : include) n += b;
  return n;
}

std::vector<int> PerforatedTrace::indices() const {
  std::vector<int> out;
  for (size_t i = 0; i < include.size(); ++i)
    if (include[i]) out.push_back(static_cast<int>(i) + 1);
  return out;
}

bool preferred(const PerforatedTrace& a, const PerforatedTrace& b) {
  if (a.length() != b.length()) return a.length() < b.length();
  for (size_t i = a.include.size(); i-- > 0;)
    if (a.include[i] != b.include[i]) return a.include[i];
  return false;
}

std::optional<GroundAction> RecoverySimulator::reground(const GroundAction& original,
                                                        const World& w) const {
  try {
    return ground_action(model_, original.schema, original.frozen_args(),
                         [&](const Literal& l) { return w.count(l) > 0; });
  } catch (const GroundingError&) {
    return std::nullopt;
  }
}

bool RecoverySimulator::satisfied(const std::vector<GroundLiteral>& conj, const World& w) {
  for (const auto& c : conj)
    if ((w.count(c.literal) > 0) != c.positive) return false;
  return true;
}

World RecoverySimulator::apply(const GroundAction& g, const World& w) {
  World next = w;
  for (const auto& u : g.updates) {
    bool v = evaluate(
        u.value, [](int) { return true; }, [&](const Literal& l) { return w.count(l) > 0; });
    if (v)
      next.insert(u.target);
    else
      next.erase(u.target);
  }
  return next;
}

std::optional<World> RecoverySimulator::step(const GroundAction& original, const World& w) const {
  auto g = reground(original, w);
  if (!g || !satisfied(g->precondition, w)) return std::nullopt;
  return apply(*g, w);
}

namespace {

void check_problem(const RecoveryProblem& p) {
  if (!p.model) throw std::invalid_argument("recovery problem without a model");
  const int d = static_cast<int>(p.history.size());
  if (d < 1 || p.t_f < 1 || p.t_f > d)
    throw std::invalid_argument("recovery problem: t_f must lie within the history");
}

bool forced(const RecoveryProblem& p, int pos) {
  return pos == p.t_f || pos == static_cast<int>(p.history.size());
}

class Search {
 public:
  explicit Search(const RecoveryProblem& p) : p_(p), sim_(*p.model) {}

  // Best suffix for positions pos..d from world w; nullopt if none is valid.
  std::optional<std::vector<bool>> best(int pos, const World& w) {
    const int d = static_cast<int>(p_.history.size());
    if (pos > d) return std::vector<bool>{};
    auto key = std::make_pair(pos, w);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    std::optional<std::vector<bool>> result;
    if (auto next = sim_.step(p_.history[pos - 1], w)) {
      if (auto rest = best(pos + 1, *next)) {
        rest->insert(rest->begin(), true);
        result = std::move(rest);
      }
    }
    if (!forced(p_, pos)) {
      if (auto rest = best(pos + 1, w)) {
        rest->insert(rest->begin(), false);
        if (!result || preferred(PerforatedTrace{*rest}, PerforatedTrace{*result}))
          result = std::move(rest);
      }
    }
    memo_.emplace(std::move(key), result);
    return result;
  }

 private:
  const RecoveryProblem& p_;
  RecoverySimulator sim_;
  std::map<std::pair<int, World>, std::optional<std::vector<bool>>> memo_;
};

}  // namespace

std::optional<PerforatedTrace> search_min_trace(const RecoveryProblem& problem) {
  check_problem(problem);
  Search s(problem);
  auto v = s.best(1, problem.start);
  if (!v) return std::nullopt;
  return PerforatedTrace{*v};
}

std::optional<PerforatedTrace> brute_force_trace(const RecoveryProblem& problem) {
  check_problem(problem);
  const int d = static_cast<int>(problem.history.size());
  if (d > 21) throw std::invalid_argument("brute-force trace search is limited to 21 actions");
  RecoverySimulator sim(*problem.model);
  std::optional<PerforatedTrace> best;
  for (uint32_t mask = 0; mask < (uint32_t{1} << d); ++mask) {
    PerforatedTrace t;
    t.include.resize(d);
    bool ok = true;
    for (int i = 0; i < d; ++i) {
      t.include[i] = (mask >> i & 1) != 0;
      if (forced(problem, i + 1) && !t.include[i]) ok = false;
    }
    if (!ok) continue;
    if (best && best->length() < t.length()) continue;
    World w = problem.start;
    for (int i = 0; i < d && ok; ++i) {
      if (!t.include[i]) continue;
      auto next = sim.step(problem.history[i], w);
      if (!next)
        ok = false;
      else
        w = std::move(*next);
    }
    if (ok && (!best || preferred(t, *best))) best = t;
  }
  return best;
}

bool check_trace(const RecoveryProblem& problem, const PerforatedTrace& trace) {
  const int d = static_cast<int>(problem.history.size());
  if (static_cast<int>(trace.include.size()) != d) return false;
  if (!trace.include[problem.t_f - 1] || !trace.include[d - 1]) return false;
  BeliefState b;
  for (const auto& l : problem.start) b.set(l, 1.0);
  for (int i = 0; i < d; ++i) {
    if (!trace.include[i]) continue;
    const GroundAction& original = problem.history[i];
    GroundAction g;
    try {
      g = ground_action(*problem.model, original.schema, original.frozen_args(),
                        [&](const Literal& l) { return ml_literal(b, l); });
    } catch (const GroundingError&) {
      return false;
    }
    if (!eval_predicate(b, g.precondition)) return false;
    for (auto& v : g.vars) v.alpha = 0.0;
    b = forward_update(b, g);
  }
  return true;
}

World posterior_ml_world(const TraceNet& net, const std::vector<double>& post, int t) {
  World w;
  for (const auto& [lit, id] : net.world_at(t))
    if (post.at(id) > 0.5) w.insert(lit);
  return w;
}

}  // namespace retrace

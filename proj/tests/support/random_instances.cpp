#include "random_instances.hpp"

#include <sstream>

#include "retrace/belief.hpp"

namespace retrace::fixtures {

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::string random_formula(std::mt19937_64& rng, int preds, int vars, int depth) {
  const char* names[] = {"s", "v"};
  int pick = uniform(rng, 0, depth > 0 ? 5 : 1);
  switch (pick) {
    case 0: return names[uniform(rng, 0, vars - 1)];
    case 1: return "(p" + std::to_string(uniform(rng, 0, preds - 1)) + ")";
    case 2: return "(not " + random_formula(rng, preds, vars, depth - 1) + ")";
    case 3:
    case 4:
      return std::string(pick == 3 ? "(and " : "(or ") + random_formula(rng, preds, vars, depth - 1) + " " +
             random_formula(rng, preds, vars, depth - 1) + ")";
    default: return "(and s " + random_formula(rng, preds, vars, depth - 1) + ")";
  }
}

}  // namespace

std::string random_model_text(std::mt19937_64& rng, bool preconditions) {
  const int preds = uniform(rng, 3, 5);
  const int actions = uniform(rng, 2, 4);
  std::ostringstream out;
  out << "(define (domain random)\n  (:predicates";
  for (int i = 0; i < preds; ++i) out << " (p" << i << ")";
  out << ")\n  (:params";
  for (int a = 0; a < actions; ++a)
    out << " (alpha_" << a << " " << 0.05 + 0.4 * uniform01(rng) << ") (beta_" << a << " "
        << 0.05 + 0.4 * uniform01(rng) << ")";
  out << ")\n";
  for (int a = 0; a < actions; ++a) {
    const int vars = uniform(rng, 1, 2);
    std::set<int> targets;
    const int n_targets = uniform(rng, 1, 2);
    while (static_cast<int>(targets.size()) < n_targets) targets.insert(uniform(rng, 0, preds - 1));
    out << "  (:action a" << a << "\n    :parameters ()\n    :precondition (and";
    if (preconditions) {
      const int n_pre = uniform(rng, 0, 2);
      for (int k = 0; k < n_pre; ++k) {
        int p = uniform(rng, 0, preds - 1);
        if (uniform(rng, 0, 2) == 0)
          out << " (not (p" << p << "))";
        else
          out << " (p" << p << ")";
      }
    }
    out << ")\n    :postcondition (and";
    std::vector<std::string> assigns;
    for (int t : targets) {
      bool positive = preconditions ? uniform(rng, 0, 3) > 0 : true;
      out << (positive ? " (p" : " (not (p") << t << (positive ? ")" : "))");
      std::string value;
      if (preconditions)
        value = positive ? "(or s (p" + std::to_string(t) + "))" : "(and (not s) (p" + std::to_string(t) + "))";
      else
        value = random_formula(rng, preds, vars, 2);
      assigns.push_back("(:= (p" + std::to_string(t) + ") " + value + ")");
    }
    out << ")\n    :belief-update ((success s alpha_" << a << ")";
    if (vars == 2) out << " (aux v beta_" << a << ")";
    for (const auto& s : assigns) out << "\n      " << s;
    out << "))\n";
  }
  out << ")\n";
  return out.str();
}

RandomNet random_net(std::uint64_t seed, int max_nodes) {
  std::mt19937_64 rng(seed);
  RandomNet r;
  r.model = parse_model(random_model_text(rng, false));
  std::vector<std::string> names;
  for (const auto& [name, schema] : r.model.actions) names.push_back(name);
  const int priors = uniform(rng, 0, 2);
  std::set<int> prior_preds;
  for (int i = 0; i < priors; ++i) prior_preds.insert(uniform(rng, 0, static_cast<int>(r.model.predicates.size()) - 1));
  BeliefState b;
  for (int p : prior_preds) {
    Literal lit{"p" + std::to_string(p), {}};
    double v = 0.1 + 0.8 * uniform01(rng);
    r.net.add_prior(lit, v);
    b.set(lit, v);
  }
  for (int t = 1; t <= 30; ++t) {
    const std::string& name = names[uniform(rng, 0, static_cast<int>(names.size()) - 1)];
    GroundAction g = ground_action(r.model, name, {}, [&](const Literal& l) { return ml_literal(b, l); });
    TraceNet next = r.net;
    next.extend(g, t);
    if (static_cast<int>(next.nodes().size()) > max_nodes) break;
    r.net = std::move(next);
    b = forward_update(b, g);
  }
  // Forward sample, then observe a few nodes at their sampled values.
  const auto& nodes = r.net.nodes();
  std::vector<int> sample(nodes.size(), 0);
  for (size_t i = 0; i < nodes.size(); ++i) {
    size_t row = 0;
    for (size_t j = 0; j < nodes[i].parents.size(); ++j) row |= static_cast<size_t>(sample[nodes[i].parents[j]]) << j;
    sample[i] = uniform01(rng) < nodes[i].cpt[row];
  }
  if (!nodes.empty()) {
    const int observed = uniform(rng, 0, 3);
    for (int k = 0; k < observed; ++k) {
      int id = uniform(rng, 0, static_cast<int>(nodes.size()) - 1);
      r.evidence[id] = sample[id] != 0;
    }
  }
  return r;
}

void random_history(std::uint64_t seed, const std::string& service_path, RandomHistory& out, int max_len) {
  std::mt19937_64 rng(seed);
  const int d = uniform(rng, 2, max_len);
  out.problem = {};
  World w;
  if (seed % 2 == 1) {
    out.model = parse_model(random_model_text(rng, true));
    std::vector<std::string> names;
    for (const auto& [name, schema] : out.model.actions) names.push_back(name);
    for (const auto& [name, decl] : out.model.predicates)
      if (uniform(rng, 0, 1)) w.insert(Literal{name, {}});
    for (int i = 0; i < d; ++i) {
      const std::string& name = names[uniform(rng, 0, static_cast<int>(names.size()) - 1)];
      out.problem.history.push_back(ground_action(out.model, name, {}, [](const Literal&) { return false; }));
    }
  } else {
    out.model = load_model(service_path);
    const std::vector<std::string> places = {"mail room", "location A", "location B", "office 0"};
    const std::vector<std::string> items = {"Package A", "Package B", "package 0"};
    w.insert(Literal{"at", {places[uniform(rng, 0, 3)]}});
    for (const auto& item : items)
      if (uniform(rng, 0, 2) == 0) w.insert(Literal{"have", {item}});
    // Actions are grounded against the world they were planned in, like a
    // real execution would; goto re-resolves its source during recovery.
    World plan = w;
    for (int i = 0; i < d; ++i) {
      int kind = uniform(rng, 0, 2);
      GroundAction g;
      auto holds = [&](const Literal& l) { return plan.count(l) > 0; };
      try {
        if (kind == 0)
          g = ground_action(out.model, "goto", {{"dst", places[uniform(rng, 0, 3)]}}, holds);
        else
          g = ground_action(out.model, kind == 1 ? "pickup" : "give", {{"x", items[uniform(rng, 0, 2)]}}, holds);
      } catch (const GroundingError&) {
        g = ground_action(out.model, "goto", {{"dst", places[uniform(rng, 0, 3)]}}, holds);
      }
      out.problem.history.push_back(g);
      if (RecoverySimulator::satisfied(g.precondition, plan) || uniform(rng, 0, 1))
        plan = RecoverySimulator::apply(g, plan);
    }
  }
  out.problem.model = &out.model;
  out.problem.t_f = uniform(rng, 1, d);
  out.problem.start = w;
}

}  // namespace retrace::fixtures

#include "retrace/diagnosis.hpp"

#include <algorithm>
#include <climits>

namespace retrace {

std::optional<FailureEvidence> detect(const BeliefState& state, const GroundAction& action,
                                      int timestep) {
  FailureEvidence e;
  e.timestep = timestep;
  for (const auto& c : action.precondition)
    if (ml_literal(state, c.literal) != c.positive) e.literals.push_back({c.literal, !c.positive});
  if (e.literals.empty()) return std::nullopt;
  return e;
}

Evidence to_net_evidence(const TraceNet& net, const FailureEvidence& e) {
  Evidence out;
  for (const auto& g : e.literals) {
    auto id = net.latest(g.literal, e.timestep);
    if (!id) {
      if (g.positive)
        throw InconsistentEvidence(to_string(g.literal) + " was never established");
      continue;
    }
    auto [it, inserted] = out.emplace(*id, g.positive);
    if (!inserted && it->second != g.positive)
      throw InconsistentEvidence("contradictory evidence on " + to_string(g.literal));
  }
  return out;
}

std::string to_string(FailureClass c) {
  return c == FailureClass::kPostconditionFailure ? "PostconditionFailure" : "UnintendedEffect";
}

namespace {

bool flipped(const TraceNet& net, const std::vector<double>& post, int id) {
  return (post[id] > 0.5) != (net.node(id).marginal > 0.5);
}

}  // namespace

std::optional<int> localize(const TraceNet& net, const std::vector<double>& post) {
  int best = INT_MAX;
  for (size_t i = 0; i < net.nodes().size(); ++i) {
    const Node& n = net.node(static_cast<int>(i));
    if (n.id.kind != NodeId::Kind::kWorldLiteral) continue;
    if (flipped(net, post, static_cast<int>(i))) best = std::min(best, n.id.timestep);
  }
  if (best == INT_MAX) return std::nullopt;
  return best;
}

std::vector<int> failure_set(const TraceNet& net, const std::vector<double>& post, int t_f) {
  std::vector<int> out;
  for (size_t i = 0; i < net.nodes().size(); ++i) {
    const Node& n = net.node(static_cast<int>(i));
    if (n.id.kind == NodeId::Kind::kWorldLiteral && n.id.timestep == t_f &&
        flipped(net, post, static_cast<int>(i)))
      out.push_back(static_cast<int>(i));
  }
  return out;
}

FailureClass classify(const TraceNet& net, const std::vector<double>& post, int t_f,
                      const std::vector<int>& r_f_nodes) {
  if (t_f < 1 || t_f > net.frontier()) return FailureClass::kUnintendedEffect;
  const TraceNet::Step& step = net.step(t_f);
  for (int id : r_f_nodes) {
    const Node& n = net.node(id);
    bool forward = n.marginal > 0.5;
    bool promised = std::any_of(step.action.postcondition.begin(), step.action.postcondition.end(),
                                [&](const GroundLiteral& g) {
                                  return g.literal == n.id.literal && g.positive == forward;
                                });
    if (!promised) return FailureClass::kUnintendedEffect;
  }
  int s = step.action.success_var();
  if (s < 0 || post[step.var_nodes.at(s)] > 0.5) return FailureClass::kUnintendedEffect;
  return FailureClass::kPostconditionFailure;
}

Diagnosis diagnose(const TraceNet& net, const FailureEvidence& evidence, const GroundAction& failing,
                   InferenceBackend backend) {
  Diagnosis d;
  d.posterior = infer(net, to_net_evidence(net, evidence), backend);
  if (auto t = localize(net, d.posterior)) {
    d.t_f = *t;
    d.r_f_nodes = failure_set(net, d.posterior, d.t_f);
    for (int id : d.r_f_nodes) d.r_f.push_back(net.node(id).id.literal);
    d.failure_class = classify(net, d.posterior, d.t_f, d.r_f_nodes);
    d.culprit = d.t_f >= 1 ? net.step(d.t_f).action.display() : "initial state";
    return d;
  }
  d.no_divergence = true;
  d.t_f = net.frontier() + 1;
  d.culprit = failing.display();
  bool all_post = !evidence.literals.empty();
  for (const auto& g : evidence.literals) {
    d.r_f.push_back(g.literal);
    bool promised = std::any_of(failing.postcondition.begin(), failing.postcondition.end(),
                                [&](const GroundLiteral& p) {
                                  return p.literal == g.literal && p.positive != g.positive;
                                });
    all_post = all_post && promised;
  }
  d.failure_class = all_post ? FailureClass::kPostconditionFailure : FailureClass::kUnintendedEffect;
  return d;
}

}  // namespace retrace

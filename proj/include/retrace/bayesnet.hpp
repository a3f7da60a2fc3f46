#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "retrace/belief.hpp"
#include "retrace/literal.hpp"
#include "retrace/model.hpp"

namespace retrace {

struct NodeId {
  enum class Kind { kWorldLiteral, kActionVar };

  Kind kind = Kind::kWorldLiteral;
  Literal literal;  // kWorldLiteral
  int timestep = 0;
  int index = 0;     // kActionVar: position in the action's variable list
  std::string var;   // kActionVar: declared name

  // have(Package B)@3, a3.s
  std::string name() const;
};

struct Node {
  NodeId id;
  std::vector<int> parents;
  // P(node = true | parent row); bit i of the row index is parents[i].
  std::vector<double> cpt;
  double marginal = 0.0;  // P(node = true) with no evidence
};

// Node index -> observed value.
using Evidence = std::map<int, bool>;

// Time-indexed Bayes net grown one executed action at a time. Literals an
// action leaves alone get no new node; a query for literal@t resolves to its
// latest defining node at or before t.
class TraceNet {
 public:
  struct Step {
    GroundAction action;
    std::vector<int> var_nodes;      // one per action variable
    std::vector<int> literal_nodes;  // nodes defined at this timestep
  };

  // Timestep of the last executed action; 0 for the empty net.
  int frontier() const { return static_cast<int>(steps_.size()); }

  // Adds the action executed at `timestep`, which must be frontier() + 1.
  void extend(const GroundAction& action, int timestep);

  // Root literal known before the first action; only valid while empty.
  int add_prior(const Literal& lit, double p);

  // Arbitrary node, for tests and hand-built nets. Parents must exist.
  int add_node(NodeId id, std::vector<int> parents, std::vector<double> cpt);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int i) const { return nodes_.at(i); }
  const Step& step(int t) const { return steps_.at(t - 1); }

  std::optional<int> latest(const Literal& lit, int timestep) const;
  std::optional<int> latest(const Literal& lit) const { return latest(lit, frontier()); }
  bool defines(const Literal& lit) const { return latest(lit).has_value(); }

  // Literal nodes defined at or before t, latest per literal.
  std::map<Literal, int> world_at(int t) const;

 private:
  int push(Node n);

  std::vector<Node> nodes_;
  std::vector<Step> steps_;
  std::map<Literal, std::vector<int>> history_;  // literal -> nodes, increasing t
};

// Exact marginals P(node = true | evidence) for every node, by variable
// elimination over the ancestors of the query and evidence, eliminating in
// descending timestep order. Throws InconsistentEvidence when P(evidence)=0.
std::vector<double> posterior(const TraceNet& net, const Evidence& evidence);

// The same marginals by enumerating the full joint; deterministic nodes do not
// branch. At most 24 nodes with a CPT entry strictly between 0 and 1.
std::vector<double> brute_force_posterior(const TraceNet& net, const Evidence& evidence);

enum class InferenceBackend { kVariableElimination, kBruteForce };

std::vector<double> infer(const TraceNet& net, const Evidence& evidence,
                          InferenceBackend backend);

// Forward belief at timestep t read off the net's marginals.
BeliefState beliefs_at(const TraceNet& net, int t);

// One node per line: id | parents | cpt-rows | marginal
std::string dump(const TraceNet& net);
std::string to_dot(const TraceNet& net, const std::vector<double>* marginals = nullptr);

}  // namespace retrace

#include "retrace/bayesnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <stdexcept>

namespace retrace {

double prior_marginal(const TraceNet& net, int id);

std::string NodeId::name() const {
  if (kind == Kind::kWorldLiteral) return to_string(literal) + "@" + std::to_string(timestep);
  return "a" + std::to_string(timestep) + "." + var;
}

int TraceNet::push(Node n) {
  for (int p : n.parents)
    if (p < 0 || p >= static_cast<int>(nodes_.size()))
      throw std::invalid_argument("parent of " + n.id.name() + " does not exist");
  if (n.cpt.size() != (size_t{1} << n.parents.size()))
    throw std::invalid_argument("CPT of " + n.id.name() + " has the wrong size");
  int id = static_cast<int>(nodes_.size());
  if (n.id.kind == NodeId::Kind::kWorldLiteral) {
    auto& h = history_[n.id.literal];
    if (!h.empty() && nodes_[h.back()].id.timestep >= n.id.timestep)
      throw std::invalid_argument(n.id.name() + " is defined twice");
    h.push_back(id);
  }
  nodes_.push_back(std::move(n));
  return id;
}

int TraceNet::add_node(NodeId id, std::vector<int> parents, std::vector<double> cpt) {
  Node n;
  n.id = std::move(id);
  n.parents = std::move(parents);
  n.cpt = std::move(cpt);
  int index = push(std::move(n));
  nodes_[index].marginal = prior_marginal(*this, index);
  return index;
}

int TraceNet::add_prior(const Literal& lit, double p) {
  if (!steps_.empty()) throw std::logic_error("priors must be added before the first action");
  Node n;
  n.id.literal = lit;
  n.id.timestep = 0;
  n.cpt = {p};
  n.marginal = p;
  return push(std::move(n));
}

std::optional<int> TraceNet::latest(const Literal& lit, int timestep) const {
  auto it = history_.find(lit);
  if (it == history_.end()) return std::nullopt;
  std::optional<int> out;
  for (int id : it->second) {
    if (nodes_[id].id.timestep > timestep) break;
    out = id;
  }
  return out;
}

std::map<Literal, int> TraceNet::world_at(int t) const {
  std::map<Literal, int> out;
  for (const auto& [lit, ids] : history_) {
    if (auto id = latest(lit, t)) out[lit] = *id;
  }
  return out;
}

void TraceNet::extend(const GroundAction& action, int timestep) {
  if (timestep != frontier() + 1)
    throw std::logic_error("extend: expected timestep " + std::to_string(frontier() + 1) +
                           ", got " + std::to_string(timestep));
  const int before = frontier();
  Step step;
  step.action = action;
  std::vector<Node> pending;
  for (size_t j = 0; j < action.vars.size(); ++j) {
    Node n;
    n.id.kind = NodeId::Kind::kActionVar;
    n.id.timestep = timestep;
    n.id.index = static_cast<int>(j);
    n.id.var = action.vars[j].name;
    n.cpt = {1.0 - action.vars[j].alpha};
    n.marginal = n.cpt[0];
    step.var_nodes.push_back(push(std::move(n)));
  }
  auto defined = [&](const Literal& l) { return latest(l, before).has_value(); };
  for (const auto& u : action.updates) {
    if (!update_applies(u, defined)) continue;
    GroundExpr expr = simplify(u.value, defined);
    std::set<int> vars;
    std::set<Literal> priors;
    collect_leaves(expr, vars, priors);
    Node n;
    n.id.literal = u.target;
    n.id.timestep = timestep;
    std::map<int, int> var_bit;
    std::map<Literal, int> prior_bit;
    for (int v : vars) {
      var_bit[v] = static_cast<int>(n.parents.size());
      n.parents.push_back(step.var_nodes.at(v));
    }
    for (const auto& l : priors) {
      prior_bit[l] = static_cast<int>(n.parents.size());
      n.parents.push_back(*latest(l, before));
    }
    const size_t rows = size_t{1} << n.parents.size();
    n.cpt.resize(rows);
    for (size_t row = 0; row < rows; ++row) {
      bool v = evaluate(
          expr, [&](int var) { return (row >> var_bit.at(var) & 1) != 0; },
          [&](const Literal& l) { return (row >> prior_bit.at(l) & 1) != 0; });
      n.cpt[row] = v ? 1.0 : 0.0;
    }
    pending.push_back(std::move(n));
  }
  // Updates within one action read the pre-action world, so all new literal
  // nodes are added after their parents have been resolved.
  for (auto& n : pending) step.literal_nodes.push_back(push(std::move(n)));
  steps_.push_back(std::move(step));
  for (int id : steps_.back().literal_nodes) nodes_[id].marginal = prior_marginal(*this, id);
}

// ---------------------------------------------------------------------------
// Variable elimination

namespace {

struct Factor {
  std::vector<int> vars;  // sorted
  std::vector<double> table;

  size_t position(int var) const {
    return static_cast<size_t>(std::lower_bound(vars.begin(), vars.end(), var) - vars.begin());
  }
  bool has(int var) const { return std::binary_search(vars.begin(), vars.end(), var); }
};

Factor multiply(const Factor& a, const Factor& b) {
  Factor out;
  std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(),
                 std::back_inserter(out.vars));
  if (out.vars.size() > 26) throw std::runtime_error("factor too large");
  std::vector<size_t> pos_a, pos_b;
  for (int v : a.vars) pos_a.push_back(out.position(v));
  for (int v : b.vars) pos_b.push_back(out.position(v));
  out.table.resize(size_t{1} << out.vars.size());
  for (size_t row = 0; row < out.table.size(); ++row) {
    size_t ra = 0, rb = 0;
    for (size_t i = 0; i < pos_a.size(); ++i) ra |= (row >> pos_a[i] & 1) << i;
    for (size_t i = 0; i < pos_b.size(); ++i) rb |= (row >> pos_b[i] & 1) << i;
    out.table[row] = a.table[ra] * b.table[rb];
  }
  return out;
}

Factor sum_out(const Factor& f, int var) {
  Factor out;
  size_t k = f.position(var);
  for (int v : f.vars)
    if (v != var) out.vars.push_back(v);
  out.table.assign(size_t{1} << out.vars.size(), 0.0);
  for (size_t row = 0; row < f.table.size(); ++row) {
    size_t low = row & ((size_t{1} << k) - 1);
    size_t high = row >> (k + 1);
    out.table[low | (high << k)] += f.table[row];
  }
  return out;
}

double normalize(Factor& f) {
  double total = 0.0;
  for (double x : f.table) total += x;
  if (total > 0.0)
    for (double& x : f.table) x /= total;
  return total;
}

// CPT of `id` as a factor, with evidence variables fixed.
Factor cpt_factor(const TraceNet& net, int id, const Evidence& evidence) {
  const Node& n = net.node(id);
  std::vector<int> scope = n.parents;
  scope.push_back(id);
  std::vector<int> free;
  for (int v : scope)
    if (!evidence.count(v) && std::find(free.begin(), free.end(), v) == free.end())
      free.push_back(v);
  std::sort(free.begin(), free.end());
  Factor f;
  f.vars = free;
  f.table.assign(size_t{1} << free.size(), 0.0);
  for (size_t row = 0; row < f.table.size(); ++row) {
    auto value = [&](int v) -> bool {
      auto e = evidence.find(v);
      if (e != evidence.end()) return e->second;
      return (row >> f.position(v) & 1) != 0;
    };
    size_t parent_row = 0;
    for (size_t i = 0; i < n.parents.size(); ++i)
      parent_row |= static_cast<size_t>(value(n.parents[i])) << i;
    double p = n.cpt[parent_row];
    f.table[row] = value(id) ? p : 1.0 - p;
  }
  return f;
}

std::vector<int> ancestors(const TraceNet& net, std::vector<int> seeds) {
  std::vector<char> seen(net.nodes().size(), 0);
  std::vector<int> out;
  while (!seeds.empty()) {
    int v = seeds.back();
    seeds.pop_back();
    if (seen[v]) continue;
    seen[v] = 1;
    out.push_back(v);
    for (int p : net.node(v).parents) seeds.push_back(p);
  }
  return out;
}

// Unnormalized-then-normalized distribution of `query` (or the total mass when
// query < 0) after eliminating every other relevant variable.
std::vector<double> eliminate(const TraceNet& net, const Evidence& evidence, int query) {
  std::vector<int> seeds;
  for (const auto& [v, _] : evidence) seeds.push_back(v);
  if (query >= 0) seeds.push_back(query);
  std::vector<int> relevant = ancestors(net, seeds);

  std::vector<Factor> factors;
  for (int id : relevant) factors.push_back(cpt_factor(net, id, evidence));

  std::vector<int> order;
  for (int id : relevant)
    if (id != query && !evidence.count(id)) order.push_back(id);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& na = net.node(a).id;
    const auto& nb = net.node(b).id;
    if (na.timestep != nb.timestep) return na.timestep > nb.timestep;
    return a > b;
  });

  for (int var : order) {
    Factor product;
    product.table = {1.0};
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (f.has(var))
        product = multiply(product, f);
      else
        rest.push_back(std::move(f));
    }
    Factor reduced = sum_out(product, var);
    if (normalize(reduced) <= 0.0)
      throw InconsistentEvidence("evidence has probability zero under the trace net");
    rest.push_back(std::move(reduced));
    factors = std::move(rest);
  }
  Factor result;
  result.table = {1.0};
  for (const auto& f : factors) {
    result = multiply(result, f);
    if (normalize(result) <= 0.0)
      throw InconsistentEvidence("evidence has probability zero under the trace net");
  }
  return result.table;
}

void check_evidence(const TraceNet& net, const Evidence& evidence) {
  for (const auto& [v, _] : evidence)
    if (v < 0 || v >= static_cast<int>(net.nodes().size()))
      throw std::out_of_range("evidence refers to a node that does not exist");
}

}  // namespace

double prior_marginal(const TraceNet& net, int id) { return eliminate(net, {}, id).at(1); }

std::vector<double> posterior(const TraceNet& net, const Evidence& evidence) {
  check_evidence(net, evidence);
  const int n = static_cast<int>(net.nodes().size());
  std::vector<double> out(n, 0.0);
  if (!evidence.empty()) eliminate(net, evidence, -1);  // consistency check
  for (int q = 0; q < n; ++q) {
    auto e = evidence.find(q);
    if (e != evidence.end()) {
      out[q] = e->second ? 1.0 : 0.0;
      continue;
    }
    std::vector<double> dist = eliminate(net, evidence, q);
    out[q] = dist.at(1);
  }
  return out;
}

std::vector<double> brute_force_posterior(const TraceNet& net, const Evidence& evidence) {
  check_evidence(net, evidence);
  const int n = static_cast<int>(net.nodes().size());
  int random = 0;
  for (const auto& node : net.nodes())
    random += std::any_of(node.cpt.begin(), node.cpt.end(), [](double p) { return p > 0.0 && p < 1.0; });
  if (random > 24) throw std::invalid_argument("brute-force posterior is limited to 24 non-deterministic nodes");
  std::vector<char> value(n, 0);
  std::vector<double> mass(n, 0.0);
  double total = 0.0;
  std::function<void(int, double)> visit = [&](int i, double w) {
    if (i == n) {
      total += w;
      for (int k = 0; k < n; ++k)
        if (value[k]) mass[k] += w;
      return;
    }
    const Node& node = net.node(i);
    size_t row = 0;
    for (size_t j = 0; j < node.parents.size(); ++j)
      row |= static_cast<size_t>(value[node.parents[j]]) << j;
    double p = node.cpt[row];
    auto e = evidence.find(i);
    for (int v = 1; v >= 0; --v) {
      if (e != evidence.end() && e->second != (v == 1)) continue;
      double pv = v ? p : 1.0 - p;
      if (pv == 0.0) continue;
      value[i] = static_cast<char>(v);
      visit(i + 1, w * pv);
    }
    value[i] = 0;
  };
  visit(0, 1.0);
  if (total <= 0.0) throw InconsistentEvidence("evidence has probability zero under the trace net");
  for (double& m : mass) m /= total;
  return mass;
}

std::vector<double> infer(const TraceNet& net, const Evidence& evidence, InferenceBackend backend) {
  return backend == InferenceBackend::kBruteForce ? brute_force_posterior(net, evidence)
                                                  : posterior(net, evidence);
}

BeliefState beliefs_at(const TraceNet& net, int t) {
  BeliefState b;
  for (const auto& [lit, id] : net.world_at(t)) b.set(lit, net.node(id).marginal);
  return b;
}

std::string dump(const TraceNet& net) {
  std::string out;
  char buf[64];
  for (const auto& n : net.nodes()) {
    out += n.id.name() + " |";
    for (size_t i = 0; i < n.parents.size(); ++i)
      out += (i ? ", " : " ") + net.node(n.parents[i]).id.name();
    out += " |";
    for (double p : n.cpt) {
      std::snprintf(buf, sizeof buf, " %.6g", p);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, " | %.6f\n", n.marginal);
    out += buf;
  }
  return out;
}

std::string to_dot(const TraceNet& net, const std::vector<double>* marginals) {
  auto esc = [](const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '"' || c == '\\') o += '\\';
      o += c;
    }
    return o;
  };
  std::string out = "digraph trace {\n  rankdir=LR;\n";
  char buf[32];
  for (size_t i = 0; i < net.nodes().size(); ++i) {
    const Node& n = net.node(static_cast<int>(i));
    double p = marginals ? (*marginals)[i] : n.marginal;
    std::snprintf(buf, sizeof buf, "%.3f", p);
    out += "  n" + std::to_string(i) + " [label=\"" + esc(n.id.name()) + "\\n" + buf + "\"";
    if (n.id.kind == NodeId::Kind::kActionVar) out += " shape=box";
    out += "];\n";
  }
  for (size_t i = 0; i < net.nodes().size(); ++i)
    for (int p : net.node(static_cast<int>(i)).parents)
      out += "  n" + std::to_string(p) + " -> n" + std::to_string(i) + ";\n";
  return out + "}\n";
}

}  // namespace retrace

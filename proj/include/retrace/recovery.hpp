#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "retrace/bayesnet.hpp"
#include "retrace/model.hpp"

namespace retrace {

// STRIPS-level world: the set of true literals.
using World = std::set<Literal>;

// Inclusion vector over history positions 1..d (stored 0-based).
struct PerforatedTrace {
  std::vector<bool> include;

  int length() const;
  std::vector<int> indices() const;  // 1-based positions of included actions
  bool operator==(const PerforatedTrace&) const = default;
};

// Tie-break among traces of equal length: the one that re-executes later
// actions wins, comparing inclusion vectors from the last position back.
bool preferred(const PerforatedTrace& a, const PerforatedTrace& b);

// history[0..d-1] = a^1..a^d where a^d is the action whose failure is being
// recovered. Positions t_f and d are always included.
struct RecoveryProblem {
  const RobotModel* model = nullptr;
  std::vector<GroundAction> history;
  int t_f = 1;
  World start;
};

// Replays actions on a World with every action variable true. Explicit and
// required implicit arguments keep their original binding; optional implicit
// ones are resolved against the simulated world.
class RecoverySimulator {
 public:
  explicit RecoverySimulator(const RobotModel& model) : model_(model) {}

  std::optional<GroundAction> reground(const GroundAction& original, const World& w) const;
  static bool satisfied(const std::vector<GroundLiteral>& conj, const World& w);
  static World apply(const GroundAction& g, const World& w);
  // World after executing `original` in `w`; nullopt if its precondition fails.
  std::optional<World> step(const GroundAction& original, const World& w) const;

 private:
  const RobotModel& model_;
};

// Minimal valid perforated trace by memoized backward induction over
// (position, simulated world). nullopt when none exists.
std::optional<PerforatedTrace> search_min_trace(const RecoveryProblem& problem);

// Same answer by enumerating every inclusion vector. d <= 21.
std::optional<PerforatedTrace> brute_force_trace(const RecoveryProblem& problem);

// Validity re-check through the belief machinery: certain beliefs, alpha = 0,
// forward_update and eval_predicate. Independent of RecoverySimulator.
bool check_trace(const RecoveryProblem& problem, const PerforatedTrace& trace);

// ML world at timestep t under posterior marginals.
World posterior_ml_world(const TraceNet& net, const std::vector<double>& post, int t);

}  // namespace retrace

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "limid/compile.hpp"
#include "limid/structure.hpp"

namespace limid {

enum class FlowReason { FullCollect, PartialCollect, Skipped };

const char* flow_reason_name(FlowReason r);

struct Flow {
  int seq = 0;
  int from = -1;
  int to = -1;
  FlowReason reason = FlowReason::FullCollect;
};

struct FlowLog {
  std::vector<Flow> flows;

  // Messages actually sent; skip records are bookkeeping, not flows.
  int sent_count() const;
  std::string to_text() const;  // one "seq from to reason" line per entry
};

// Mutable message-passing state over a compiled tree. The model mirror keeps
// the original LIMID in sync as policies are installed, so structural queries
// (parent sets for the skip rule) see converted decisions as chance nodes.
class Propagator {
 public:
  Propagator(JunctionTree tree, Limid model, bool allow_skips = false);

  const JunctionTree& tree() const { return tree_; }
  const Limid& model() const { return model_; }
  const FlowLog& log() const { return log_; }

  // Compute and store the message from clique `from` to its neighbor `to`:
  // the clique potential combined with all messages arriving at `from` on its
  // other edges, marginalized onto the separator. All those inputs must be
  // present already.
  const Potential& send_message(int from, int to);

  // Fill every mailbox slot pointing toward root (recursively, leaves first)
  // and return the root potential combined with all incoming messages. When
  // skips are allowed and `decision` is given, an empty slot whose separator
  // is contained in pa(decision) is recorded as skipped instead of sent.
  Potential collect(int root, NodeId decision = -1);

  // Move the root: empty both slots of every mailbox on the path, then
  // collect at the new root. Only the path (plus any messages missing after
  // earlier skips) is recomputed; everything else is reused.
  Potential partial_collect(int old_root, int new_root, NodeId decision = -1);

  // The four-step update for one decision at a root clique containing fa(d):
  // the caller passes the collected root potential; marginalize it onto
  // fa(d), contract, and pick the maximizing alternative per parent
  // configuration. Values within a small relative tolerance of the row
  // maximum count as tied and the lowest index wins (so all-zero rows give
  // alternative 0, and exact ties come out the same under every message
  // schedule despite rounding).
  Policy extract_policy(NodeId d, const Potential& root_potential) const;

  // Multiply the policy into the root clique's probability part and convert
  // the decision in the model mirror.
  void install_policy(const Policy& policy, int root);

  // True when the message toward `to` over this edge may be omitted while
  // optimizing `decision`: the separator is contained in pa(decision).
  bool message_skippable(int edge, NodeId decision) const;

  // Expected utility of the current (fully converted) state: collect at the
  // root with no skips, marginalize onto nothing. Checks that the probability
  // part sums to 1 within 1e-9.
  double expected_utility_at(int root);

 private:
  std::optional<Potential>& slot(int edge, int toward);
  void require_toward(int edge, int to, FlowReason reason);
  Potential collect_with(int root, NodeId decision, FlowReason reason);
  Potential combine_at(int clique, int excluding_edge) const;
  std::vector<int> path_edges(int from, int to) const;

  JunctionTree tree_;
  Limid model_;
  FlowLog log_;
  bool allow_skips_ = false;
};

struct SolveOptions {
  bool reduce = true;
  bool allow_skips = true;
  std::optional<EliminationOrder> hint;

  // Test hook, called after each decision's root potential is assembled.
  std::function<void(const Propagator&, NodeId, int, const Potential&)>
      on_decision_root;
};

struct SolveReport {
  Strategy strategy;
  double expected_utility = 0;
  SolutionOrdering ordering;
  ReductionTrace reduction;
  FlowLog flows;
  std::vector<std::pair<NodeId, int>> roots;  // (decision, root clique) per visit
  Limid solved_model;  // reduced model the strategy's policies are defined on
};

// Full pipeline: validate, take the no-forgetting closure if the input is an
// influence diagram, find a solution ordering (throws NotSolubleError if none
// exists), reduce to minimal form, compile, then visit the decisions in
// reverse order with collect / partial collect, extracting and installing the
// optimal policy at each visit. Returns the resulting global-maximum strategy
// and its expected utility.
SolveReport single_policy_updating(const Limid& model, const SolveOptions& opts = {});

// Expected utility of a complete given strategy, by converting all decisions
// and propagating once.
double expected_utility(const Limid& model, const Strategy& strategy);

}  // namespace limid

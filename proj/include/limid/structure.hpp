#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "limid/model.hpp"

namespace limid {

// Order in which the decisions can be solved exactly, first to last.
struct SolutionOrdering {
  std::vector<NodeId> order;

  bool operator==(const SolutionOrdering&) const = default;
};

struct RemovedArc {
  NodeId parent = -1;
  NodeId decision = -1;
  int visit = 0;  // 0-based position of the decision visit in the reverse sweep

  bool operator==(const RemovedArc&) const = default;
};

struct ReductionTrace {
  std::vector<RemovedArc> removed;
};

struct NotSolubleError : std::runtime_error {
  NotSolubleError() : std::runtime_error("model admits no exact solution ordering") {}
};

// Whether S blocks every undirected path between A and B in the directed
// graph (value nodes included). A, B, S must be pairwise disjoint; A and B
// must be nonempty.
bool d_separated(const Limid& model, std::span<const NodeId> a,
                 std::span<const NodeId> b, std::span<const NodeId> s);

// No-forgetting closure of an influence diagram: every decision gains the
// families of all earlier decisions as parents. Requires decision_order; the
// result is a plain LIMID (decision_order cleared). Throws ValidationError
// wrapped as invalid_argument if the closure would create a cycle.
Limid make_limid_version(const Limid& id);

struct RequisiteSplit {
  std::vector<NodeId> requisite;
  std::vector<NodeId> non_requisite;
};

// Partition pa(d): a parent n is non-requisite when every value-node
// descendant of d is separated from n by fa(d) \ {n}.
RequisiteSplit requisite_parents(const Limid& model, NodeId d);

// Visit decisions in reverse solution order; at each visit repeatedly drop
// all currently non-requisite parent arcs until none remain. The result is
// the unique minimal reduction and has the same optimal expected utility.
std::pair<Limid, ReductionTrace> reduce_minimal(const Limid& model,
                                                const SolutionOrdering& ordering);

// d is extremal when every value-node descendant of d is separated from the
// union of the other decisions' families by fa(d).
bool is_extremal(const Limid& model, NodeId d);

// Replace decision d by a chance node carrying the policy as its CPT.
Limid convert_to_chance(const Limid& model, NodeId d, const Policy& policy);

// Convert every decision, in any order, using the given strategy.
Limid convert_all(const Limid& model, const Strategy& strategy);

// Greedy construction: repeatedly pick an extremal decision (highest node id
// on ties), convert it to chance with the uniform policy, and prepend. Yields
// an ordering whose suffix decisions are always extremal, or nullopt if at
// some step no remaining decision is extremal.
std::optional<SolutionOrdering> find_solution_ordering(const Limid& model);

}  // namespace limid

#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "limid/table.hpp"

namespace limid {

enum class NodeKind { Chance, Decision, Value };

const char* kind_name(NodeKind k);

struct Node {
  std::string label;
  NodeKind kind = NodeKind::Chance;
  int card = 0;  // domain size; 0 for value nodes, which carry no state
  std::vector<std::string> states;  // optional state labels, size card if set

  bool operator==(const Node&) const = default;
};

// Policy for one decision: a stochastic table on X_d given X_pa(d).
// table.vars is sorted(pa(d)) followed by d, so d runs fastest and every
// parent configuration is a contiguous slice.
struct Policy {
  NodeId decision = -1;
  Table table;

  bool operator==(const Policy&) const = default;
};

// One policy per decision, kept sorted by decision id.
struct Strategy {
  std::vector<Policy> policies;

  const Policy* find(NodeId decision) const;
  void set(Policy p);

  bool operator==(const Strategy&) const = default;
};

// A LIMID: an acyclic graph of chance, decision and value nodes with CPTs on
// chance nodes and utility tables on value nodes. A nonempty decision_order
// marks the model as an influence diagram whose no-forgetting closure has not
// been taken yet.
//
// All operations on Limid treat it as an immutable value; transformations
// return new copies, so instances can be shared freely across threads.
struct Limid {
  std::vector<Node> nodes;
  std::vector<std::vector<NodeId>> parents;  // sorted ascending per node
  std::vector<Table> cpt;   // indexed by node; meaningful for chance nodes
  std::vector<Table> util;  // indexed by node; meaningful for value nodes
  std::vector<NodeId> decision_order;  // empty unless declared by the input

  int node_count() const { return static_cast<int>(nodes.size()); }
  NodeKind kind(NodeId n) const { return nodes[n].kind; }
  bool is_chance(NodeId n) const { return nodes[n].kind == NodeKind::Chance; }
  bool is_decision(NodeId n) const { return nodes[n].kind == NodeKind::Decision; }
  bool is_value(NodeId n) const { return nodes[n].kind == NodeKind::Value; }
  int card(NodeId n) const { return nodes[n].card; }
  const std::string& label(NodeId n) const { return nodes[n].label; }

  std::optional<NodeId> find_label(std::string_view label) const;
  std::vector<NodeId> decisions() const;
  std::vector<NodeId> chance_nodes() const;
  std::vector<NodeId> value_nodes() const;

  // Child lists derived from parents, sorted ascending per node.
  std::vector<std::vector<NodeId>> children() const;

  // Cards of the given variables in order.
  std::vector<int> cards_of(std::span<const NodeId> vars) const;

  bool operator==(const Limid&) const = default;
};

struct Violation {
  std::string code;    // stable machine-readable tag
  std::string detail;  // human-readable description
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(ValidationReport r);
  ValidationReport report;
};

// Structural and numeric checks: acyclicity, value nodes are leaves, table
// variable lists and sizes match the graph, CPT and policy slices are
// nonnegative and normalized, decision_order (if present) is a permutation of
// the decisions. Collects all violations instead of stopping at the first.
ValidationReport validate(const Limid& model);

// fa(n) = {n} union pa(n), sorted ascending.
std::vector<NodeId> family(const Limid& model, NodeId n);

// All nodes reachable from n by directed arcs, value nodes included, sorted.
std::vector<NodeId> descendants(const Limid& model, NodeId n);

// Sum of all utility tables at a full configuration. config is indexed by
// node id; entries for value nodes are ignored.
double total_utility(const Limid& model, std::span<const int> config);

// Policy assigning probability 1/|X_d| to every alternative.
Policy uniform_policy(const Limid& model, NodeId d);

// Degenerate policy choosing `alternative` for every parent configuration.
Policy constant_policy(const Limid& model, NodeId d, int alternative);

// Shape check used wherever a policy meets a model: the decision exists, the
// variable list is sorted(pa(d)) + [d], and slices are stochastic.
void check_policy(const Limid& model, const Policy& policy);

}  // namespace limid

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "limid/model.hpp"
#include "limid/potential.hpp"

namespace limid {

// Undirected graph over the non-value nodes, indexed by the model's node ids.
struct MoralGraph {
  int n = 0;
  std::vector<char> present;      // per node id; false for value nodes
  std::vector<std::vector<char>> adj;

  bool has_edge(NodeId a, NodeId b) const { return adj[a][b] != 0; }
  void add_edge(NodeId a, NodeId b);
  std::vector<std::pair<NodeId, NodeId>> edges() const;  // a < b, sorted
};

struct EliminationOrder {
  std::vector<NodeId> order;

  bool operator==(const EliminationOrder&) const = default;
};

struct TriangulationResult {
  MoralGraph chordal;  // input plus fill-in edges
  EliminationOrder order;
  std::vector<std::pair<NodeId, NodeId>> fill_edges;  // a < b, in fill order
};

struct Mailbox {
  std::optional<Potential> fwd;  // message a -> b
  std::optional<Potential> rev;  // message b -> a
};

struct JTEdge {
  int a = -1, b = -1;               // clique indices, a < b
  std::vector<NodeId> separator;    // sorted
  Mailbox box;
};

struct JunctionTree {
  std::vector<std::vector<NodeId>> cliques;  // sorted var lists
  std::vector<JTEdge> edges;
  std::vector<std::vector<int>> incident;    // clique index -> edge indices
  std::vector<Potential> clique_pot;         // set by initialize()
  std::vector<int> host;                     // node id -> clique holding its table, -1 if none
  EliminationOrder elim;
  std::vector<std::pair<NodeId, NodeId>> fill_edges;
  int max_clique_size = 0;
  double max_clique_weight = 0;

  int clique_count() const { return static_cast<int>(cliques.size()); }
  int other_end(int edge, int clique) const {
    return edges[edge].a == clique ? edges[edge].b : edges[edge].a;
  }
  // Lowest-index clique containing all of vars, or -1.
  int find_clique_containing(std::span<const NodeId> vars) const;
};

// Marry parents of every node (value and decision children included), drop
// value nodes and arc directions.
MoralGraph moralize(const Limid& model);

// Eliminate all present nodes. With a hint the order is taken as given (it
// must cover the graph exactly); otherwise greedy min-fill, breaking ties by
// smaller induced clique weight, then lower node id. Weights come from the
// model's domain sizes.
TriangulationResult triangulate(const MoralGraph& graph, const Limid& model,
                                const std::optional<EliminationOrder>& hint = {});

// Maximal elimination cliques joined by a maximum-weight spanning tree on
// separator sizes (Kruskal; ties by lexicographic clique index pair; zero
// weight edges allowed so forests become a single tree).
JunctionTree build_tree(const TriangulationResult& tri, const Limid& model);

// Attach vacuous potentials, then multiply each chance node's CPT and add
// each value node's utility into its host clique: the smallest-weight clique
// containing the node's family (parents, for value nodes), lowest index on
// ties. Fails if some family or decision family has no covering clique.
void initialize(JunctionTree& tree, const Limid& model);

// moralize + triangulate + build_tree + initialize.
JunctionTree compile(const Limid& model,
                     const std::optional<EliminationOrder>& hint = {});

}  // namespace limid

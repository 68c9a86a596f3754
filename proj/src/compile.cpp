#include "limid/compile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace limid {

void MoralGraph::add_edge(NodeId a, NodeId b) {
  if (a == b) return;
  adj[a][b] = adj[b][a] = 1;
}

std::vector<std::pair<NodeId, NodeId>> MoralGraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b)
      if (adj[a][b]) out.emplace_back(a, b);
  return out;
}

int JunctionTree::find_clique_containing(std::span<const NodeId> vars) const {
  for (int c = 0; c < clique_count(); ++c) {
    if (std::includes(cliques[c].begin(), cliques[c].end(), vars.begin(), vars.end()))
      return c;
  }
  return -1;
}

MoralGraph moralize(const Limid& m) {
  MoralGraph g;
  g.n = m.node_count();
  g.present.assign(g.n, 1);
  g.adj.assign(g.n, std::vector<char>(g.n, 0));
  for (NodeId v = 0; v < g.n; ++v)
    if (m.is_value(v)) g.present[v] = 0;

  for (NodeId v = 0; v < g.n; ++v) {
    const auto& pa = m.parents[v];
    for (std::size_t i = 0; i < pa.size(); ++i) {
      for (std::size_t j = i + 1; j < pa.size(); ++j) g.add_edge(pa[i], pa[j]);
      if (g.present[v]) g.add_edge(pa[i], v);
    }
  }
  return g;
}

namespace {

double clique_weight(const Limid& m, std::span<const NodeId> vars) {
  double w = 1;
  for (NodeId v : vars) w *= m.card(v);
  return w;
}

// Fill edges needed to eliminate v from the working graph.
int fill_count(const std::vector<std::vector<char>>& adj,
               const std::vector<NodeId>& nbrs) {
  int fills = 0;
  for (std::size_t i = 0; i < nbrs.size(); ++i)
    for (std::size_t j = i + 1; j < nbrs.size(); ++j)
      if (!adj[nbrs[i]][nbrs[j]]) ++fills;
  return fills;
}

std::vector<NodeId> live_neighbors(const MoralGraph& g,
                                   const std::vector<std::vector<char>>& adj,
                                   const std::vector<char>& eliminated, NodeId v) {
  std::vector<NodeId> out;
  for (NodeId u = 0; u < g.n; ++u)
    if (u != v && g.present[u] && !eliminated[u] && adj[v][u]) out.push_back(u);
  return out;
}

}  // namespace

TriangulationResult triangulate(const MoralGraph& g, const Limid& m,
                                const std::optional<EliminationOrder>& hint) {
  std::vector<NodeId> present_nodes;
  for (NodeId v = 0; v < g.n; ++v)
    if (g.present[v]) present_nodes.push_back(v);

  if (hint) {
    auto sorted = hint->order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != present_nodes)
      throw std::invalid_argument(
          "elimination order must cover the moral graph's nodes exactly");
  }

  TriangulationResult res;
  res.chordal = g;
  auto adj = g.adj;  // working adjacency, grows with fills
  std::vector<char> eliminated(g.n, 0);

  for (std::size_t step = 0; step < present_nodes.size(); ++step) {
    NodeId v;
    if (hint) {
      v = hint->order[step];
    } else {
      // Greedy min-fill; ties by induced clique weight, then node id.
      v = -1;
      int best_fill = 0;
      double best_weight = 0;
      for (NodeId cand : present_nodes) {
        if (eliminated[cand]) continue;
        auto nbrs = live_neighbors(g, adj, eliminated, cand);
        int fills = fill_count(adj, nbrs);
        nbrs.push_back(cand);
        double weight = clique_weight(m, nbrs);
        if (v < 0 || fills < best_fill ||
            (fills == best_fill && weight < best_weight)) {
          v = cand;
          best_fill = fills;
          best_weight = weight;
        }
      }
    }

    auto nbrs = live_neighbors(g, adj, eliminated, v);
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      for (std::size_t j = i + 1; j < nbrs.size(); ++j)
        if (!adj[nbrs[i]][nbrs[j]]) {
          adj[nbrs[i]][nbrs[j]] = adj[nbrs[j]][nbrs[i]] = 1;
          res.chordal.adj[nbrs[i]][nbrs[j]] = res.chordal.adj[nbrs[j]][nbrs[i]] = 1;
          res.fill_edges.emplace_back(std::min(nbrs[i], nbrs[j]),
                                      std::max(nbrs[i], nbrs[j]));
        }
    eliminated[v] = 1;
    res.order.order.push_back(v);
  }
  return res;
}

namespace {

struct UnionFind {
  std::vector<int> up;
  explicit UnionFind(int n) : up(n) { std::iota(up.begin(), up.end(), 0); }
  int find(int x) { return up[x] == x ? x : up[x] = find(up[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    up[a] = b;
    return true;
  }
};

}  // namespace

JunctionTree build_tree(const TriangulationResult& tri, const Limid& m) {
  const MoralGraph& g = tri.chordal;

  // Elimination cliques, in elimination order.
  std::vector<std::vector<NodeId>> cands;
  std::vector<char> eliminated(g.n, 0);
  for (NodeId v : tri.order.order) {
    auto clique = live_neighbors(g, g.adj, eliminated, v);
    for (std::size_t i = 0; i < clique.size(); ++i)
      for (std::size_t j = i + 1; j < clique.size(); ++j)
        if (!g.adj[clique[i]][clique[j]])
          throw std::invalid_argument("graph is not triangulated by the given order");
    clique.push_back(v);
    std::sort(clique.begin(), clique.end());
    eliminated[v] = 1;
    cands.push_back(std::move(clique));
  }

  JunctionTree jt;
  jt.elim = tri.order;
  jt.fill_edges = tri.fill_edges;

  // Keep only maximal cliques. A later elimination clique can only be
  // contained in an earlier one (its eliminated node is gone afterwards).
  for (std::size_t i = 0; i < cands.size(); ++i) {
    bool maximal = true;
    for (std::size_t j = 0; j < i && maximal; ++j)
      if (std::includes(cands[j].begin(), cands[j].end(), cands[i].begin(),
                        cands[i].end()))
        maximal = false;
    if (maximal) jt.cliques.push_back(cands[i]);
  }

  // Maximum-weight spanning tree over separator sizes.
  int k = jt.clique_count();
  struct Cand {
    int w, a, b;
  };
  std::vector<Cand> cand_edges;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      std::vector<NodeId> sep;
      std::set_intersection(jt.cliques[a].begin(), jt.cliques[a].end(),
                            jt.cliques[b].begin(), jt.cliques[b].end(),
                            std::back_inserter(sep));
      cand_edges.push_back({static_cast<int>(sep.size()), a, b});
    }
  std::stable_sort(cand_edges.begin(), cand_edges.end(),
                   [](const Cand& x, const Cand& y) {
                     if (x.w != y.w) return x.w > y.w;
                     if (x.a != y.a) return x.a < y.a;
                     return x.b < y.b;
                   });
  UnionFind uf(k);
  jt.incident.assign(k, {});
  for (const auto& e : cand_edges) {
    if (static_cast<int>(jt.edges.size()) == k - 1) break;
    if (!uf.unite(e.a, e.b)) continue;
    JTEdge edge;
    edge.a = e.a;
    edge.b = e.b;
    std::set_intersection(jt.cliques[e.a].begin(), jt.cliques[e.a].end(),
                          jt.cliques[e.b].begin(), jt.cliques[e.b].end(),
                          std::back_inserter(edge.separator));
    jt.incident[e.a].push_back(static_cast<int>(jt.edges.size()));
    jt.incident[e.b].push_back(static_cast<int>(jt.edges.size()));
    jt.edges.push_back(std::move(edge));
  }

  for (const auto& c : jt.cliques) {
    jt.max_clique_size = std::max(jt.max_clique_size, static_cast<int>(c.size()));
    jt.max_clique_weight = std::max(jt.max_clique_weight, clique_weight(m, c));
  }
  return jt;
}

void initialize(JunctionTree& jt, const Limid& m) {
  jt.clique_pot.clear();
  jt.clique_pot.reserve(jt.cliques.size());
  for (const auto& c : jt.cliques)
    jt.clique_pot.push_back(Potential::vacuous(c, m.cards_of(c)));
  for (auto& e : jt.edges) e.box = Mailbox{};

  // Host selection: smallest clique weight containing the needed variables,
  // lowest clique index on ties.
  auto pick_host = [&](std::span<const NodeId> vars) {
    int best = -1;
    double best_w = 0;
    for (int c = 0; c < jt.clique_count(); ++c) {
      if (!std::includes(jt.cliques[c].begin(), jt.cliques[c].end(), vars.begin(),
                         vars.end()))
        continue;
      double w = clique_weight(m, jt.cliques[c]);
      if (best < 0 || w < best_w) {
        best = c;
        best_w = w;
      }
    }
    return best;
  };

  jt.host.assign(m.node_count(), -1);
  for (NodeId v = 0; v < m.node_count(); ++v) {
    if (m.is_chance(v)) {
      auto fa = family(m, v);
      int c = pick_host(fa);
      if (c < 0)
        throw std::invalid_argument("no clique covers the family of " + m.label(v));
      jt.host[v] = c;
      multiply_in(jt.clique_pot[c], m.cpt[v]);
    } else if (m.is_value(v)) {
      // A tree with no cliques holds only parentless value constants; those
      // stay unhosted and are summed directly by the solver.
      if (jt.clique_count() == 0) continue;
      int c = pick_host(m.parents[v]);
      if (c < 0)
        throw std::invalid_argument("no clique covers the parents of " + m.label(v));
      jt.host[v] = c;
      add_in(jt.clique_pot[c], m.util[v]);
    } else {
      // Decisions carry no table, but their family must still be covered so a
      // policy can later be extracted and installed at a single clique.
      auto fa = family(m, v);
      int c = pick_host(fa);
      if (c < 0)
        throw std::invalid_argument("no clique covers the family of decision " + m.label(v));
      jt.host[v] = c;
    }
  }
}

JunctionTree compile(const Limid& m, const std::optional<EliminationOrder>& hint) {
  auto tri = triangulate(moralize(m), m, hint);
  auto jt = build_tree(tri, m);
  initialize(jt, m);
  return jt;
}

}  // namespace limid

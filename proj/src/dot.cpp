#include "limid/dot.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace limid {

namespace {

const char* shape_of(NodeKind k) {
  switch (k) {
    case NodeKind::Chance: return "ellipse";
    case NodeKind::Decision: return "box";
    case NodeKind::Value: return "diamond";
  }
  return "ellipse";
}

void emit_nodes(std::ostringstream& os, const Limid& m, bool with_values) {
  for (NodeId n = 0; n < m.node_count(); ++n) {
    if (!with_values && m.is_value(n)) continue;
    os << "  \"" << m.label(n) << "\" [shape=" << shape_of(m.kind(n)) << "];\n";
  }
}

std::string set_label(const Limid& m, std::span<const NodeId> vars) {
  std::string s = "{";
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) s += ",";
    s += m.label(vars[i]);
  }
  return s + "}";
}

}  // namespace

std::string dot_model(const Limid& m) {
  std::ostringstream os;
  os << "digraph model {\n";
  emit_nodes(os, m, true);
  for (NodeId n = 0; n < m.node_count(); ++n)
    for (NodeId p : m.parents[n])
      os << "  \"" << m.label(p) << "\" -> \"" << m.label(n) << "\";\n";
  os << "}\n";
  return os.str();
}

std::string dot_moral(const MoralGraph& g, const Limid& m) {
  std::ostringstream os;
  os << "graph moral {\n";
  emit_nodes(os, m, false);
  for (auto [a, b] : g.edges())
    os << "  \"" << m.label(a) << "\" -- \"" << m.label(b) << "\";\n";
  os << "}\n";
  return os.str();
}

std::string dot_triangulated(const TriangulationResult& tri, const Limid& m) {
  std::set<std::pair<NodeId, NodeId>> fills(tri.fill_edges.begin(), tri.fill_edges.end());
  std::ostringstream os;
  os << "graph triangulated {\n";
  emit_nodes(os, m, false);
  for (auto [a, b] : tri.chordal.edges()) {
    os << "  \"" << m.label(a) << "\" -- \"" << m.label(b) << "\"";
    if (fills.count({a, b})) os << " [style=dashed]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

std::string dot_tree(const JunctionTree& jt, const Limid& m) {
  std::ostringstream os;
  os << "graph tree {\n";
  for (int c = 0; c < jt.clique_count(); ++c)
    os << "  C" << c << " [shape=box, label=\"" << set_label(m, jt.cliques[c])
       << "\"];\n";
  auto edges = jt.edges;
  std::sort(edges.begin(), edges.end(),
            [](const JTEdge& x, const JTEdge& y) {
              return x.a != y.a ? x.a < y.a : x.b < y.b;
            });
  for (const auto& e : edges)
    os << "  C" << e.a << " -- C" << e.b << " [label=\""
       << set_label(m, e.separator) << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace limid

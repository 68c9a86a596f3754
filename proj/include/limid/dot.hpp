#pragma once

#include <string>

#include "limid/compile.hpp"
#include "limid/model.hpp"

namespace limid {

// Graphviz renderings of the pipeline stages. Decisions are boxes, chance
// nodes ellipses, value nodes diamonds; fill-in edges are dashed; junction
// tree nodes are boxes labeled with their clique, edges with the separator.
// Output is deterministic: nodes in id order, edges sorted.
std::string dot_model(const Limid& model);
std::string dot_moral(const MoralGraph& graph, const Limid& model);
std::string dot_triangulated(const TriangulationResult& tri, const Limid& model);
std::string dot_tree(const JunctionTree& tree, const Limid& model);

}  // namespace limid

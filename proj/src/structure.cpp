#include "limid/structure.hpp"

#include <algorithm>
#include <set>

namespace limid {

namespace {

std::vector<char> mask_of(int n, std::span<const NodeId> ids) {
  std::vector<char> m(n, 0);
  for (NodeId v : ids) m[v] = 1;
  return m;
}

}  // namespace

// Reachability formulation: a path is active at a node when it leaves through
// an allowed direction. Walking away from A, a non-collider passes unless it
// is in S, and a collider passes only if some descendant (or itself) is in S.
// Tracking (node, direction entered) pairs visits each state once.
bool d_separated(const Limid& m, std::span<const NodeId> a,
                 std::span<const NodeId> b, std::span<const NodeId> s) {
  int n = m.node_count();
  auto in_a = mask_of(n, a);
  auto in_b = mask_of(n, b);
  auto in_s = mask_of(n, s);
  for (NodeId v = 0; v < n; ++v)
    if (in_a[v] + in_b[v] + in_s[v] > 1)
      throw std::invalid_argument("d_separated: argument sets overlap");
  if (a.empty() || b.empty())
    throw std::invalid_argument("d_separated: A and B must be nonempty");

  auto ch = m.children();

  // Nodes with a descendant (or themselves) in S open colliders.
  std::vector<char> anc_s(n, 0);
  {
    std::vector<NodeId> stack(s.begin(), s.end());
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      if (anc_s[v]) continue;
      anc_s[v] = 1;
      for (NodeId p : m.parents[v]) stack.push_back(p);
    }
  }

  // State: node * 2 + dir, dir 0 = entered from a child (moving up),
  // dir 1 = entered from a parent (moving down).
  std::vector<char> seen(static_cast<std::size_t>(n) * 2, 0);
  std::vector<std::pair<NodeId, int>> stack;
  for (NodeId v : a) {
    stack.emplace_back(v, 0);
    stack.emplace_back(v, 1);
  }
  while (!stack.empty()) {
    auto [v, dir] = stack.back();
    stack.pop_back();
    auto& mark = seen[static_cast<std::size_t>(v) * 2 + dir];
    if (mark) continue;
    mark = 1;
    if (in_b[v]) return false;

    if (dir == 0) {
      // Entered moving up: may continue to parents and to children unless
      // blocked by membership in S.
      if (!in_s[v]) {
        for (NodeId p : m.parents[v]) stack.emplace_back(p, 0);
        for (NodeId c : ch[v]) stack.emplace_back(c, 1);
      }
    } else {
      // Entered moving down: v is a collider toward its parents, and a chain
      // node toward its children.
      if (anc_s[v])
        for (NodeId p : m.parents[v]) stack.emplace_back(p, 0);
      if (!in_s[v])
        for (NodeId c : ch[v]) stack.emplace_back(c, 1);
    }
  }
  return true;
}

Limid make_limid_version(const Limid& id) {
  if (id.decision_order.empty())
    throw std::invalid_argument("make_limid_version: model declares no decision order");

  Limid out = id;
  std::set<NodeId> gained;  // families of all earlier decisions
  for (NodeId d : id.decision_order) {
    for (NodeId p : gained)
      if (p != d) {
        auto& pa = out.parents[d];
        auto it = std::lower_bound(pa.begin(), pa.end(), p);
        if (it == pa.end() || *it != p) pa.insert(it, p);
      }
    for (NodeId p : out.parents[d]) gained.insert(p);
    gained.insert(d);
  }
  out.decision_order.clear();

  // The closure only adds arcs into decisions; a cycle can appear only if
  // some earlier family member was already downstream of a later decision.
  ValidationReport rep = validate(out);
  for (const auto& v : rep.violations)
    if (v.code == "cyclic")
      throw std::invalid_argument("make_limid_version: closure would create a cycle");
  return out;
}

namespace {

std::vector<NodeId> value_descendants(const Limid& m, NodeId d) {
  std::vector<NodeId> out;
  for (NodeId v : descendants(m, d))
    if (m.is_value(v)) out.push_back(v);
  return out;
}

}  // namespace

RequisiteSplit requisite_parents(const Limid& m, NodeId d) {
  if (!m.is_decision(d))
    throw std::invalid_argument("requisite_parents: not a decision node");
  RequisiteSplit split;
  auto targets = value_descendants(m, d);
  for (NodeId p : m.parents[d]) {
    std::vector<NodeId> given = family(m, d);
    given.erase(std::find(given.begin(), given.end(), p));
    bool needed = false;
    for (NodeId u : targets) {
      if (!d_separated(m, std::span(&u, 1), std::span(&p, 1), given)) {
        needed = true;
        break;
      }
    }
    (needed ? split.requisite : split.non_requisite).push_back(p);
  }
  return split;
}

std::pair<Limid, ReductionTrace> reduce_minimal(const Limid& m,
                                                const SolutionOrdering& ordering) {
  Limid out = m;
  ReductionTrace trace;
  int visit = 0;
  for (auto it = ordering.order.rbegin(); it != ordering.order.rend(); ++it, ++visit) {
    NodeId d = *it;
    for (;;) {
      auto split = requisite_parents(out, d);
      if (split.non_requisite.empty()) break;
      for (NodeId p : split.non_requisite) {
        auto& pa = out.parents[d];
        pa.erase(std::find(pa.begin(), pa.end(), p));
        trace.removed.push_back({p, d, visit});
      }
    }
  }
  return {std::move(out), std::move(trace)};
}

bool is_extremal(const Limid& m, NodeId d) {
  if (!m.is_decision(d))
    throw std::invalid_argument("is_extremal: not a decision node");
  std::vector<NodeId> fa_d = family(m, d);
  std::set<NodeId> others;
  for (NodeId d2 : m.decisions())
    if (d2 != d)
      for (NodeId v : family(m, d2)) others.insert(v);
  for (NodeId v : fa_d) others.erase(v);
  if (others.empty()) return true;

  std::vector<NodeId> b(others.begin(), others.end());
  for (NodeId u : value_descendants(m, d))
    if (!d_separated(m, std::span(&u, 1), b, fa_d)) return false;
  return true;
}

Limid convert_to_chance(const Limid& m, NodeId d, const Policy& policy) {
  if (policy.decision != d)
    throw std::invalid_argument("convert_to_chance: policy names a different node");
  check_policy(m, policy);
  Limid out = m;
  out.nodes[d].kind = NodeKind::Chance;
  out.cpt[d] = policy.table;
  auto it = std::find(out.decision_order.begin(), out.decision_order.end(), d);
  if (it != out.decision_order.end()) out.decision_order.erase(it);
  return out;
}

Limid convert_all(const Limid& m, const Strategy& strategy) {
  Limid out = m;
  for (NodeId d : m.decisions()) {
    const Policy* p = strategy.find(d);
    if (!p)
      throw std::invalid_argument("strategy is missing a policy for " + m.label(d));
    out = convert_to_chance(out, d, *p);
  }
  return out;
}

std::optional<SolutionOrdering> find_solution_ordering(const Limid& m) {
  Limid work = m;
  std::vector<NodeId> remaining = m.decisions();
  std::vector<NodeId> reversed;
  while (!remaining.empty()) {
    NodeId pick = -1;
    for (auto it = remaining.rbegin(); it != remaining.rend(); ++it)  // highest id first
      if (is_extremal(work, *it)) {
        pick = *it;
        break;
      }
    if (pick < 0) return std::nullopt;
    work = convert_to_chance(work, pick, uniform_policy(work, pick));
    reversed.push_back(pick);
    remaining.erase(std::find(remaining.begin(), remaining.end(), pick));
  }
  SolutionOrdering out;
  out.order.assign(reversed.rbegin(), reversed.rend());
  return out;
}

}  // namespace limid

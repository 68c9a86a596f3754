#include "limid/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace limid {

namespace {

constexpr double kNormTol = 1e-9;

std::string join_labels(const Limid& m, std::span<const NodeId> ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ",";
    out += m.nodes[ids[i]].label;
  }
  return out;
}

}  // namespace

const char* kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Chance: return "chance";
    case NodeKind::Decision: return "decision";
    case NodeKind::Value: return "value";
  }
  return "?";
}

const Policy* Strategy::find(NodeId decision) const {
  for (const auto& p : policies)
    if (p.decision == decision) return &p;
  return nullptr;
}

void Strategy::set(Policy p) {
  for (auto& q : policies) {
    if (q.decision == p.decision) {
      q = std::move(p);
      return;
    }
  }
  policies.push_back(std::move(p));
  std::sort(policies.begin(), policies.end(),
            [](const Policy& a, const Policy& b) { return a.decision < b.decision; });
}

std::optional<NodeId> Limid::find_label(std::string_view label) const {
  for (NodeId n = 0; n < node_count(); ++n)
    if (nodes[n].label == label) return n;
  return std::nullopt;
}

std::vector<NodeId> Limid::decisions() const {
  std::vector<NodeId> out;
  for (NodeId n = 0; n < node_count(); ++n)
    if (is_decision(n)) out.push_back(n);
  return out;
}

std::vector<NodeId> Limid::chance_nodes() const {
  std::vector<NodeId> out;
  for (NodeId n = 0; n < node_count(); ++n)
    if (is_chance(n)) out.push_back(n);
  return out;
}

std::vector<NodeId> Limid::value_nodes() const {
  std::vector<NodeId> out;
  for (NodeId n = 0; n < node_count(); ++n)
    if (is_value(n)) out.push_back(n);
  return out;
}

std::vector<std::vector<NodeId>> Limid::children() const {
  std::vector<std::vector<NodeId>> ch(nodes.size());
  for (NodeId n = 0; n < node_count(); ++n)
    for (NodeId p : parents[n]) ch[p].push_back(n);
  return ch;  // ascending because n ascends
}

std::vector<int> Limid::cards_of(std::span<const NodeId> vars) const {
  std::vector<int> out;
  out.reserve(vars.size());
  for (NodeId v : vars) out.push_back(card(v));
  return out;
}

ValidationError::ValidationError(ValidationReport r)
    : std::runtime_error("model validation failed:\n" + r.to_string()),
      report(std::move(r)) {}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) os << v.code << ": " << v.detail << "\n";
  return os.str();
}

namespace {

// Checks one conditional table: vars must equal sorted(parents) (+ self for
// CPTs), cards must match the model, entries nonnegative, and every leading
// configuration's slice must sum to 1.
void check_cond_table(const Limid& m, NodeId n, const Table& t, bool with_self,
                      const char* what, std::vector<Violation>& out) {
  std::vector<NodeId> want = m.parents[n];
  if (with_self) want.push_back(n);
  if (t.vars != want) {
    out.push_back({std::string(what) + "-vars",
                   std::string(what) + " of " + m.label(n) +
                       " is over {" + join_labels(m, t.vars) +
                       "}, expected {" + join_labels(m, want) + "}"});
    return;
  }
  if (t.cards != m.cards_of(t.vars)) {
    out.push_back({std::string(what) + "-cards",
                   std::string(what) + " of " + m.label(n) + " has wrong domain sizes"});
    return;
  }
  if (t.values.size() != cell_count(t.cards)) {
    out.push_back({std::string(what) + "-size",
                   std::string(what) + " of " + m.label(n) + " has " +
                       std::to_string(t.values.size()) + " values, expected " +
                       std::to_string(cell_count(t.cards))});
    return;
  }
  for (double v : t.values) {
    if (!std::isfinite(v) || (with_self && v < 0.0)) {
      out.push_back({std::string(what) + "-entry",
                     std::string(what) + " of " + m.label(n) + " has a negative or non-finite entry"});
      break;
    }
  }
  if (with_self) {
    std::size_t self_card = static_cast<std::size_t>(m.card(n));
    if (self_card == 0) return;
    std::size_t slices = t.values.size() / self_card;
    for (std::size_t s = 0; s < slices; ++s) {
      double sum = 0;
      for (std::size_t i = 0; i < self_card; ++i) sum += t.values[s * self_card + i];
      if (std::abs(sum - 1.0) > kNormTol) {
        out.push_back({std::string(what) + "-unnormalized",
                       std::string(what) + " of " + m.label(n) + " slice " +
                           std::to_string(s) + " sums to " + std::to_string(sum)});
        break;
      }
    }
  }
}

}  // namespace

ValidationReport validate(const Limid& m) {
  ValidationReport rep;
  auto& out = rep.violations;
  int n = m.node_count();

  if (m.parents.size() != m.nodes.size() || m.cpt.size() != m.nodes.size() ||
      m.util.size() != m.nodes.size()) {
    out.push_back({"shape", "parents/cpt/util arrays must have one entry per node"});
    return rep;
  }

  std::set<std::string> seen;
  for (NodeId i = 0; i < n; ++i) {
    if (m.nodes[i].label.empty())
      out.push_back({"label-empty", "node " + std::to_string(i) + " has an empty label"});
    else if (!seen.insert(m.nodes[i].label).second)
      out.push_back({"label-duplicate", "label " + m.nodes[i].label + " used twice"});
    if (m.is_value(i)) {
      if (m.nodes[i].card != 0)
        out.push_back({"value-card", "value node " + m.label(i) + " must have domain size 0"});
    } else if (m.nodes[i].card < 1) {
      out.push_back({"card", "node " + m.label(i) + " must have domain size >= 1"});
    }
    if (!m.nodes[i].states.empty() &&
        m.nodes[i].states.size() != static_cast<std::size_t>(m.nodes[i].card))
      out.push_back({"state-labels", "node " + m.label(i) + " has wrong number of state labels"});
  }

  for (NodeId i = 0; i < n; ++i) {
    NodeId prev = -1;
    for (NodeId p : m.parents[i]) {
      if (p < 0 || p >= n) {
        out.push_back({"parent-range", "node " + m.label(i) + " has an out-of-range parent"});
        return rep;
      }
      if (p <= prev)
        out.push_back({"parent-order", "parents of " + m.label(i) + " not sorted and distinct"});
      prev = p;
      if (p == i) out.push_back({"self-loop", m.label(i) + " is its own parent"});
      if (m.is_value(p))
        out.push_back({"value-node-has-children",
                       "value node " + m.label(p) + " is a parent of " + m.label(i)});
    }
  }

  // Acyclicity by Kahn's algorithm.
  {
    std::vector<int> indeg(n, 0);
    for (NodeId i = 0; i < n; ++i) indeg[i] = static_cast<int>(m.parents[i].size());
    auto ch = m.children();
    std::vector<NodeId> queue;
    for (NodeId i = 0; i < n; ++i)
      if (indeg[i] == 0) queue.push_back(i);
    int seen_nodes = 0;
    while (!queue.empty()) {
      NodeId v = queue.back();
      queue.pop_back();
      ++seen_nodes;
      for (NodeId c : ch[v])
        if (--indeg[c] == 0) queue.push_back(c);
    }
    if (seen_nodes != n) out.push_back({"cyclic", "the graph has a directed cycle"});
  }

  for (NodeId i = 0; i < n; ++i) {
    bool has_cpt = !m.cpt[i].vars.empty() || !m.cpt[i].values.empty();
    bool has_util = !m.util[i].vars.empty() || !m.util[i].values.empty();
    switch (m.kind(i)) {
      case NodeKind::Chance:
        if (!has_cpt)
          out.push_back({"cpt-missing", "chance node " + m.label(i) + " has no table"});
        else
          check_cond_table(m, i, m.cpt[i], true, "cpt", out);
        if (has_util)
          out.push_back({"table-kind", "chance node " + m.label(i) + " has a utility table"});
        break;
      case NodeKind::Decision:
        if (has_cpt || has_util)
          out.push_back({"table-kind", "decision node " + m.label(i) + " must carry no table"});
        break;
      case NodeKind::Value:
        check_cond_table(m, i, m.util[i], false, "utility", out);
        if (has_cpt)
          out.push_back({"table-kind", "value node " + m.label(i) + " has a cpt"});
        break;
    }
  }

  if (!m.decision_order.empty()) {
    auto want = m.decisions();
    auto got = m.decision_order;
    std::sort(got.begin(), got.end());
    if (got != want)
      out.push_back({"decision-order",
                     "decision_order is not a permutation of the decision nodes"});
  }

  return rep;
}

std::vector<NodeId> family(const Limid& m, NodeId n) {
  std::vector<NodeId> fa = m.parents[n];
  fa.insert(std::lower_bound(fa.begin(), fa.end(), n), n);
  return fa;
}

std::vector<NodeId> descendants(const Limid& m, NodeId n) {
  auto ch = m.children();
  std::vector<char> hit(m.nodes.size(), 0);
  std::vector<NodeId> stack = ch[n];
  std::vector<NodeId> out;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    if (hit[v]) continue;
    hit[v] = 1;
    out.push_back(v);
    for (NodeId c : ch[v]) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double total_utility(const Limid& m, std::span<const int> config) {
  double sum = 0;
  for (NodeId u = 0; u < m.node_count(); ++u) {
    if (!m.is_value(u)) continue;
    const Table& t = m.util[u];
    std::vector<int> digits(t.vars.size());
    for (std::size_t i = 0; i < t.vars.size(); ++i) digits[i] = config[t.vars[i]];
    sum += t.values[t.index_of(digits)];
  }
  return sum;
}

Policy uniform_policy(const Limid& m, NodeId d) {
  Policy p;
  p.decision = d;
  p.table.vars = m.parents[d];
  p.table.vars.push_back(d);
  p.table.cards = m.cards_of(p.table.vars);
  p.table.values.assign(cell_count(p.table.cards), 1.0 / m.card(d));
  return p;
}

Policy constant_policy(const Limid& m, NodeId d, int alternative) {
  Policy p;
  p.decision = d;
  p.table.vars = m.parents[d];
  p.table.vars.push_back(d);
  p.table.cards = m.cards_of(p.table.vars);
  p.table.values.assign(cell_count(p.table.cards), 0.0);
  std::size_t self = static_cast<std::size_t>(m.card(d));
  for (std::size_t s = 0; s * self < p.table.values.size(); ++s)
    p.table.values[s * self + static_cast<std::size_t>(alternative)] = 1.0;
  return p;
}

void check_policy(const Limid& m, const Policy& policy) {
  NodeId d = policy.decision;
  if (d < 0 || d >= m.node_count() || !m.is_decision(d))
    throw std::invalid_argument("policy does not name a decision node");
  std::vector<NodeId> want = m.parents[d];
  want.push_back(d);
  if (policy.table.vars != want)
    throw std::invalid_argument("policy variables do not match sorted(pa(d)) + [d] for " +
                                m.label(d));
  if (policy.table.cards != m.cards_of(policy.table.vars) ||
      policy.table.values.size() != cell_count(policy.table.cards))
    throw std::invalid_argument("policy table shape mismatch for " + m.label(d));
  std::size_t self = static_cast<std::size_t>(m.card(d));
  for (std::size_t s = 0; s * self < policy.table.values.size(); ++s) {
    double sum = 0;
    for (std::size_t i = 0; i < self; ++i) {
      double v = policy.table.values[s * self + i];
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("policy for " + m.label(d) + " has a negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kNormTol)
      throw std::invalid_argument("policy for " + m.label(d) + " is not stochastic");
  }
}

}  // namespace limid

#include "limid/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace limid {

const char* flow_reason_name(FlowReason r) {
  switch (r) {
    case FlowReason::FullCollect: return "full-collect";
    case FlowReason::PartialCollect: return "partial-collect";
    case FlowReason::Skipped: return "skipped";
  }
  return "?";
}

int FlowLog::sent_count() const {
  int n = 0;
  for (const auto& f : flows)
    if (f.reason != FlowReason::Skipped) ++n;
  return n;
}

std::string FlowLog::to_text() const {
  std::ostringstream os;
  for (const auto& f : flows)
    os << f.seq << " " << f.from << " " << f.to << " " << flow_reason_name(f.reason)
       << "\n";
  return os.str();
}

Propagator::Propagator(JunctionTree tree, Limid model, bool allow_skips)
    : tree_(std::move(tree)), model_(std::move(model)), allow_skips_(allow_skips) {}

std::optional<Potential>& Propagator::slot(int edge, int toward) {
  auto& e = tree_.edges[edge];
  return toward == e.b ? e.box.fwd : e.box.rev;
}

Potential Propagator::combine_at(int clique, int excluding_edge) const {
  Potential acc = tree_.clique_pot[clique];
  for (int e : tree_.incident[clique]) {
    if (e == excluding_edge) continue;
    const auto& edge = tree_.edges[e];
    const auto& s = clique == edge.b ? edge.box.fwd : edge.box.rev;
    if (s) acc = combine(acc, *s);
  }
  return acc;
}

const Potential& Propagator::send_message(int from, int to) {
  int e = -1;
  for (int cand : tree_.incident[from])
    if (tree_.other_end(cand, from) == to) e = cand;
  if (e < 0) throw std::invalid_argument("send_message: cliques are not adjacent");

  // The message needs every other incoming slot of `from` to be present.
  for (int e2 : tree_.incident[from]) {
    if (e2 == e) continue;
    const auto& edge2 = tree_.edges[e2];
    const auto& s = from == edge2.b ? edge2.box.fwd : edge2.box.rev;
    if (!s)
      throw std::logic_error("send_message: missing an incoming message at clique " +
                             std::to_string(from));
  }

  Potential msg = marginalize(combine_at(from, e), tree_.edges[e].separator);
  auto& dst = slot(e, to);
  dst = std::move(msg);
  return *dst;
}

void Propagator::require_toward(int edge, int to, FlowReason reason) {
  if (slot(edge, to)) return;
  int from = tree_.other_end(edge, to);
  for (int e2 : tree_.incident[from])
    if (e2 != edge) require_toward(e2, from, reason);
  send_message(from, to);
  log_.flows.push_back({static_cast<int>(log_.flows.size()), from, to, reason});
}

bool Propagator::message_skippable(int edge, NodeId decision) const {
  if (decision < 0) return false;
  const auto& sep = tree_.edges[edge].separator;
  const auto& pa = model_.parents[decision];
  return std::includes(pa.begin(), pa.end(), sep.begin(), sep.end());
}

Potential Propagator::collect_with(int root, NodeId decision, FlowReason reason) {
  for (int e : tree_.incident[root]) {
    if (slot(e, root)) continue;  // an existing message is always reusable
    if (allow_skips_ && decision >= 0 && message_skippable(e, decision)) {
      log_.flows.push_back({static_cast<int>(log_.flows.size()),
                            tree_.other_end(e, root), root, FlowReason::Skipped});
      continue;
    }
    require_toward(e, root, reason);
  }
  return combine_at(root, -1);
}

Potential Propagator::collect(int root, NodeId decision) {
  return collect_with(root, decision, FlowReason::FullCollect);
}

std::vector<int> Propagator::path_edges(int from, int to) const {
  if (from == to) return {};
  std::vector<int> via_edge(tree_.clique_count(), -1);
  std::vector<char> seen(tree_.clique_count(), 0);
  std::deque<int> queue{from};
  seen[from] = 1;
  while (!queue.empty()) {
    int c = queue.front();
    queue.pop_front();
    if (c == to) break;
    for (int e : tree_.incident[c]) {
      int nxt = tree_.other_end(e, c);
      if (seen[nxt]) continue;
      seen[nxt] = 1;
      via_edge[nxt] = e;
      queue.push_back(nxt);
    }
  }
  if (!seen[to]) throw std::logic_error("path_edges: tree is disconnected");
  std::vector<int> path;
  for (int c = to; c != from;) {
    int e = via_edge[c];
    path.push_back(e);
    c = tree_.other_end(e, c);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

Potential Propagator::partial_collect(int old_root, int new_root, NodeId decision) {
  for (int e : path_edges(old_root, new_root)) tree_.edges[e].box = Mailbox{};
  // Refill on demand: only the path toward the new root plus any messages a
  // previous phase skipped are actually recomputed.
  return collect_with(new_root, decision, FlowReason::PartialCollect);
}

Policy Propagator::extract_policy(NodeId d, const Potential& root_potential) const {
  auto fa = family(model_, d);
  Potential marg = marginalize(root_potential, fa);
  Table ct = contract(marg);

  Policy p;
  p.decision = d;
  p.table.vars = model_.parents[d];
  p.table.vars.push_back(d);
  p.table.cards = model_.cards_of(p.table.vars);
  p.table.values.assign(cell_count(p.table.cards), 0.0);

  auto map = subindex_map(p.table.vars, p.table.cards, ct.vars, ct.cards);
  std::size_t self = static_cast<std::size_t>(model_.card(d));
  for (std::size_t base = 0; base < p.table.values.size(); base += self) {
    double best_v = ct.values[map[base]];
    for (std::size_t i = 1; i < self; ++i)
      best_v = std::max(best_v, ct.values[map[base + i]]);
    // Alternatives within rounding noise of the maximum count as tied and the
    // lowest index wins, so any message schedule resolves ties the same way.
    double eps = 1e-12 * (1.0 + std::abs(best_v));
    std::size_t best = 0;
    while (ct.values[map[base + best]] < best_v - eps) ++best;
    p.table.values[base + best] = 1.0;
  }
  return p;
}

void Propagator::install_policy(const Policy& policy, int root) {
  // The policy's variables are sorted parents with the decision appended, so
  // check membership one by one rather than as a sorted range.
  const auto& cl = tree_.cliques[root];
  for (NodeId v : policy.table.vars)
    if (!std::binary_search(cl.begin(), cl.end(), v))
      throw std::invalid_argument("install_policy: root does not cover the policy domain");
  multiply_in(tree_.clique_pot[root], policy.table);
  model_ = convert_to_chance(model_, policy.decision, policy);
}

double Propagator::expected_utility_at(int root) {
  for (int e : tree_.incident[root]) require_toward(e, root, FlowReason::PartialCollect);
  Potential all = combine_at(root, -1);
  Potential scalar = marginalize(all, std::span<const NodeId>{});
  if (std::abs(scalar.prob[0] - 1.0) > 1e-9)
    throw std::logic_error("expected_utility_at: probability mass is " +
                           std::to_string(scalar.prob[0]) + ", expected 1");
  return scalar.util[0];
}

namespace {

// A tree with no cliques means every node is a parentless value node; the
// expected utility degenerates to the sum of their constants.
double constant_utility_sum(const Limid& m) {
  double sum = 0;
  for (NodeId u : m.value_nodes()) sum += m.util[u].values.at(0);
  return sum;
}

// Root for a decision: a clique containing fa(d), nearest to the previous
// root (lowest clique index on ties; previous root -1 means lowest index).
int choose_root(const JunctionTree& jt, const std::vector<NodeId>& fa, int prev) {
  std::vector<int> dist(jt.clique_count(), 0);
  if (prev >= 0) {
    std::vector<char> seen(jt.clique_count(), 0);
    std::deque<int> queue{prev};
    seen[prev] = 1;
    while (!queue.empty()) {
      int c = queue.front();
      queue.pop_front();
      for (int e : jt.incident[c]) {
        int nxt = jt.other_end(e, c);
        if (seen[nxt]) continue;
        seen[nxt] = 1;
        dist[nxt] = dist[c] + 1;
        queue.push_back(nxt);
      }
    }
  }
  int best = -1;
  for (int c = 0; c < jt.clique_count(); ++c) {
    if (!std::includes(jt.cliques[c].begin(), jt.cliques[c].end(), fa.begin(), fa.end()))
      continue;
    if (best < 0 || dist[c] < dist[best]) best = c;
  }
  return best;
}

}  // namespace

SolveReport single_policy_updating(const Limid& input, const SolveOptions& opts) {
  ValidationReport rep = validate(input);
  if (!rep.ok()) throw ValidationError(std::move(rep));

  Limid model = input.decision_order.empty() ? input : make_limid_version(input);

  auto ordering = find_solution_ordering(model);
  if (!ordering) throw NotSolubleError();

  SolveReport report;
  report.ordering = *ordering;
  if (opts.reduce) {
    auto [reduced, trace] = reduce_minimal(model, *ordering);
    model = std::move(reduced);
    report.reduction = std::move(trace);
  }

  JunctionTree jt = compile(model, opts.hint);
  Propagator prop(std::move(jt), model, opts.allow_skips);

  int prev_root = -1;
  const auto& order = report.ordering.order;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeId d = *it;
    int root = choose_root(prop.tree(), family(prop.model(), d), prev_root);
    if (root < 0)
      throw std::logic_error("no clique covers the family of " + model.label(d));
    Potential combined = prev_root < 0 ? prop.collect(root, d)
                                       : prop.partial_collect(prev_root, root, d);
    if (opts.on_decision_root) opts.on_decision_root(prop, d, root, combined);
    Policy policy = prop.extract_policy(d, combined);
    prop.install_policy(policy, root);
    report.strategy.set(std::move(policy));
    report.roots.emplace_back(d, root);
    prev_root = root;
  }

  if (prop.tree().clique_count() == 0) {
    report.expected_utility = constant_utility_sum(model);
  } else {
    int final_root = prev_root < 0 ? 0 : prev_root;
    report.expected_utility = prop.expected_utility_at(final_root);
  }
  report.flows = prop.log();
  report.solved_model = model;
  return report;
}

double expected_utility(const Limid& input, const Strategy& strategy) {
  ValidationReport rep = validate(input);
  if (!rep.ok()) throw ValidationError(std::move(rep));
  Limid converted = convert_all(input, strategy);
  JunctionTree jt = compile(converted);
  if (jt.clique_count() == 0) return constant_utility_sum(converted);
  Propagator prop(std::move(jt), converted, false);
  return prop.expected_utility_at(0);
}

}  // namespace limid

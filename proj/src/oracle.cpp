#include "limid/oracle.hpp"

#include <algorithm>
#include <vector>

namespace limid {

namespace {

std::vector<int> table_digits(const Table& t, std::span<const int> config) {
  std::vector<int> digits(t.vars.size());
  for (std::size_t i = 0; i < t.vars.size(); ++i) digits[i] = config[t.vars[i]];
  return digits;
}

// Topological order of all nodes.
std::vector<NodeId> topo_order(const Limid& m) {
  int n = m.node_count();
  std::vector<int> indeg(n, 0);
  for (NodeId v = 0; v < n; ++v) indeg[v] = static_cast<int>(m.parents[v].size());
  auto ch = m.children();
  std::vector<NodeId> order, queue;
  for (NodeId v = 0; v < n; ++v)
    if (indeg[v] == 0) queue.push_back(v);
  while (!queue.empty()) {
    NodeId v = queue.back();
    queue.pop_back();
    order.push_back(v);
    for (NodeId c : ch[v])
      if (--indeg[c] == 0) queue.push_back(c);
  }
  return order;
}

std::uint64_t state_cells(const Limid& m) {
  std::uint64_t cells = 1;
  for (NodeId v = 0; v < m.node_count(); ++v) {
    if (m.is_value(v)) continue;
    cells *= static_cast<std::uint64_t>(m.card(v));
    if (cells > (std::uint64_t{1} << 62)) return cells;  // already far past any cap
  }
  return cells;
}

// config[var] * stride terms for addressing one table without allocating.
struct Addr {
  NodeId var;
  std::size_t stride;
};

std::vector<Addr> addr_of(std::span<const NodeId> vars, std::span<const int> cards) {
  std::vector<Addr> out(vars.size());
  std::size_t stride = 1;
  for (std::size_t i = vars.size(); i-- > 0;) {
    out[i] = {vars[i], stride};
    stride *= static_cast<std::size_t>(cards[i]);
  }
  return out;
}

std::size_t eval_addr(const std::vector<Addr>& addr, std::span<const int> config) {
  std::size_t idx = 0;
  for (const auto& a : addr) idx += static_cast<std::size_t>(config[a.var]) * a.stride;
  return idx;
}

}  // namespace

double joint_mass(const Limid& m, const Strategy& strategy, std::span<const int> config) {
  double mass = 1;
  for (NodeId v = 0; v < m.node_count(); ++v) {
    if (m.is_chance(v)) {
      mass *= m.cpt[v].values[m.cpt[v].index_of(table_digits(m.cpt[v], config))];
    } else if (m.is_decision(v)) {
      const Policy* p = strategy.find(v);
      if (!p) throw std::invalid_argument("strategy is missing a policy for " + m.label(v));
      mass *= p->table.values[p->table.index_of(table_digits(p->table, config))];
    }
  }
  return mass;
}

double oracle_eu(const Limid& m, const Strategy& strategy, const OracleLimits& limits) {
  if (state_cells(m) > limits.max_cells)
    throw OracleCapError("state space exceeds the configuration cell cap");

  int n = m.node_count();
  std::vector<int> config(n, 0);
  std::vector<NodeId> vars;
  for (NodeId v = 0; v < n; ++v)
    if (!m.is_value(v)) vars.push_back(v);

  double eu = 0;
  for (;;) {
    eu += joint_mass(m, strategy, config) * total_utility(m, config);
    std::size_t i = vars.size();
    while (i-- > 0) {
      if (++config[vars[i]] < m.card(vars[i])) break;
      config[vars[i]] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return eu;
}

OracleResult oracle_global_max(const Limid& m, const OracleLimits& limits) {
  auto decisions = m.decisions();

  // A pure strategy assigns an alternative to every (decision, parent
  // configuration) slot. Slots are ordered by decision id then parent
  // configuration; enumerating with the last slot fastest is lexicographic,
  // and keeping only strict improvements retains the first maximum.
  std::vector<int> slot_card;
  std::vector<std::size_t> slot_base(m.node_count(), 0);
  std::uint64_t strategies = 1;
  std::uint64_t chance_cells = 1;
  for (NodeId v = 0; v < m.node_count(); ++v) {
    if (!m.is_chance(v)) continue;
    chance_cells *= static_cast<std::uint64_t>(m.card(v));
    if (chance_cells > limits.max_work)
      throw OracleCapError("chance state space exceeds the work cap");
  }
  for (NodeId d : decisions) {
    slot_base[d] = slot_card.size();
    std::size_t pa_cells = cell_count(m.cards_of(m.parents[d]));
    for (std::size_t i = 0; i < pa_cells; ++i) {
      slot_card.push_back(m.card(d));
      if (strategies > limits.max_work / std::max<std::uint64_t>(chance_cells, 1) ||
          (strategies *= static_cast<std::uint64_t>(m.card(d))) >
              limits.max_work / std::max<std::uint64_t>(chance_cells, 1))
        throw OracleCapError("strategy space exceeds the work cap");
    }
  }

  // Precomputed evaluation plan: walk nodes in topological order, forcing
  // decisions and multiplying CPT entries, then add up utilities.
  enum class StepKind { Chance, Decision };
  struct Step {
    StepKind kind;
    NodeId v;
    const std::vector<double>* vals = nullptr;
    std::size_t base = 0;
    std::vector<Addr> addr;
  };
  std::vector<Step> steps;
  for (NodeId v : topo_order(m)) {
    if (m.is_chance(v)) {
      steps.push_back({StepKind::Chance, v, &m.cpt[v].values, 0,
                       addr_of(m.cpt[v].vars, m.cpt[v].cards)});
    } else if (m.is_decision(v)) {
      auto pa_cards = m.cards_of(m.parents[v]);
      steps.push_back({StepKind::Decision, v, nullptr, slot_base[v],
                       addr_of(m.parents[v], pa_cards)});
    }
  }
  struct UtilStep {
    const std::vector<double>* vals;
    std::vector<Addr> addr;
  };
  std::vector<UtilStep> utils;
  for (NodeId u : m.value_nodes())
    utils.push_back({&m.util[u].values, addr_of(m.util[u].vars, m.util[u].cards)});

  std::vector<NodeId> chance = m.chance_nodes();
  std::vector<int> choice(slot_card.size(), 0);
  std::vector<int> config(m.node_count(), 0);
  OracleResult res;
  bool first = true;

  for (;;) {
    double eu = 0;
    std::fill(config.begin(), config.end(), 0);
    for (;;) {
      double mass = 1;
      for (const auto& st : steps) {
        std::size_t idx = eval_addr(st.addr, config);
        if (st.kind == StepKind::Chance) {
          mass *= (*st.vals)[idx];  // addr spans the cpt's own variable too
          if (mass == 0) break;
        } else {
          config[st.v] = choice[st.base + idx];
        }
      }
      if (mass != 0) {
        double util = 0;
        for (const auto& us : utils) util += (*us.vals)[eval_addr(us.addr, config)];
        eu += mass * util;
      }

      std::size_t i = chance.size();
      while (i-- > 0) {
        if (++config[chance[i]] < m.card(chance[i])) break;
        config[chance[i]] = 0;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
    ++res.evaluations;

    if (first || eu > res.best_eu) {
      first = false;
      res.best_eu = eu;
      res.best_strategy.policies.clear();
      for (NodeId d : decisions) {
        Policy p;
        p.decision = d;
        p.table.vars = m.parents[d];
        p.table.vars.push_back(d);
        p.table.cards = m.cards_of(p.table.vars);
        p.table.values.assign(cell_count(p.table.cards), 0.0);
        std::size_t pa_cells = cell_count(m.cards_of(m.parents[d]));
        for (std::size_t s = 0; s < pa_cells; ++s)
          p.table.values[s * static_cast<std::size_t>(m.card(d)) +
                         static_cast<std::size_t>(choice[slot_base[d] + s])] = 1.0;
        res.best_strategy.set(std::move(p));
      }
    }

    std::size_t i = choice.size();
    while (i-- > 0) {
      if (++choice[i] < slot_card[i]) break;
      choice[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return res;
}

}  // namespace limid

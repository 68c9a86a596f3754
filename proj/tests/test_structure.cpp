#include <doctest.h>

#include <algorithm>

#include "limid/oracle.hpp"
#include "limid/structure.hpp"
#include "testutil.hpp"

using namespace limid;
using namespace testutil;

namespace {

std::vector<NodeId> ids(std::initializer_list<NodeId> v) { return v; }

void drop_arc(Limid& m, NodeId parent, NodeId child) {
  auto& p = m.parents[child];
  p.erase(std::find(p.begin(), p.end(), parent));
}

// A permutation of the decisions is an exact solution ordering when each
// suffix decision is extremal once the later ones are chance nodes.
bool is_exact_ordering(const Limid& m, const std::vector<NodeId>& order) {
  Limid cur = m;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (!is_extremal(cur, *it)) return false;
    cur = convert_to_chance(cur, *it, uniform_policy(cur, *it));
  }
  return true;
}

}  // namespace

TEST_CASE("d-separation: chain and collider") {
  Build b;
  NodeId a = b.add("a", NodeKind::Chance, 2);
  NodeId x = b.add("x", NodeKind::Chance, 2, {a});
  NodeId c = b.add("c", NodeKind::Chance, 2, {x});
  for (NodeId v : {a, x, c}) b.uniform_cpt(v);
  Limid chain = b.done();
  CHECK(d_separated(chain, ids({a}), ids({c}), ids({x})));
  CHECK(!d_separated(chain, ids({a}), ids({c}), ids({})));

  Build b2;
  NodeId p = b2.add("p", NodeKind::Chance, 2);
  NodeId q = b2.add("q", NodeKind::Chance, 2);
  NodeId coll = b2.add("m", NodeKind::Chance, 2, {p, q});
  NodeId down = b2.add("w", NodeKind::Chance, 2, {coll});
  for (NodeId v : {p, q, coll, down}) b2.uniform_cpt(v);
  Limid vstruct = b2.done();
  CHECK(d_separated(vstruct, ids({p}), ids({q}), ids({})));
  CHECK(!d_separated(vstruct, ids({p}), ids({q}), ids({coll})));
  CHECK(!d_separated(vstruct, ids({p}), ids({q}), ids({down})));
}

TEST_CASE("d-separation rejects bad arguments") {
  Limid m = load_fixture("fourstage_minimal.limid");
  CHECK_THROWS_AS(d_separated(m, ids({0}), ids({0}), ids({})), std::invalid_argument);
  CHECK_THROWS_AS(d_separated(m, ids({0}), ids({1}), ids({1})), std::invalid_argument);
  CHECK_THROWS_AS(d_separated(m, ids({}), ids({1}), ids({2})), std::invalid_argument);
}

TEST_CASE("d-separation matches path enumeration on random DAGs") {
  int disagreements = 0;
  for (unsigned seed = 1; seed <= 500; ++seed) {
    Rng rng(seed);
    RandomOpts o;
    o.max_nonvalue = 8;
    o.max_values = 3;
    o.max_card = 3;
    Limid m = random_limid(rng, o);
    int n = m.node_count();
    for (int q = 0; q < 3; ++q) {
      std::vector<NodeId> pool(n);
      for (NodeId v = 0; v < n; ++v) pool[v] = v;
      std::shuffle(pool.begin(), pool.end(), rng.gen);
      int na = rng.range(1, 2), nb = rng.range(1, 2), ns = rng.range(0, 3);
      if (na + nb + ns > n) continue;
      std::vector<NodeId> a(pool.begin(), pool.begin() + na);
      std::vector<NodeId> b(pool.begin() + na, pool.begin() + na + nb);
      std::vector<NodeId> s(pool.begin() + na + nb, pool.begin() + na + nb + ns);
      bool fast = d_separated(m, a, b, s);
      bool slow = brute_d_separated(m, a, b, s);
      if (fast != slow) {
        ++disagreements;
        CAPTURE(seed);
        CAPTURE(q);
        CHECK(fast == slow);
      }
    }
  }
  CHECK(disagreements == 0);
}

TEST_CASE("fourstage_closure: the removable parents of d4 are separated") {
  Limid m = load_fixture("fourstage_closure.limid");
  // fa(d4) \ {d1, d3} = {d2, r4, d4}.
  CHECK(d_separated(m, ids({0, 2}), ids({9, 11}), ids({1, 7, 3})));
}

TEST_CASE("no-forgetting closure of fourstage is exactly fourstage_closure") {
  Limid id = load_fixture("fourstage.limid");
  Limid closed = make_limid_version(id);
  Limid want = load_fixture("fourstage_closure.limid");
  CHECK(closed == want);
  CHECK(closed.decision_order.empty());
}

TEST_CASE("closure requires a declared order and rejects cycles") {
  Limid plain = load_fixture("fourstage_closure.limid");
  CHECK_THROWS_AS(make_limid_version(plain), std::invalid_argument);

  // c is a parent of the first decision but a child of the second: the
  // closure arc c -> d2 meets the existing d2 -> c.
  Build b;
  b.add("d1", NodeKind::Decision, 2, {2});
  b.add("d2", NodeKind::Decision, 2);
  b.add("c", NodeKind::Chance, 2, {1});
  b.add("u", NodeKind::Value, 0, {0});
  b.uniform_cpt(2);
  b.util(3, {1.0, 0.0});
  Limid bad = b.done();
  bad.decision_order = {0, 1};
  REQUIRE(validate(bad).ok());
  CHECK_THROWS_AS(make_limid_version(bad), std::invalid_argument);
}

TEST_CASE("closure on a single decision changes nothing") {
  Build b;
  NodeId o1 = b.add("o1", NodeKind::Chance, 2);
  NodeId d = b.add("d", NodeKind::Decision, 2, {o1});
  NodeId u = b.add("u", NodeKind::Value, 0, {o1, d});
  b.uniform_cpt(o1);
  b.util(u, {1, 0, 0, 1});
  Limid m = b.done();
  m.decision_order = {d};
  Limid closed = make_limid_version(m);
  Limid want = m;
  want.decision_order.clear();
  CHECK(closed == want);
}

TEST_CASE("closure adds earlier families") {
  Build b;
  NodeId o1 = b.add("o1", NodeKind::Chance, 2);
  NodeId d1 = b.add("d1", NodeKind::Decision, 2, {o1});
  NodeId d2 = b.add("d2", NodeKind::Decision, 2);
  NodeId u = b.add("u", NodeKind::Value, 0, {d2});
  b.uniform_cpt(o1);
  b.util(u, {1, 0});
  Limid m = b.done();
  m.decision_order = {d1, d2};
  Limid closed = make_limid_version(m);
  CHECK(closed.parents[d2] == ids({o1, d1}));
}

TEST_CASE("closure invariant on random influence diagrams") {
  for (unsigned seed = 1; seed <= 120; ++seed) {
    CAPTURE(seed);
    Rng rng(seed);
    Limid id = random_id(rng);
    std::vector<NodeId> order = id.decision_order;
    Limid closed = make_limid_version(id);
    REQUIRE(validate(closed).ok());
    std::vector<NodeId> gained;
    for (std::size_t i = 0; i < order.size(); ++i) {
      NodeId d = order[i];
      // Everything accumulated from earlier families must be a parent now.
      for (NodeId g : gained)
        if (g != d)
          CHECK(std::binary_search(closed.parents[d].begin(), closed.parents[d].end(), g));
      for (NodeId p : id.parents[d]) {
        CHECK(std::binary_search(closed.parents[d].begin(), closed.parents[d].end(), p));
        gained.push_back(p);
      }
      gained.push_back(d);
    }
    // The declared order is an exact solution ordering of the closure.
    CHECK(is_exact_ordering(closed, order));
    auto found = find_solution_ordering(closed);
    REQUIRE(found.has_value());
    CHECK(found->order == order);
  }
}

TEST_CASE("requisite parents on fourstage_closure and its partial reductions") {
  Limid m = load_fixture("fourstage_closure.limid");
  RequisiteSplit d4 = requisite_parents(m, 3);
  CHECK(d4.non_requisite == ids({0, 2}));
  CHECK(d4.requisite == ids({1, 7}));

  // After d4's visit: d1 is non-requisite for d3, d2 requisite.
  Limid l1 = m;
  drop_arc(l1, 0, 3);
  drop_arc(l1, 2, 3);
  RequisiteSplit d3 = requisite_parents(l1, 2);
  CHECK(d3.non_requisite == ids({0}));
  CHECK(d3.requisite == ids({1}));

  // After d3's visit: d1 is requisite for d2.
  Limid l2 = l1;
  drop_arc(l2, 0, 2);
  RequisiteSplit d2 = requisite_parents(l2, 1);
  CHECK(d2.requisite == ids({0}));
  CHECK(d2.non_requisite.empty());
}

TEST_CASE("decision with no value descendants has only non-requisite parents") {
  Build b;
  NodeId c = b.add("c", NodeKind::Chance, 2);
  NodeId d = b.add("d", NodeKind::Decision, 2, {c});
  NodeId u = b.add("u", NodeKind::Value, 0, {c});
  b.uniform_cpt(c);
  b.util(u, {2, 3});
  Limid m = b.done();
  RequisiteSplit split = requisite_parents(m, d);
  CHECK(split.non_requisite == ids({c}));
  CHECK(split.requisite.empty());
}

TEST_CASE("reduction of fourstage_closure yields fourstage_minimal with the exact trace") {
  Limid m = load_fixture("fourstage_closure.limid");
  auto found = find_solution_ordering(m);
  REQUIRE(found.has_value());
  CHECK(found->order == ids({0, 1, 2, 3}));

  auto [reduced, trace] = reduce_minimal(m, *found);
  CHECK(reduced == load_fixture("fourstage_minimal.limid"));
  REQUIRE(trace.removed.size() == 3);
  CHECK(trace.removed[0] == RemovedArc{0, 3, 0});
  CHECK(trace.removed[1] == RemovedArc{2, 3, 0});
  CHECK(trace.removed[2] == RemovedArc{0, 2, 1});

  // Idempotent: the output is already minimal.
  auto [again, trace2] = reduce_minimal(reduced, *found);
  CHECK(again == reduced);
  CHECK(trace2.removed.empty());
}

TEST_CASE("reduction is the same under every exact solution ordering") {
  int checked = 0;
  for (unsigned seed = 1; seed <= 200 && checked < 40; ++seed) {
    Rng rng(seed);
    RandomOpts o;
    o.max_nonvalue = 7;
    o.min_decisions = 2;
    Limid m = random_limid(rng, o);
    if (!find_solution_ordering(m)) continue;

    std::vector<NodeId> decs = m.decisions();
    std::sort(decs.begin(), decs.end());
    std::vector<std::vector<NodeId>> valid;
    do {
      if (is_exact_ordering(m, decs)) valid.push_back(decs);
    } while (std::next_permutation(decs.begin(), decs.end()));
    if (valid.size() < 2) continue;

    ++checked;
    CAPTURE(seed);
    auto [first, t0] = reduce_minimal(m, SolutionOrdering{valid[0]});
    for (std::size_t i = 1; i < valid.size(); ++i) {
      auto [other, ti] = reduce_minimal(m, SolutionOrdering{valid[i]});
      CHECK(other.parents == first.parents);
    }
  }
  CHECK(checked >= 10);
}

TEST_CASE("reduction preserves the optimal expected utility") {
  int done = 0;
  for (unsigned seed = 1; seed <= 400 && done < 50; ++seed) {
    Rng rng(seed);
    RandomOpts o;
    o.max_nonvalue = 8;
    o.max_decisions = 2;
    Limid m = random_limid(rng, o);
    auto ordering = find_solution_ordering(m);
    if (!ordering) continue;
    auto [reduced, trace] = reduce_minimal(m, *ordering);
    REQUIRE(validate(reduced).ok());
    ++done;
    CAPTURE(seed);
    OracleResult a = oracle_global_max(m);
    OracleResult b = oracle_global_max(reduced);
    CHECK(a.best_eu == doctest::Approx(b.best_eu).epsilon(1e-9));
  }
  CHECK(done == 50);
}

TEST_CASE("extremality") {
  Limid fourstage_closure = load_fixture("fourstage_closure.limid");
  CHECK(is_extremal(fourstage_closure, 3));
  CHECK(!is_extremal(fourstage_closure, 0));
  CHECK(!is_extremal(fourstage_closure, 1));
  CHECK(!is_extremal(fourstage_closure, 2));
  CHECK_THROWS_AS(is_extremal(fourstage_closure, 7), std::invalid_argument);

  // Two parentless decisions sharing a utility child: neither is extremal.
  Limid coord = load_fixture("coordination.limid");
  CHECK(!is_extremal(coord, 0));
  CHECK(!is_extremal(coord, 1));
  CHECK(!find_solution_ordering(coord).has_value());

  // A lone decision is always extremal.
  Build b;
  NodeId d = b.add("d", NodeKind::Decision, 2);
  NodeId u = b.add("u", NodeKind::Value, 0, {d});
  b.util(u, {0, 1});
  CHECK(is_extremal(b.done(), d));
}

TEST_CASE("fourstage without its closure is not soluble") {
  Limid m = load_fixture("fourstage.limid");
  m.decision_order.clear();
  CHECK(!find_solution_ordering(m).has_value());
}

TEST_CASE("find_solution_ordering with zero decisions") {
  Build b;
  NodeId c = b.add("c", NodeKind::Chance, 2);
  NodeId u = b.add("u", NodeKind::Value, 0, {c});
  b.uniform_cpt(c);
  b.util(u, {1, 2});
  auto found = find_solution_ordering(b.done());
  REQUIRE(found.has_value());
  CHECK(found->order.empty());
}

TEST_CASE("convert_to_chance installs the policy as a cpt") {
  Limid m = load_fixture("fourstage.limid");
  Policy pol = uniform_policy(m, 3);
  Limid conv = convert_to_chance(m, 3, pol);
  CHECK(conv.is_chance(3));
  CHECK(conv.cpt[3] == pol.table);
  CHECK(conv.label(3) == "d4");
  CHECK(conv.decision_order == ids({0, 1, 2}));
  CHECK(validate(conv).ok());
  CHECK_THROWS_AS(convert_to_chance(m, 7, pol), std::invalid_argument);

  Strategy all;
  Limid fourstage_minimal = load_fixture("fourstage_minimal.limid");
  for (NodeId d : fourstage_minimal.decisions()) all.set(uniform_policy(fourstage_minimal, d));
  Limid bn = convert_all(fourstage_minimal, all);
  CHECK(bn.decisions().empty());
  CHECK(validate(bn).ok());
}

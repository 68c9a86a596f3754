#include <doctest.h>

#include <algorithm>
#include <queue>

#include "limid/model.hpp"
#include "testutil.hpp"

using namespace limid;
using namespace testutil;

namespace {

bool has_code(const ValidationReport& r, const std::string& code) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

// Independent reachability: children computed from scratch, plain BFS.
std::vector<NodeId> bfs_descendants(const Limid& m, NodeId start) {
  int n = m.node_count();
  std::vector<std::vector<NodeId>> ch(n);
  for (NodeId v = 0; v < n; ++v)
    for (NodeId p : m.parents[v]) ch[p].push_back(v);
  std::vector<char> seen(n, 0);
  std::queue<NodeId> q;
  q.push(start);
  while (!q.empty()) {
    NodeId v = q.front();
    q.pop();
    for (NodeId c : ch[v])
      if (!seen[c]) {
        seen[c] = 1;
        q.push(c);
      }
  }
  std::vector<NodeId> out;
  for (NodeId v = 0; v < n; ++v)
    if (seen[v]) out.push_back(v);
  return out;
}

}  // namespace

TEST_CASE("fixtures validate cleanly") {
  for (const char* name : {"fourstage.limid", "fourstage_closure.limid", "fourstage_minimal.limid", "coordination.limid"}) {
    CAPTURE(name);
    Limid m = load_fixture(name);
    ValidationReport rep = validate(m);
    CHECK_MESSAGE(rep.ok(), rep.to_string());
  }
}

TEST_CASE("fixture shape: fourstage") {
  Limid m = load_fixture("fourstage.limid");
  CHECK(m.node_count() == 12);
  CHECK(m.decisions() == std::vector<NodeId>{0, 1, 2, 3});
  CHECK(m.chance_nodes() == std::vector<NodeId>{4, 5, 6, 7});
  CHECK(m.value_nodes() == std::vector<NodeId>{8, 9, 10, 11});
  CHECK(m.decision_order == std::vector<NodeId>{0, 1, 2, 3});
  CHECK(m.find_label("r4") == NodeId{7});
  CHECK(!m.find_label("nope").has_value());
  for (NodeId d : m.decisions()) CHECK(m.card(d) == 2);
  // Only the information arc r4 -> d4 in the ID form.
  CHECK(m.parents[3] == std::vector<NodeId>{7});
  CHECK(m.parents[0].empty());
}

TEST_CASE("validate flags a value node used as a parent") {
  Limid m = load_fixture("fourstage_minimal.limid");
  // Reverse the arc r2 -> u1: u1 becomes a parent of r2.
  NodeId u1 = *m.find_label("u1");
  NodeId r2 = *m.find_label("r2");
  auto& pu = m.parents[u1];
  pu.erase(std::find(pu.begin(), pu.end(), r2));
  m.parents[r2].insert(std::lower_bound(m.parents[r2].begin(), m.parents[r2].end(), u1), u1);
  ValidationReport rep = validate(m);
  CHECK(!rep.ok());
  CHECK(has_code(rep, "value-node-has-children"));
}

TEST_CASE("validate flags a denormalized cpt slice") {
  Limid m = load_fixture("fourstage_minimal.limid");
  NodeId r1 = *m.find_label("r1");
  m.cpt[r1].values[0] += 0.1;
  ValidationReport rep = validate(m);
  CHECK(!rep.ok());
  CHECK(has_code(rep, "cpt-unnormalized"));
}

TEST_CASE("validate flags other single faults") {
  Limid base = load_fixture("fourstage_minimal.limid");

  SUBCASE("negative cpt entry") {
    Limid m = base;
    NodeId r3 = *m.find_label("r3");
    m.cpt[r3].values = {1.4, -0.4};
    CHECK(has_code(validate(m), "cpt-entry"));
  }
  SUBCASE("cycle") {
    Limid m = base;
    // d2 -> r1 closes r1 -> r4 -> d4 ... already d1 -> d2; make r1 a parent
    // of d1 and d1 is an ancestor of r1.
    m.parents[0] = {4};
    CHECK(has_code(validate(m), "cyclic"));
  }
  SUBCASE("duplicate label") {
    Limid m = base;
    m.nodes[1].label = m.nodes[0].label;
    CHECK(has_code(validate(m), "label-duplicate"));
  }
  SUBCASE("unsorted parents") {
    Limid m = base;
    NodeId u1 = *m.find_label("u1");
    std::reverse(m.parents[u1].begin(), m.parents[u1].end());
    std::reverse(m.util[u1].vars.begin(), m.util[u1].vars.end());
    CHECK(has_code(validate(m), "parent-order"));
  }
  SUBCASE("utility table with wrong variables") {
    Limid m = base;
    NodeId u3 = *m.find_label("u3");
    m.util[u3].vars.pop_back();
    CHECK(has_code(validate(m), "utility-vars"));
  }
  SUBCASE("decision_order not a permutation") {
    Limid m = load_fixture("fourstage.limid");
    m.decision_order = {0, 1, 2, 2};
    CHECK(has_code(validate(m), "decision-order"));
  }
  SUBCASE("missing cpt") {
    Limid m = base;
    NodeId r3 = *m.find_label("r3");
    m.cpt[r3] = Table{};
    CHECK(has_code(validate(m), "cpt-missing"));
  }
  SUBCASE("table on a decision") {
    Limid m = base;
    m.cpt[0] = Table{{}, {}, {1.0}};
    CHECK(has_code(validate(m), "table-kind"));
  }
}

TEST_CASE("random models validate") {
  for (unsigned seed = 1; seed <= 60; ++seed) {
    CAPTURE(seed);
    Rng rng(seed);
    Limid m = random_limid(rng);
    ValidationReport rep = validate(m);
    CHECK_MESSAGE(rep.ok(), rep.to_string());
  }
}

TEST_CASE("family and descendants match independent BFS") {
  for (unsigned seed = 1; seed <= 100; ++seed) {
    CAPTURE(seed);
    Rng rng(seed);
    RandomOpts o;
    o.max_nonvalue = 16;
    o.max_values = 4;
    o.max_card = 3;
    Limid m = random_limid(rng, o);
    for (NodeId v = 0; v < m.node_count(); ++v) {
      std::vector<NodeId> fa = m.parents[v];
      fa.push_back(v);
      std::sort(fa.begin(), fa.end());
      CHECK(family(m, v) == fa);
      CHECK(descendants(m, v) == bfs_descendants(m, v));
    }
  }
}

TEST_CASE("children inverts parents") {
  Rng rng(7);
  Limid m = random_limid(rng);
  auto ch = m.children();
  for (NodeId p = 0; p < m.node_count(); ++p) {
    CHECK(std::is_sorted(ch[p].begin(), ch[p].end()));
    for (NodeId c : ch[p])
      CHECK(std::binary_search(m.parents[c].begin(), m.parents[c].end(), p));
  }
  int arcs = 0, arcs2 = 0;
  for (const auto& v : m.parents) arcs += static_cast<int>(v.size());
  for (const auto& v : ch) arcs2 += static_cast<int>(v.size());
  CHECK(arcs == arcs2);
}

TEST_CASE("table index round trip") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    int k = rng.range(0, 4);
    std::vector<int> cards(k);
    for (auto& c : cards) c = rng.range(1, 4);
    std::size_t n = cell_count(cards);
    std::vector<int> digits(k);
    for (std::size_t i = 0; i < n; ++i) {
      digits_of(cards, i, digits);
      CHECK(index_of(cards, digits) == i);
    }
  }
  CHECK(cell_count(std::vector<int>{}) == 1);
}

TEST_CASE("subindex_map broadcasts correctly") {
  // dst over {a=0, b=1, c=2} cards {2,3,2}; src over {c, a}.
  std::vector<NodeId> dst_vars{0, 1, 2};
  std::vector<int> dst_cards{2, 3, 2};
  std::vector<NodeId> src_vars{2, 0};
  std::vector<int> src_cards{2, 2};
  auto map = subindex_map(dst_vars, dst_cards, src_vars, src_cards);
  REQUIRE(map.size() == 12);
  std::vector<int> digits(3);
  for (std::size_t i = 0; i < map.size(); ++i) {
    digits_of(dst_cards, i, digits);
    std::size_t want = static_cast<std::size_t>(digits[2]) * 2 + digits[0];
    CHECK(map[i] == want);
  }
}

TEST_CASE("total_utility sums every utility table") {
  Limid m = load_fixture("fourstage_minimal.limid");
  // ids: d1..d4 = 0..3, r1..r4 = 4..7, u1..u4 = 8..11.
  std::vector<int> config(m.node_count(), 0);
  // u1(d3=0, r2=0)=1, u2(d2=0, d4=0)=2, u3(r3=0, r4=0)=0, u4(d4=0, r4=0)=1.
  CHECK(total_utility(m, config) == doctest::Approx(4.0));
  config[2] = 1;  // d3=1: u1(1, 0) = -3
  CHECK(total_utility(m, config) == doctest::Approx(0.0));
  config[7] = 1;  // r4=1: u3(0,1)=2, u4(0,1)=-1
  config[1] = 1;  // d2=1: u2(1,0)=0
  CHECK(total_utility(m, config) == doctest::Approx(-3 + 0 + 2 - 1));
}

TEST_CASE("policies: uniform, constant, check") {
  Limid m = load_fixture("fourstage_minimal.limid");
  NodeId d4 = 3;  // pa(d4) = {d2, r4}
  Policy u = uniform_policy(m, d4);
  CHECK(u.table.vars == std::vector<NodeId>{1, 7, 3});
  CHECK(u.table.values == std::vector<double>(8, 0.5));
  CHECK_NOTHROW(check_policy(m, u));

  Policy c = constant_policy(m, d4, 1);
  for (std::size_t i = 0; i < c.table.values.size(); ++i)
    CHECK(c.table.values[i] == (i % 2 == 1 ? 1.0 : 0.0));
  CHECK_NOTHROW(check_policy(m, c));

  Policy bad = c;
  bad.table.values[0] = 0.25;
  CHECK_THROWS_AS(check_policy(m, bad), std::invalid_argument);
  Policy wrong_vars = c;
  wrong_vars.table.vars = {7, 1, 3};
  CHECK_THROWS_AS(check_policy(m, wrong_vars), std::invalid_argument);
  Policy not_decision = c;
  not_decision.decision = 4;
  CHECK_THROWS_AS(check_policy(m, not_decision), std::invalid_argument);
}

TEST_CASE("strategy set and find") {
  Limid m = load_fixture("fourstage_minimal.limid");
  Strategy s;
  s.set(uniform_policy(m, 2));
  s.set(uniform_policy(m, 0));
  s.set(constant_policy(m, 2, 1));  // replaces
  REQUIRE(s.policies.size() == 2);
  CHECK(s.policies[0].decision == 0);
  CHECK(s.policies[1].decision == 2);
  CHECK(s.find(2)->table.values[1] == 1.0);
  CHECK(s.find(7) == nullptr);
}

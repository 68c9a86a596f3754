#include "limid/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace limid {

namespace {

// Mass below this is treated as zero when renormalizing utilities, so the
// 0/0 = 0 rule also covers denormal residue from long products.
constexpr double kTinyMass = 1e-300;

}  // namespace

Potential Potential::vacuous(std::vector<NodeId> vars, std::vector<int> cards) {
  Potential p;
  p.vars = std::move(vars);
  p.cards = std::move(cards);
  std::size_t n = cell_count(p.cards);
  p.prob.assign(n, 1.0);
  p.util.assign(n, 0.0);
  return p;
}

Potential combine(const Potential& a, const Potential& b) {
  Potential out;
  out.vars.reserve(a.vars.size() + b.vars.size());
  std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(),
                 std::back_inserter(out.vars));
  out.cards.resize(out.vars.size());
  for (std::size_t i = 0; i < out.vars.size(); ++i) {
    auto ia = std::find(a.vars.begin(), a.vars.end(), out.vars[i]);
    out.cards[i] = ia != a.vars.end()
                       ? a.cards[ia - a.vars.begin()]
                       : b.cards[std::find(b.vars.begin(), b.vars.end(), out.vars[i]) -
                                 b.vars.begin()];
  }

  auto ma = subindex_map(out.vars, out.cards, a.vars, a.cards);
  auto mb = subindex_map(out.vars, out.cards, b.vars, b.cards);
  std::size_t n = cell_count(out.cards);
  out.prob.resize(n);
  out.util.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.prob[i] = a.prob[ma[i]] * b.prob[mb[i]];
    out.util[i] = a.util[ma[i]] + b.util[mb[i]];
  }
  return out;
}

Potential marginalize(const Potential& a, std::span<const NodeId> onto) {
  for (NodeId v : onto)
    if (!std::binary_search(a.vars.begin(), a.vars.end(), v))
      throw std::invalid_argument("marginalize: target is not a subset of the domain");

  Potential out;
  out.vars.assign(onto.begin(), onto.end());
  std::sort(out.vars.begin(), out.vars.end());
  out.vars.erase(std::unique(out.vars.begin(), out.vars.end()), out.vars.end());
  out.cards.resize(out.vars.size());
  for (std::size_t i = 0; i < out.vars.size(); ++i) {
    auto it = std::find(a.vars.begin(), a.vars.end(), out.vars[i]);
    out.cards[i] = a.cards[it - a.vars.begin()];
  }

  std::size_t n = cell_count(out.cards);
  out.prob.assign(n, 0.0);
  out.util.assign(n, 0.0);  // holds sum(p u) until the final division

  auto map = subindex_map(a.vars, a.cards, out.vars, out.cards);
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.prob[map[i]] += a.prob[i];
    out.util[map[i]] += a.prob[i] * a.util[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    out.util[i] = out.prob[i] < kTinyMass ? 0.0 : out.util[i] / out.prob[i];
  return out;
}

Table contract(const Potential& a) {
  Table t;
  t.vars = a.vars;
  t.cards = a.cards;
  t.values.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) t.values[i] = a.prob[i] * a.util[i];
  return t;
}

bool potentials_equal(const Potential& a, const Potential& b, double tol) {
  if (a.vars != b.vars || a.cards != b.cards) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a.prob[i] - b.prob[i]) > tol) return false;
    if (a.prob[i] > 0.0 && std::abs(a.util[i] - b.util[i]) > tol) return false;
  }
  return true;
}

void multiply_in(Potential& dst, const Table& t) {
  auto map = subindex_map(dst.vars, dst.cards, t.vars, t.cards);
  for (std::size_t i = 0; i < dst.size(); ++i) dst.prob[i] *= t.values[map[i]];
}

void add_in(Potential& dst, const Table& t) {
  auto map = subindex_map(dst.vars, dst.cards, t.vars, t.cards);
  for (std::size_t i = 0; i < dst.size(); ++i) dst.util[i] += t.values[map[i]];
}

}  // namespace limid

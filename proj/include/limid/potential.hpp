#pragma once

#include <span>
#include <vector>

#include "limid/table.hpp"

namespace limid {

// Pair (p, u) of a probability part and a utility part over the same
// variables. vars is kept sorted ascending by node id; both parts share the
// dense layout of Table (last variable fastest).
struct Potential {
  std::vector<NodeId> vars;
  std::vector<int> cards;
  std::vector<double> prob;
  std::vector<double> util;

  std::size_t size() const { return prob.size(); }

  // Identity element on the given variables: p = 1, u = 0 everywhere.
  static Potential vacuous(std::vector<NodeId> vars, std::vector<int> cards);
};

// (p1, u1) x (p2, u2) = (p1 p2, u1 + u2) on the union of the variables.
Potential combine(const Potential& a, const Potential& b);

// Sum the probability part over the dropped variables; the utility part
// becomes sum(p u) / sum(p), with a zero or denormal-tiny mass giving 0.
// `onto` must be a subset of a.vars.
Potential marginalize(const Potential& a, std::span<const NodeId> onto);

// cont(p, u) = p * u, cell-wise.
Table contract(const Potential& a);

// Equality in the valuation sense: probability parts agree everywhere, and
// utility parts agree wherever a's probability is positive.
bool potentials_equal(const Potential& a, const Potential& b, double tol = 1e-9);

// Multiply a table into the probability part (broadcast over missing vars).
void multiply_in(Potential& dst, const Table& t);

// Add a table into the utility part (broadcast over missing vars).
void add_in(Potential& dst, const Table& t);

}  // namespace limid

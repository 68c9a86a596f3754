#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace limid {

using NodeId = std::int32_t;

// Number of cells in a dense table over variables with the given domain sizes.
std::size_t cell_count(std::span<const int> cards);

// Linear index of a digit vector, row-major with the last variable fastest.
std::size_t index_of(std::span<const int> cards, std::span<const int> digits);

// Inverse of index_of.
void digits_of(std::span<const int> cards, std::size_t index, std::span<int> digits);

// For each cell of the (dst_vars, dst_cards) layout, the linear index of the
// matching cell in a table over src_vars. src_vars must be a subset of
// dst_vars (any order); variables absent from src are broadcast over.
std::vector<std::size_t> subindex_map(std::span<const NodeId> dst_vars,
                                      std::span<const int> dst_cards,
                                      std::span<const NodeId> src_vars,
                                      std::span<const int> src_cards);

// Dense real table over a list of finite variables. values is row-major with
// the last variable in vars running fastest.
struct Table {
  std::vector<NodeId> vars;
  std::vector<int> cards;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  std::size_t index_of(std::span<const int> digits) const {
    return limid::index_of(cards, digits);
  }

  bool operator==(const Table&) const = default;
};

}  // namespace limid

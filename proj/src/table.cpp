#include "limid/table.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace limid {

std::size_t cell_count(std::span<const int> cards) {
  std::size_t n = 1;
  for (int c : cards) n *= static_cast<std::size_t>(c);
  return n;
}

std::size_t index_of(std::span<const int> cards, std::span<const int> digits) {
  assert(cards.size() == digits.size());
  std::size_t idx = 0;
  for (std::size_t i = 0; i < cards.size(); ++i) {
    assert(digits[i] >= 0 && digits[i] < cards[i]);
    idx = idx * static_cast<std::size_t>(cards[i]) + static_cast<std::size_t>(digits[i]);
  }
  return idx;
}

void digits_of(std::span<const int> cards, std::size_t index, std::span<int> digits) {
  assert(cards.size() == digits.size());
  for (std::size_t i = cards.size(); i-- > 0;) {
    auto c = static_cast<std::size_t>(cards[i]);
    digits[i] = static_cast<int>(index % c);
    index /= c;
  }
}

std::vector<std::size_t> subindex_map(std::span<const NodeId> dst_vars,
                                      std::span<const int> dst_cards,
                                      std::span<const NodeId> src_vars,
                                      std::span<const int> src_cards) {
  // Stride of each src variable in the src layout.
  std::vector<std::size_t> src_strides(src_vars.size());
  std::size_t stride = 1;
  for (std::size_t i = src_vars.size(); i-- > 0;) {
    src_strides[i] = stride;
    stride *= static_cast<std::size_t>(src_cards[i]);
  }

  // For each dst position, the src stride it contributes (0 if absent).
  std::vector<std::size_t> contrib(dst_vars.size(), 0);
  for (std::size_t j = 0; j < src_vars.size(); ++j) {
    auto it = std::find(dst_vars.begin(), dst_vars.end(), src_vars[j]);
    if (it == dst_vars.end())
      throw std::invalid_argument("subindex_map: src variable missing from dst");
    auto pos = static_cast<std::size_t>(it - dst_vars.begin());
    if (dst_cards[pos] != src_cards[j])
      throw std::invalid_argument("subindex_map: domain size mismatch");
    contrib[pos] = src_strides[j];
  }

  std::size_t n = cell_count(dst_cards);
  std::vector<std::size_t> map(n);
  if (n == 0) return map;
  std::vector<int> digits(dst_vars.size(), 0);
  std::size_t src_idx = 0;
  for (std::size_t cell = 0;; ++cell) {
    map[cell] = src_idx;
    if (cell + 1 == n) break;
    // Odometer increment, last digit fastest.
    for (std::size_t i = dst_vars.size(); i-- > 0;) {
      if (++digits[i] < dst_cards[i]) {
        src_idx += contrib[i];
        break;
      }
      digits[i] = 0;
      src_idx -= contrib[i] * static_cast<std::size_t>(dst_cards[i] - 1);
    }
  }
  return map;
}

}  // namespace limid

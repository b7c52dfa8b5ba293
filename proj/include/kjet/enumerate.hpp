#pragma once

// Exhaustive enumeration of small combinatorial families: all maps between two
// finite sets, and all choice functions from a list of candidate lists. Both run in
// lexicographic order of the produced table, last position fastest.

#include <cstddef>
#include <vector>

#include "kjet/finset.hpp"

namespace kjet {

/// Calls fn(table) for every table in choices[0] x choices[1] x ... (values, not indices).
template <typename Fn>
void for_each_choice(const std::vector<std::vector<std::size_t>>& choices, Fn&& fn) {
  for (const auto& c : choices)
    if (c.empty()) return;
  std::vector<std::size_t> pos(choices.size(), 0);
  std::vector<std::size_t> table(choices.size());
  for (std::size_t i = 0; i < choices.size(); ++i) table[i] = choices[i][0];
  while (true) {
    fn(static_cast<const std::vector<std::size_t>&>(table));
    std::size_t i = choices.size();
    while (i > 0) {
      --i;
      if (++pos[i] < choices[i].size()) {
        table[i] = choices[i][pos[i]];
        break;
      }
      pos[i] = 0;
      table[i] = choices[i][0];
      if (i == 0) return;
    }
    if (choices.empty()) return;
  }
}

inline std::size_t count_choices(const std::vector<std::vector<std::size_t>>& choices) {
  std::size_t n = 1;
  for (const auto& c : choices) n *= c.size();
  return n;
}

/// Calls fn(map) for every map dom -> cod.
template <typename Fn>
void for_each_map(const FinSet& dom, const FinSet& cod, Fn&& fn) {
  std::vector<std::size_t> all(cod.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::vector<std::vector<std::size_t>> choices(dom.size(), all);
  for_each_choice(choices, [&](const std::vector<std::size_t>& table) { fn(FinMap(dom, cod, table)); });
}

inline std::vector<FinMap> all_maps(const FinSet& dom, const FinSet& cod) {
  std::vector<FinMap> out;
  for_each_map(dom, cod, [&](const FinMap& f) { out.push_back(f); });
  return out;
}

/// Calls fn(mask) for every subset of {0..n-1} given as a 0/1 vector.
template <typename Fn>
void for_each_subset(std::size_t n, Fn&& fn) {
  std::vector<std::vector<std::size_t>> choices(n, std::vector<std::size_t>{0, 1});
  for_each_choice(choices, fn);
}

}  // namespace kjet

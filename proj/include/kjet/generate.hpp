#pragma once

// Seeded generators for small random instances. A generator draws only from the
// Rng it is given, so an instance is a pure function of its seed.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "kjet/finset.hpp"
#include "kjet/relations.hpp"

namespace kjet::gen {

using Rng = std::mt19937_64;

/// An Rng for instance `index` of the stream `stream` under `seed`.
inline Rng instance_rng(std::uint64_t seed, std::string_view stream, std::uint64_t index) {
  std::uint64_t h = 1469598103934665603ull;
  for (char ch : stream) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ull;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

/// Uniform in [lo, hi]. Computed by rejection from raw draws so it does not depend
/// on the standard library's distribution implementation.
inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = (Rng::max() / span) * span;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return lo + static_cast<std::size_t>(draw % span);
}

inline bool coin(Rng& rng) { return uniform(rng, 0, 1) == 1; }

inline FinSet random_set(Rng& rng, const std::string& name, std::size_t max_size, std::string_view prefix,
                         std::size_t min_size = 0) {
  return standard_set(name, uniform(rng, min_size, max_size), prefix);
}

inline FinMap random_map(Rng& rng, const FinSet& dom, const FinSet& cod) {
  require(dom.empty() || !cod.empty(), ErrorKind::ShapeMismatch, "no maps into the empty set");
  std::vector<std::size_t> table(dom.size());
  for (auto& v : table) v = uniform(rng, 0, cod.size() - 1);
  return FinMap(dom, cod, std::move(table));
}

/// Each pair present with probability 1/2.
inline Relation random_relation(Rng& rng, const FinSet& a, const FinSet& b) {
  std::vector<IndexPair> pairs;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (coin(rng)) pairs.emplace_back(i, j);
  return Relation(a, b, std::move(pairs));
}

/// A bundle E -> base with each fiber of size 0..max_fiber. Total elements are
/// named "<point>.<k>".
inline FinMap random_bundle(Rng& rng, const FinSet& base, std::size_t max_fiber, const std::string& name = "E",
                            std::size_t min_fiber = 0) {
  std::vector<std::string> names;
  std::vector<std::size_t> table;
  for (std::size_t a = 0; a < base.size(); ++a) {
    std::size_t n = uniform(rng, min_fiber, max_fiber);
    for (std::size_t k = 0; k < n; ++k) {
      names.push_back(base[a] + "." + std::to_string(k));
      table.push_back(a);
    }
  }
  return FinMap(FinSet(name, std::move(names)), base, std::move(table));
}

/// A bundle with the given fiber sizes, total elements "<point>.<k>".
inline FinMap bundle_with_fibers(const FinSet& base, const std::vector<std::size_t>& sizes,
                                 const std::string& name = "E") {
  std::vector<std::string> names;
  std::vector<std::size_t> table;
  for (std::size_t a = 0; a < base.size(); ++a) {
    for (std::size_t k = 0; k < sizes[a]; ++k) {
      names.push_back(base[a] + "." + std::to_string(k));
      table.push_back(a);
    }
  }
  return FinMap(FinSet(name, std::move(names)), base, std::move(table));
}

/// A random vertical map into p from a bundle q over the same base: q has fibers
/// of size up to max_fiber wherever p's fiber is nonempty.
inline FinMap random_vertical_source(Rng& rng, const FinMap& p, std::size_t max_fiber, const std::string& name,
                                     FinMap* vertical) {
  auto fib = fibers(p);
  std::vector<std::size_t> sizes(p.cod().size(), 0);
  for (std::size_t a = 0; a < sizes.size(); ++a)
    if (!fib[a].empty()) sizes[a] = uniform(rng, 0, max_fiber);
  FinMap q = bundle_with_fibers(p.cod(), sizes, name);
  std::vector<std::size_t> table(q.dom().size());
  for (std::size_t e = 0; e < table.size(); ++e) {
    const auto& choices = fib[q(e)];
    table[e] = choices[uniform(rng, 0, choices.size() - 1)];
  }
  *vertical = FinMap(q.dom(), p.dom(), std::move(table));
  return q;
}

/// A random vertical map out of q into a new bundle t over the same base: t has
/// fibers of size 1..max_fiber where q's fiber is nonempty, 0..max_fiber elsewhere.
inline FinMap random_vertical_target(Rng& rng, const FinMap& q, std::size_t max_fiber, const std::string& name,
                                     FinMap* vertical) {
  auto fib = fibers(q);
  std::vector<std::size_t> sizes(q.cod().size());
  for (std::size_t a = 0; a < sizes.size(); ++a) sizes[a] = uniform(rng, fib[a].empty() ? 0 : 1, max_fiber);
  FinMap t = bundle_with_fibers(q.cod(), sizes, name);
  auto tf = fibers(t);
  std::vector<std::size_t> table(q.dom().size());
  for (std::size_t e = 0; e < table.size(); ++e) {
    const auto& choices = tf[q(e)];
    table[e] = choices[uniform(rng, 0, choices.size() - 1)];
  }
  *vertical = FinMap(q.dom(), t.dom(), std::move(table));
  return t;
}

/// Random undirected graph: each edge present with probability 1/2.
inline Relation random_graph(Rng& rng, const FinSet& vertices) {
  std::vector<IndexPair> edges;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (std::size_t j = i + 1; j < vertices.size(); ++j)
      if (coin(rng)) edges.emplace_back(i, j);
  return graph_adjacency(vertices, edges);
}

/// A random graph on `vertices` for which f is a graph morphism into `target`:
/// an edge {a, a'} may appear only when f(a), f(a') are equal or adjacent.
inline Relation random_graph_over(Rng& rng, const FinSet& vertices, const FinMap& f, const Relation& target) {
  std::vector<IndexPair> edges;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (std::size_t j = i + 1; j < vertices.size(); ++j)
      if ((f(i) == f(j) || target.related(f(i), f(j))) && coin(rng)) edges.emplace_back(i, j);
  return graph_adjacency(vertices, edges);
}

}  // namespace kjet::gen

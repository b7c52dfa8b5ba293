#pragma once

// Fixture P3: the path graph a - b - c, its radius-1 ball relation, and a bundle
// with fibers of sizes 2, 1, 2.

#include "kjet/finset.hpp"
#include "kjet/relations.hpp"

namespace kjet {

struct P3Fixture {
  FinSet base;
  Relation adjacency;
  EndoRelation ball;
  FinMap bundle;  // {a1, a2, b1, c1, c2} -> {a, b, c}
};

inline P3Fixture p3_fixture() {
  FinSet base("A", {"a", "b", "c"});
  Relation adjacency = graph_adjacency(base, {{0, 1}, {1, 2}});
  EndoRelation ball = ball_relation(adjacency, 1);
  FinSet total("E", {"a1", "a2", "b1", "c1", "c2"});
  FinMap bundle(total, base, {0, 0, 1, 2, 2});
  return P3Fixture{base, adjacency, ball, bundle};
}

}  // namespace kjet

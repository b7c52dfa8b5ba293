#pragma once

// Relations as canonical pair-sets, their monads, morphisms of relations, and the
// reflexive symmetric endo-relations given by balls in a finite graph.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kjet/enumerate.hpp"
#include "kjet/error.hpp"
#include "kjet/finset.hpp"
#include "kjet/kripke.hpp"

namespace kjet {

/// A relation from src to dst, stored as its sorted pair-set in src x dst.
class Relation {
 public:
  Relation(FinSet src, FinSet dst, std::vector<IndexPair> pairs)
      : src_(std::move(src)), dst_(std::move(dst)), pairs_(std::move(pairs)) {
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
    member_.assign(src_.size() * dst_.size(), false);
    for (auto [a, b] : pairs_) {
      require(a < src_.size() && b < dst_.size(), ErrorKind::ShapeMismatch, "relation pair out of range");
      member_[a * dst_.size() + b] = true;
    }
  }

  static Relation diagonal(const FinSet& a) {
    std::vector<IndexPair> pairs;
    for (std::size_t i = 0; i < a.size(); ++i) pairs.emplace_back(i, i);
    return Relation(a, a, std::move(pairs));
  }

  static Relation full(const FinSet& a, const FinSet& b) {
    std::vector<IndexPair> pairs;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) pairs.emplace_back(i, j);
    return Relation(a, b, std::move(pairs));
  }

  /// The class of a jointly monic span src <- M -> dst.
  static Relation from_span(const Span& s) {
    require(is_jointly_monic(s), ErrorKind::NotJointlyMonic, "relation span is not jointly monic");
    std::vector<IndexPair> pairs;
    for (std::size_t m = 0; m < s.apex().size(); ++m) pairs.emplace_back(s.left()(m), s.right()(m));
    return Relation(s.left().cod(), s.right().cod(), std::move(pairs));
  }

  const FinSet& src() const { return src_; }
  const FinSet& dst() const { return dst_; }
  const std::vector<IndexPair>& pairs() const { return pairs_; }
  bool related(std::size_t a, std::size_t b) const { return member_[a * dst_.size() + b]; }

  /// Canonical legs src <- R -> dst, apex elements "(a,b)".
  Span legs() const {
    std::vector<std::string> names;
    std::vector<std::size_t> left, right;
    for (auto [a, b] : pairs_) {
      names.push_back(pair_name(src_[a], dst_[b]));
      left.push_back(a);
      right.push_back(b);
    }
    FinSet apex(src_.name() + "~" + dst_.name(), std::move(names));
    return Span(FinMap(apex, src_, std::move(left)), FinMap(apex, dst_, std::move(right)));
  }

  /// The points of src related to b.
  std::vector<std::size_t> neighbourhood(std::size_t b) const {
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < src_.size(); ++a)
      if (related(a, b)) out.push_back(a);
    return out;
  }

  friend bool operator==(const Relation& r, const Relation& s) {
    return r.pairs_ == s.pairs_ && r.src_ == s.src_ && r.dst_ == s.dst_;
  }

 private:
  FinSet src_;
  FinSet dst_;
  std::vector<IndexPair> pairs_;
  std::vector<bool> member_;
};

/// M(b): the subobject of src at stage dom(b) of points related to b.
inline SubobjectAtStage monad(const Relation& r, const FinMap& b) {
  require(b.cod() == r.dst(), ErrorKind::OverMismatch,
          "monad at an element of '" + b.cod().name() + "', relation ends at '" + r.dst().name() + "'");
  std::vector<IndexPair> pairs;
  for (std::size_t a = 0; a < r.src().size(); ++a)
    for (std::size_t x = 0; x < b.dom().size(); ++x)
      if (r.related(a, b(x))) pairs.emplace_back(a, x);
  return SubobjectAtStage(r.src(), b.dom(), std::move(pairs));
}

inline bool is_reflexive(const Relation& r) {
  if (!(r.src() == r.dst())) return false;
  for (std::size_t a = 0; a < r.src().size(); ++a)
    if (!r.related(a, a)) return false;
  return true;
}

inline bool is_symmetric(const Relation& r) {
  if (!(r.src() == r.dst())) return false;
  for (auto [a, b] : r.pairs())
    if (!r.related(b, a)) return false;
  return true;
}

/// Reflexivity through generalized elements: a0 in_X M(a0) for all a0 at stages up to max_stage.
inline bool is_reflexive_elementwise(const Relation& r, std::size_t max_stage = 2) {
  if (!(r.src() == r.dst())) return false;
  for (std::size_t n = 0; n <= max_stage; ++n) {
    FinSet x = standard_set("X", n);
    FinMap id = identity(x);
    bool ok = true;
    for_each_map(x, r.src(), [&](const FinMap& a0) {
      if (ok && !member(a0, id, monad(r, a0))) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

/// Symmetry through generalized elements: a in_X M(b) iff b in_X M(a).
inline bool is_symmetric_elementwise(const Relation& r, std::size_t max_stage = 2) {
  if (!(r.src() == r.dst())) return false;
  for (std::size_t n = 0; n <= max_stage; ++n) {
    FinSet x = standard_set("X", n);
    FinMap id = identity(x);
    std::vector<FinMap> elements = all_maps(x, r.src());
    for (const auto& a : elements)
      for (const auto& b : elements)
        if (member(a, id, monad(r, b)).has_value() != member(b, id, monad(r, a)).has_value()) return false;
  }
  return true;
}

/// An endo-relation together with its recomputed reflexivity and symmetry.
class EndoRelation {
 public:
  explicit EndoRelation(Relation base) : base_(std::move(base)) {
    require(base_.src() == base_.dst(), ErrorKind::ShapeMismatch, "endo-relation needs equal ends");
    reflexive_ = kjet::is_reflexive(base_);
    symmetric_ = kjet::is_symmetric(base_);
  }

  const Relation& base() const { return base_; }
  const FinSet& carrier() const { return base_.src(); }
  bool reflexive() const { return reflexive_; }
  bool symmetric() const { return symmetric_; }

  friend bool operator==(const EndoRelation& r, const EndoRelation& s) { return r.base_ == s.base_; }

 private:
  Relation base_;
  bool reflexive_ = false;
  bool symmetric_ = false;
};

/// Pairs within graph distance r, where adjacency is a symmetric relation on the vertices.
inline EndoRelation ball_relation(const Relation& adjacency, std::size_t radius) {
  require(adjacency.src() == adjacency.dst(), ErrorKind::ShapeMismatch, "adjacency must be an endo-relation");
  require(is_symmetric(adjacency), ErrorKind::NotSymmetric, "adjacency relation is not symmetric");
  const FinSet& v = adjacency.src();
  std::vector<std::vector<std::size_t>> next(v.size());
  for (auto [a, b] : adjacency.pairs()) next[a].push_back(b);
  std::vector<IndexPair> pairs;
  for (std::size_t s = 0; s < v.size(); ++s) {
    std::vector<std::size_t> dist(v.size(), npos);
    std::deque<std::size_t> queue{s};
    dist[s] = 0;
    while (!queue.empty()) {
      std::size_t u = queue.front();
      queue.pop_front();
      if (dist[u] == radius) continue;
      for (std::size_t w : next[u]) {
        if (dist[w] == npos) {
          dist[w] = dist[u] + 1;
          queue.push_back(w);
        }
      }
    }
    for (std::size_t t = 0; t < v.size(); ++t)
      if (dist[t] != npos) pairs.emplace_back(s, t);
  }
  return EndoRelation(Relation(v, v, std::move(pairs)));
}

/// Relational composite: (a, c) whenever (a, b) in first and (b, c) in second.
inline Relation relation_compose(const Relation& first, const Relation& second) {
  require(first.dst() == second.src(), ErrorKind::CompositionMismatch, "relations do not compose");
  std::vector<IndexPair> pairs;
  for (auto [a, b] : first.pairs())
    for (std::size_t c = 0; c < second.dst().size(); ++c)
      if (second.related(b, c)) pairs.emplace_back(a, c);
  return Relation(first.src(), second.dst(), std::move(pairs));
}

inline bool relation_leq(const Relation& r, const Relation& s) {
  require(r.src() == s.src() && r.dst() == s.dst(), ErrorKind::ShapeMismatch, "relations with different ends");
  return std::includes(s.pairs().begin(), s.pairs().end(), r.pairs().begin(), r.pairs().end());
}

/// A pair of maps (f, f0) carrying rel_src into rel_dst.
struct RelationMorphism {
  FinMap f;
  FinMap f0;
  Relation rel_src;
  Relation rel_dst;
};

/// Pair-set form of preservation: (a, a0) related implies (f a, f0 a0) related.
inline bool preserves_pairwise(const FinMap& f, const FinMap& f0, const Relation& r_a, const Relation& r_b) {
  for (auto [a, a0] : r_a.pairs())
    if (!r_b.related(f(a), f0(a0))) return false;
  return true;
}

/// Elementwise form at a stage: M_A(a0) <= f^-1(M_B(f0 a0)).
inline bool preserves_at(const FinMap& f, const FinMap& f0, const Relation& r_a, const Relation& r_b,
                         const FinMap& a0) {
  return sub_leq(monad(r_a, a0), counterimage(f, monad(r_b, compose(f0, a0))));
}

/// The morphism of relations (f, f0), if it preserves the relations.
///
/// Both formulations are evaluated; the elementwise one at the generic element
/// id_{A0}. A disagreement is a logic error.
inline std::optional<RelationMorphism> check_preserves(const FinMap& f, const FinMap& f0, const Relation& r_a,
                                                        const Relation& r_b) {
  require(f.dom() == r_a.src() && f0.dom() == r_a.dst(), ErrorKind::ShapeMismatch,
          "maps do not start at the source relation's ends");
  require(f.cod() == r_b.src() && f0.cod() == r_b.dst(), ErrorKind::ShapeMismatch,
          "maps do not end at the target relation's ends");
  bool pairwise = preserves_pairwise(f, f0, r_a, r_b);
  bool elementwise = preserves_at(f, f0, r_a, r_b, identity(r_a.dst()));
  if (pairwise != elementwise) throw std::logic_error("preservation criteria disagree");
  if (!pairwise) return std::nullopt;
  return RelationMorphism{f, f0, r_a, r_b};
}

inline RelationMorphism compose(const RelationMorphism& second, const RelationMorphism& first) {
  require(first.rel_dst == second.rel_src, ErrorKind::CompositionMismatch, "relation morphisms do not compose");
  return RelationMorphism{compose(second.f, first.f), compose(second.f0, first.f0), first.rel_src, second.rel_dst};
}

inline RelationMorphism identity_morphism(const Relation& r) {
  return RelationMorphism{identity(r.src()), identity(r.dst()), r, r};
}

/// Symmetric adjacency from an undirected edge list (vertex indices).
inline Relation graph_adjacency(const FinSet& vertices, const std::vector<IndexPair>& edges) {
  std::vector<IndexPair> pairs;
  for (auto [a, b] : edges) {
    pairs.emplace_back(a, b);
    pairs.emplace_back(b, a);
  }
  return Relation(vertices, vertices, std::move(pairs));
}

}  // namespace kjet

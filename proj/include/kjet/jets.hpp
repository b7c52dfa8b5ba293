#pragma once

// Section jets relative to a relation R from A to A0, the maps phi between jet sets
// induced by morphisms of relations, and the jet bundle J(p) -> A0 with its
// generic section jet.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kjet/enumerate.hpp"
#include "kjet/error.hpp"
#include "kjet/finset.hpp"
#include "kjet/kripke.hpp"
#include "kjet/relations.hpp"

namespace kjet {

/// A partial section of p with support exactly M(at).
struct SectionJet {
  FinMap at;
  PartialSection section;

  const FinMap& bundle() const { return section.bundle(); }
  const FinSet& stage() const { return at.dom(); }

  friend bool operator==(const SectionJet& x, const SectionJet& y) {
    return x.at == y.at && x.section == y.section;
  }
};

inline SectionJet make_section_jet(const Relation& r, FinMap at, PartialSection section) {
  require(section.support() == monad(r, at), ErrorKind::ShapeMismatch, "jet support is not the monad M(at)");
  return SectionJet{std::move(at), std::move(section)};
}

/// alpha*(j): the jet at b alpha.
inline SectionJet change_of_stage(const SectionJet& j, const FinMap& alpha) {
  return SectionJet{compose(j.at, alpha), PartialSection(change_of_stage(j.section.map(), alpha), j.bundle())};
}

/// J(b, r) for a vertical r: F -> E over A, i.e. postcomposition with r.
inline SectionJet jet_postcompose(const SectionJet& j, const FinMap& r, const FinMap& p) {
  require(compose(p, r) == j.bundle(), ErrorKind::NotVertical, "postcomposed map is not vertical");
  return SectionJet{j.at, PartialSection(postcompose(r, j.section.map()), p)};
}

/// Fiber choices for every pair of M(b), in pair order.
inline std::vector<std::vector<std::size_t>> jet_choices(const SubobjectAtStage& support, const FinMap& p) {
  auto fib = fibers(p);
  std::vector<std::vector<std::size_t>> choices;
  choices.reserve(support.size());
  for (auto [a, x] : support.pairs()) choices.push_back(fib[a]);
  return choices;
}

/// J_R(b, p), in lexicographic order of the value tables.
inline std::vector<SectionJet> enumerate_jets(const Relation& r, const FinMap& b, const FinMap& p) {
  require(p.cod() == r.src(), ErrorKind::ShapeMismatch, "bundle is not over the relation's source");
  SubobjectAtStage support = monad(r, b);
  std::vector<SectionJet> out;
  for_each_choice(jet_choices(support, p), [&](const std::vector<std::size_t>& table) {
    out.push_back(SectionJet{b, PartialSection(PartialMapAtStage(support, p.dom(), table), p)});
  });
  return out;
}

/// A morphism of relations together with a pullback square along its first component.
struct PhiContext {
  RelationMorphism morphism;
  PullbackSquare square;
};

inline PhiContext make_phi_context(const RelationMorphism& morphism, const FinMap& p) {
  return PhiContext{morphism, canonical_square(morphism.f, p)};
}

inline PhiContext make_phi_context(const RelationMorphism& morphism, PullbackSquare square) {
  require(square.base() == morphism.f, ErrorKind::ShapeMismatch, "square is not along the morphism's map");
  return PhiContext{morphism, std::move(square)};
}

/// phi(a0, h): J_B(f0 a0, p) -> J_A(a0, p').
///
/// The result is built from the law (a, alpha) |-> <a, j(f(a))> through
/// yoneda_construct and then compared against the direct table.
inline SectionJet phi(const PhiContext& ctx, const FinMap& a0, const SectionJet& j) {
  const RelationMorphism& m = ctx.morphism;
  const PullbackSquare& h = ctx.square;
  require(j.at == compose(m.f0, a0), ErrorKind::ShapeMismatch, "jet is not based at f0(a0)");
  require(j.bundle() == h.bundle(), ErrorKind::ShapeMismatch, "jet is not a jet of the square's bundle");
  SubobjectAtStage support = monad(m.rel_src, a0);
  const PartialMapAtStage& section = j.section.map();
  for (auto [a, x] : support.pairs())
    require(section.support().contains(m.f(a), x), ErrorKind::PreservationViolated,
            "f(" + support.over()[a] + ") leaves the monad at stage element '" + support.stage()[x] + "'");

  Law sigma = [&](const FinMap& a, const FinMap& alpha) {
    return h.pair(a, value(section, compose(m.f, a), alpha));
  };
  PartialMapAtStage built = yoneda_construct(support, h.apex(), sigma);

  std::vector<std::size_t> direct;
  direct.reserve(support.size());
  for (auto [a, x] : support.pairs()) direct.push_back(h.pair(a, section.at(m.f(a), x)));
  if (built.values() != direct) throw std::logic_error("phi: law construction disagrees with the table");

  return SectionJet{a0, PartialSection(std::move(built), h.left())};
}

/// The two stacked morphisms of relations, outer (g, g0) and inner (f, f0), with
/// `outer.square` a pullback of p along g and `inner.square` a pullback of the
/// resulting p' along f. True iff phi(a0, h) phi(f0 a0, k) = phi(a0, pasted square)
/// on every jet of J_C(g0 f0 a0, p).
inline bool phi_compose_check(const PhiContext& outer, const PhiContext& inner, const FinMap& a0) {
  require(inner.square.bundle() == outer.square.left(), ErrorKind::ShapeMismatch, "squares do not stack");
  PhiContext composite = make_phi_context(compose(outer.morphism, inner.morphism), paste(inner.square, outer.square));
  FinMap mid = compose(inner.morphism.f0, a0);
  FinMap base = compose(outer.morphism.f0, mid);
  for (const SectionJet& j : enumerate_jets(outer.morphism.rel_dst, base, outer.square.bundle())) {
    SectionJet stepwise = phi(inner, a0, phi(outer, mid, j));
    SectionJet direct = phi(composite, a0, j);
    if (!(stepwise == direct)) return false;
  }
  return true;
}

/// The section-jet bundle J(p) -> A0 with its generic section jet.
///
/// Total elements are "(a0|a:e,...)", listing the jet's value on each point of
/// M(a0) in order; they are ordered by a0, then lexicographically by table.
class JetBundle {
 public:
  JetBundle(Relation relation, FinMap bundle) : relation_(std::move(relation)), bundle_(std::move(bundle)) {
    require(bundle_.cod() == relation_.src(), ErrorKind::ShapeMismatch, "bundle is not over the relation's source");
    const FinSet& a = relation_.src();
    const FinSet& a0 = relation_.dst();
    const FinSet& e = bundle_.dom();
    auto fib = fibers(bundle_);
    std::vector<std::string> names;
    std::vector<std::size_t> proj;
    neighbourhoods_.resize(a0.size());
    for (std::size_t b = 0; b < a0.size(); ++b) {
      neighbourhoods_[b] = relation_.neighbourhood(b);
      std::vector<std::vector<std::size_t>> choices;
      for (std::size_t x : neighbourhoods_[b]) choices.push_back(fib[x]);
      for_each_choice(choices, [&](const std::vector<std::size_t>& table) {
        std::string name = "(" + a0[b] + "|";
        for (std::size_t k = 0; k < table.size(); ++k) {
          if (k) name += ',';
          name += a[neighbourhoods_[b][k]] + ":" + e[table[k]];
        }
        name += ")";
        index_.emplace(std::make_pair(b, table), names.size());
        names.push_back(std::move(name));
        proj.push_back(b);
        tables_.push_back(table);
      });
    }
    total_ = FinSet("J(" + e.name() + ")", std::move(names));
    projection_ = FinMap(total_, a0, std::move(proj));

    SubobjectAtStage support = monad(relation_, projection_);
    std::vector<std::size_t> values;
    values.reserve(support.size());
    for (auto [x, t] : support.pairs()) values.push_back(tables_[t][position(projection_(t), x)]);
    generic_.emplace(PartialMapAtStage(std::move(support), e, std::move(values)), bundle_);
  }

  const Relation& relation() const { return relation_; }
  const FinMap& bundle() const { return bundle_; }
  const FinSet& total() const { return total_; }
  const FinMap& projection() const { return projection_; }

  /// The generic section jet, at stage total() over projection().
  SectionJet generic() const { return SectionJet{projection_, *generic_}; }
  const PartialSection& generic_section() const { return *generic_; }

  const std::vector<std::size_t>& neighbourhood(std::size_t a0) const { return neighbourhoods_[a0]; }
  const std::vector<std::size_t>& table(std::size_t t) const { return tables_[t]; }

  std::optional<std::size_t> find(std::size_t a0, const std::vector<std::size_t>& table) const {
    auto it = index_.find(std::make_pair(a0, table));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::size_t> fiber_sizes() const {
    std::vector<std::size_t> out(relation_.dst().size(), 0);
    for (std::size_t t = 0; t < total_.size(); ++t) ++out[projection_(t)];
    return out;
  }

  /// Position of x within neighbourhood(a0).
  std::size_t position(std::size_t a0, std::size_t x) const {
    const auto& n = neighbourhoods_[a0];
    for (std::size_t k = 0; k < n.size(); ++k)
      if (n[k] == x) return k;
    fail(ErrorKind::NotInSupport, "point is not in the monad");
  }

 private:
  Relation relation_;
  FinMap bundle_;
  FinSet total_;
  FinMap projection_;
  std::optional<PartialSection> generic_;
  std::vector<std::vector<std::size_t>> neighbourhoods_;
  std::vector<std::vector<std::size_t>> tables_;
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::size_t> index_;
};

inline JetBundle jet_bundle(const Relation& r, const FinMap& p) { return JetBundle(r, p); }

/// The classifying map of j: x |-> (a0(x), a |-> j(a, x)).
inline FinMap classify(const JetBundle& jb, const SectionJet& j) {
  require(j.at.cod() == jb.relation().dst(), ErrorKind::ShapeMismatch, "jet is not based in A0");
  require(j.bundle() == jb.bundle(), ErrorKind::ShapeMismatch, "jet of a different bundle");
  require(j.section.support() == monad(jb.relation(), j.at), ErrorKind::ShapeMismatch,
          "jet support is not the monad");
  const FinSet& x = j.stage();
  std::vector<std::size_t> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::size_t b = j.at(i);
    std::vector<std::size_t> table;
    for (std::size_t a : jb.neighbourhood(b)) table.push_back(j.section.map().at(a, i));
    out[i] = *jb.find(b, table);
  }
  return FinMap(x, jb.total(), std::move(out));
}

/// hbar*(eps): the jet classified by a map into the total space.
inline SectionJet classified_jet(const JetBundle& jb, const FinMap& h) {
  return change_of_stage(jb.generic(), h);
}

/// Representing object of a0 |-> J(g a0, q) is g*(J(q)): checks the bijection
/// J(g a0, q) ~ maps over A0 from a0 into the pullback, for all a0 at stages up to
/// max_stage, constructing both directions and both roundtrips.
inline bool beck_chevalley_check(const FinMap& g, const Relation& r, const FinMap& q, std::size_t max_stage = 2) {
  require(g.cod() == r.dst(), ErrorKind::ShapeMismatch, "g does not land in the relation's base");
  JetBundle jb(r, q);
  PullbackResult pb = pullback(g, jb.projection());
  for (std::size_t n = 0; n <= max_stage; ++n) {
    FinSet x = standard_set("X", n);
    bool ok = true;
    for_each_map(x, g.dom(), [&](const FinMap& a0) {
      if (!ok) return;
      FinMap base = compose(g, a0);
      std::vector<SectionJet> jets = enumerate_jets(r, base, q);
      std::map<std::vector<std::size_t>, std::size_t> forward;
      for (std::size_t k = 0; k < jets.size(); ++k) {
        FinMap h = pair_into_pullback(a0, classify(jb, jets[k]), pb);
        if (!(compose(pb.to_left, h) == a0)) ok = false;
        if (!(classified_jet(jb, compose(pb.to_right, h)) == jets[k])) ok = false;
        auto table = std::vector<std::size_t>(h.table().begin(), h.table().end());
        if (!forward.emplace(table, k).second) ok = false;
      }
      std::size_t homs = 0;
      for_each_map(x, pb.apex, [&](const FinMap& h) {
        if (!(compose(pb.to_left, h) == a0)) return;
        ++homs;
        SectionJet j = classified_jet(jb, compose(pb.to_right, h));
        if (!(j.at == base)) ok = false;
        auto it = forward.find(std::vector<std::size_t>(h.table().begin(), h.table().end()));
        if (it == forward.end() || !(jets[it->second] == j)) ok = false;
      });
      if (homs != jets.size()) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

/// J on a vertical r: q -> p over A: (a0, s) |-> (a0, r s).
inline FinMap jet_on_vertical(const JetBundle& jq, const JetBundle& jp, const FinMap& r) {
  require(jq.relation() == jp.relation(), ErrorKind::ShapeMismatch, "jet bundles for different relations");
  require(r.dom() == jq.bundle().dom() && r.cod() == jp.bundle().dom(), ErrorKind::ShapeMismatch,
          "vertical map has the wrong ends");
  require(compose(jp.bundle(), r) == jq.bundle(), ErrorKind::NotVertical, "map is not vertical over A");
  std::vector<std::size_t> out(jq.total().size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    std::vector<std::size_t> table = jq.table(t);
    for (auto& v : table) v = r(v);
    out[t] = *jp.find(jq.projection()(t), table);
  }
  return FinMap(jq.total(), jp.total(), std::move(out));
}

/// The stacked squares h (pullback of p along f) and k (pullback of q = p r along f),
/// with the induced vertical r': F' -> E'. True iff J(r') phi(a0, k) = phi(a0, h) J(r)
/// on every jet of J_B(f a0, q).
inline bool cluex_check(const EndoRelation& r_a, const EndoRelation& r_b, const FinMap& f, const FinMap& p,
                        const FinMap& r, const FinMap& a0) {
  auto morphism = check_preserves(f, f, r_a.base(), r_b.base());
  require(morphism.has_value(), ErrorKind::PreservationViolated, "base map does not preserve the relations");
  require(r.cod() == p.dom(), ErrorKind::ShapeMismatch, "r does not land in the total space of p");
  FinMap q = compose(p, r);
  PhiContext h = make_phi_context(*morphism, p);
  PhiContext k = make_phi_context(*morphism, q);
  std::vector<std::size_t> induced(k.square.apex().size());
  for (std::size_t w = 0; w < induced.size(); ++w)
    induced[w] = h.square.pair(k.square.left()(w), r(k.square.right()(w)));
  FinMap r_prime(k.square.apex(), h.square.apex(), std::move(induced));

  for (const SectionJet& j : enumerate_jets(r_b.base(), compose(f, a0), q)) {
    SectionJet upper = jet_postcompose(phi(k, a0, j), r_prime, h.square.left());
    SectionJet lower = phi(h, a0, jet_postcompose(j, r, p));
    if (!(upper == lower)) return false;
  }
  return true;
}

/// j(a0) for a jet j at a0 of a reflexive relation.
inline FinMap reflexive_value(const EndoRelation& r, const SectionJet& j) {
  require(r.reflexive(), ErrorKind::NotReflexive, "relation is not reflexive");
  return value(j.section.map(), j.at, identity(j.stage()));
}

}  // namespace kjet

#pragma once

// The fibrewise dual of the codomain fibration. A comorphism p' -> p over f: A' -> A
// is a class of vh-spans p' <-v- . -h-> p with h Cartesian over f; its canonical
// representative takes h to be the canonical pullback square, so a comorphism is
// just a vertical map f*(p) -> p'.

#include <cstddef>
#include <map>
#include <set>
#include <vector>

#include "kjet/enumerate.hpp"
#include "kjet/error.hpp"
#include "kjet/finset.hpp"
#include "kjet/jets.hpp"
#include "kjet/polyfun.hpp"
#include "kjet/relations.hpp"

namespace kjet {

class Comorphism {
 public:
  /// `vertical` is a table f*(dst) -> src, where f*(dst) is the canonical pullback.
  Comorphism(FinMap over, Bundle src, Bundle dst, FinMap vertical)
      : over_(std::move(over)), src_(std::move(src)), dst_(std::move(dst)) {
    require(over_.dom() == src_.base() && over_.cod() == dst_.base(), ErrorKind::ShapeMismatch,
            "bundles are not over the ends of the base map");
    vertical_.emplace(pullback_bundle(over_, dst_), src_, std::move(vertical));
  }

  const FinMap& over() const { return over_; }
  const Bundle& src() const { return src_; }
  const Bundle& dst() const { return dst_; }
  /// f*(dst) -> src over A'.
  const SliceMorphism& vertical() const { return *vertical_; }

  friend bool operator==(const Comorphism& x, const Comorphism& y) {
    return x.over_ == y.over_ && x.src_ == y.src_ && x.dst_ == y.dst_ && *x.vertical_ == *y.vertical_;
  }

 private:
  FinMap over_;
  Bundle src_;
  Bundle dst_;
  std::optional<SliceMorphism> vertical_;
};

/// id*(p) -> p, (a, e) |-> e.
inline FinMap identity_pullback_projection(const Bundle& p) {
  return pullback(identity(p.base()), p.map()).to_right;
}

inline Comorphism identity_comorphism(const Bundle& p) {
  return Comorphism(identity(p.base()), p, p, identity_pullback_projection(p));
}

/// The Cartesian comorphism f*(p) -> p over f, with identity vertical part.
inline Comorphism cartesian_comorphism(const FinMap& f, const Bundle& p) {
  Bundle pulled = pullback_bundle(f, p);
  return Comorphism(f, pulled, p, identity(pulled.total()));
}

/// A vertical u: p -> p' read as a comorphism p' -> p over the identity.
inline Comorphism vertical_comorphism(const SliceMorphism& u) {
  return Comorphism(identity(u.src().base()), u.dst(), u.src(),
                    compose(u.arrow(), identity_pullback_projection(u.src())));
}

/// second after first, where first: p'' -> p' over f and second: p' -> p over g.
inline Comorphism comorphism_compose(const Comorphism& second, const Comorphism& first) {
  require(first.dst() == second.src(), ErrorKind::ChainMismatch, "comorphisms do not form a chain");
  const FinMap& f = first.over();
  const FinMap& g = second.over();
  FinMap gf = compose(g, f);
  PullbackResult outer = pullback(gf, second.dst().map());
  PullbackResult second_pb = pullback(g, second.dst().map());
  PullbackResult first_pb = pullback(f, first.dst().map());
  std::vector<std::size_t> table(outer.apex.size());
  for (std::size_t w = 0; w < table.size(); ++w) {
    std::size_t a2 = outer.to_left(w);
    std::size_t mid = second.vertical().arrow()(*second_pb.pair_index(f(a2), outer.to_right(w)));
    table[w] = first.vertical().arrow()(*first_pb.pair_index(a2, mid));
  }
  return Comorphism(gf, first.src(), second.dst(), FinMap(outer.apex, first.src().total(), std::move(table)));
}

inline bool is_cartesian(const Comorphism& c) { return is_bijective(c.vertical().arrow()); }

/// Phi(h) for the canonical square h of p along f, as a comorphism
/// J_{A'}(f*(p)) -> J_A(p) over f: the map f*(J(p)) -> J(f*(p)) classifying phi
/// applied to the generic jet pulled back to f*(J(p)).
inline Comorphism jet_phi_comorphism(const FinMap& f, const Bundle& p, const EndoRelation& r_src,
                                     const EndoRelation& r_dst) {
  auto morphism = check_preserves(f, f, r_src.base(), r_dst.base());
  require(morphism.has_value(), ErrorKind::PreservationViolated, "base map does not preserve the relations");
  JetBundle jp(r_dst.base(), p.map());
  PhiContext ctx = make_phi_context(*morphism, p.map());
  JetBundle jpulled(r_src.base(), ctx.square.left());
  PullbackResult stage = pullback(f, jp.projection());
  SectionJet pulled_generic = change_of_stage(jp.generic(), stage.to_right);
  SectionJet image = phi(ctx, stage.to_left, pulled_generic);
  FinMap vertical = classify(jpulled, image);
  return Comorphism(f, Bundle(jpulled.projection()), Bundle(jp.projection()), std::move(vertical));
}

/// The global jet functor on comorphisms, for endo-relations on the two bases
/// preserved by the base map. A comorphism factors as its vertical part followed
/// by a Cartesian one; J sends the first to J of the vertical (reversed) and the
/// second to Phi(h).
inline Comorphism global_jet(const Comorphism& c, const EndoRelation& r_src, const EndoRelation& r_dst) {
  require(r_src.carrier() == c.src().base() && r_dst.carrier() == c.dst().base(), ErrorKind::ShapeMismatch,
          "relations are not on the comorphism's bases");
  const FinMap& f = c.over();
  require(check_preserves(f, f, r_src.base(), r_dst.base()).has_value(), ErrorKind::PreservationViolated,
          "base map does not preserve the relations");
  const SliceMorphism& v = c.vertical();
  JetBundle j_pulled(r_src.base(), v.src().map());
  JetBundle j_src(r_src.base(), v.dst().map());
  SliceMorphism jv(Bundle(j_pulled.projection()), Bundle(j_src.projection()), jet_on_vertical(j_pulled, j_src, v.arrow()));
  Comorphism vertical_part = vertical_comorphism(jv);
  Comorphism cartesian_part = jet_phi_comorphism(f, c.dst(), r_src, r_dst);
  return comorphism_compose(cartesian_part, vertical_part);
}

/// J(p) as a bundle over A0 for an endo-relation, for comparing with global_jet results.
inline Bundle jet_bundle_of(const EndoRelation& r, const Bundle& p) {
  return Bundle(JetBundle(r.base(), p.map()).projection());
}

struct TerminalityReport {
  bool terminal = true;
  std::size_t codomains = 0;   // bundles t over A0 tried
  std::size_t comorphisms = 0;  // comorphisms q -> t over d tried
};

/// Fiber-size vectors of length n with total at most bound.
inline std::vector<std::vector<std::size_t>> bounded_fiber_vectors(std::size_t n, std::size_t bound) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> current(n, 0);
  auto rec = [&](auto&& self, std::size_t i, std::size_t left) -> void {
    if (i == n) {
      out.push_back(current);
      return;
    }
    for (std::size_t k = 0; k <= left; ++k) {
      current[i] = k;
      self(self, i + 1, left - k);
    }
    current[i] = 0;
  };
  rec(rec, 0, bound);
  return out;
}

/// Is `candidate` (a comorphism q -> J over d) terminal among comorphisms over d
/// with domain q? For every codomain t over B with total at most `bound` (one per
/// isomorphism class of fiber sizes) and every comorphism e: q -> t, there must be
/// exactly one vertical w: t -> J with candidate's vertical after d*(w) equal to e.
inline TerminalityReport comorphism_is_terminal(const Comorphism& candidate, std::size_t bound) {
  const FinMap& d = candidate.over();
  const Bundle& q = candidate.src();
  const Bundle& jet = candidate.dst();
  TerminalityReport report;
  for (const auto& sizes : bounded_fiber_vectors(d.cod().size(), bound)) {
    Bundle t = standard_bundle(d.cod(), sizes);
    ++report.codomains;
    Bundle pulled = pullback_bundle(d, t);
    std::map<std::vector<std::size_t>, std::size_t> mediated;
    for (const SliceMorphism& w : enumerate_slice_morphisms(t, jet)) {
      SliceMorphism e = compose(candidate.vertical(), pullback_morphism(d, w));
      ++mediated[std::vector<std::size_t>(e.arrow().table().begin(), e.arrow().table().end())];
    }
    for (const SliceMorphism& e : enumerate_slice_morphisms(pulled, q)) {
      ++report.comorphisms;
      auto it = mediated.find(std::vector<std::size_t>(e.arrow().table().begin(), e.arrow().table().end()));
      if (it == mediated.end() || it->second != 1) report.terminal = false;
    }
    for (const auto& [table, count] : mediated)
      if (count != 1) report.terminal = false;
  }
  return report;
}

/// The generic section jet as a comorphism c*(p) -> J(p) over d: the vertical
/// d*(J(p)) -> c*(p) sends (m, t) to (m, eps(c(m), t)).
inline Comorphism generic_jet_comorphism(const Span& legs, const JetBundle& jb) {
  const FinMap& c = legs.left();
  const FinMap& d = legs.right();
  PullbackResult q = pullback(c, jb.bundle());
  Bundle jet(jb.projection());
  PullbackResult pulled = pullback(d, jet.map());
  const PartialMapAtStage& eps = jb.generic_section().map();
  std::vector<std::size_t> table(pulled.apex.size());
  for (std::size_t w = 0; w < table.size(); ++w) {
    std::size_t m = pulled.to_left(w);
    std::size_t t = pulled.to_right(w);
    table[w] = *q.pair_index(m, eps.at(c(m), t));
  }
  return Comorphism(d, Bundle(q.to_left), jet, FinMap(pulled.apex, q.apex, std::move(table)));
}

/// Terminality of the generic section jet among comorphisms over d with domain
/// c*(p), for a jointly monic span (c, d), checked against codomains up to `bound`.
inline TerminalityReport distributivity_terminal(const FinMap& c, const FinMap& d, const Bundle& p,
                                                 std::size_t bound = 4) {
  Span legs(c, d);
  Relation r = Relation::from_span(legs);
  JetBundle jb(r, p.map());
  return comorphism_is_terminal(generic_jet_comorphism(legs, jb), bound);
}

}  // namespace kjet

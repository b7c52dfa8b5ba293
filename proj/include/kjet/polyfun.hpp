#pragma once

// Slices over finite sets: pullback functors, dependent products (right adjoints
// to pullback), the adjunction bijection, the polynomial jet functor d_* c^*, and
// the mate 2-cell attached to a morphism of spans.

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
#include "kjet/jets.hpp"

namespace kjet {

/// An object of the slice over base(): a map total() -> base().
class Bundle {
 public:
  Bundle() = default;
  explicit Bundle(FinMap map) : map_(std::move(map)) {}

  const FinMap& map() const { return map_; }
  const FinSet& total() const { return map_.dom(); }
  const FinSet& base() const { return map_.cod(); }

  friend bool operator==(const Bundle& x, const Bundle& y) { return x.map_ == y.map_; }

 private:
  FinMap map_;
};

/// A bundle over `base` with the given fiber sizes; elements "t0", "t1", ...
inline Bundle standard_bundle(const FinSet& base, const std::vector<std::size_t>& fiber_sizes,
                              const std::string& name = "T") {
  std::vector<std::size_t> table;
  for (std::size_t b = 0; b < fiber_sizes.size(); ++b)
    for (std::size_t k = 0; k < fiber_sizes[b]; ++k) table.push_back(b);
  FinSet total = standard_set(name, table.size(), "t");
  return Bundle(FinMap(total, base, std::move(table)));
}

/// A vertical arrow src -> dst over a common base.
class SliceMorphism {
 public:
  SliceMorphism(Bundle src, Bundle dst, FinMap arrow)
      : src_(std::move(src)), dst_(std::move(dst)), arrow_(std::move(arrow)) {
    require(src_.base() == dst_.base(), ErrorKind::ShapeMismatch, "bundles over different bases");
    require(arrow_.dom() == src_.total() && arrow_.cod() == dst_.total(), ErrorKind::ShapeMismatch,
            "arrow has the wrong ends");
    require(compose(dst_.map(), arrow_) == src_.map(), ErrorKind::NotVertical, "arrow is not vertical");
  }

  const Bundle& src() const { return src_; }
  const Bundle& dst() const { return dst_; }
  const FinMap& arrow() const { return arrow_; }

  friend bool operator==(const SliceMorphism& x, const SliceMorphism& y) {
    return x.arrow_ == y.arrow_ && x.src_ == y.src_ && x.dst_ == y.dst_;
  }

 private:
  Bundle src_;
  Bundle dst_;
  FinMap arrow_;
};

inline SliceMorphism identity(const Bundle& p) { return SliceMorphism(p, p, identity(p.total())); }

inline SliceMorphism compose(const SliceMorphism& second, const SliceMorphism& first) {
  require(first.dst() == second.src(), ErrorKind::CompositionMismatch, "slice morphisms do not compose");
  return SliceMorphism(first.src(), second.dst(), compose(second.arrow(), first.arrow()));
}

/// Every vertical arrow src -> dst, in lexicographic order of tables.
inline std::vector<SliceMorphism> enumerate_slice_morphisms(const Bundle& src, const Bundle& dst) {
  require(src.base() == dst.base(), ErrorKind::ShapeMismatch, "bundles over different bases");
  auto fib = fibers(dst.map());
  std::vector<std::vector<std::size_t>> choices;
  for (std::size_t e = 0; e < src.total().size(); ++e) choices.push_back(fib[src.map()(e)]);
  std::vector<SliceMorphism> out;
  for_each_choice(choices, [&](const std::vector<std::size_t>& table) {
    out.emplace_back(src, dst, FinMap(src.total(), dst.total(), table));
  });
  return out;
}

inline std::size_t count_slice_morphisms(const Bundle& src, const Bundle& dst) {
  auto fib = fibers(dst.map());
  std::size_t n = 1;
  for (std::size_t e = 0; e < src.total().size(); ++e) n *= fib[src.map()(e)].size();
  return n;
}

/// f*(p): the canonical pullback, total {(a', e) | f(a') = p(e)}.
inline Bundle pullback_bundle(const FinMap& f, const Bundle& p) { return Bundle(pullback(f, p.map()).to_left); }

/// f* on arrows: (a', e) |-> (a', u(e)).
inline SliceMorphism pullback_morphism(const FinMap& f, const SliceMorphism& u) {
  PullbackResult src = pullback(f, u.src().map());
  PullbackResult dst = pullback(f, u.dst().map());
  std::vector<std::size_t> table(src.apex.size());
  for (std::size_t w = 0; w < table.size(); ++w)
    table[w] = *dst.pair_index(src.to_left(w), u.arrow()(src.to_right(w)));
  return SliceMorphism(Bundle(src.to_left), Bundle(dst.to_left), FinMap(src.apex, dst.apex, std::move(table)));
}

/// The comparison (f g)*(p) -> g*(f*(p)), (a'', e) |-> (a'', (g(a''), e)); an isomorphism over A''.
inline SliceMorphism pullback_reassociation(const FinMap& g, const FinMap& f, const Bundle& p) {
  PullbackResult once = pullback(compose(f, g), p.map());
  PullbackResult inner = pullback(f, p.map());
  PullbackResult twice = pullback(g, inner.to_left);
  std::vector<std::size_t> table(once.apex.size());
  for (std::size_t w = 0; w < table.size(); ++w) {
    std::size_t a2 = once.to_left(w);
    table[w] = *twice.pair_index(a2, *inner.pair_index(g(a2), once.to_right(w)));
  }
  return SliceMorphism(Bundle(once.to_left), Bundle(twice.to_left), FinMap(once.apex, twice.apex, std::move(table)));
}

/// d_*(q) for d: M -> B and q over M, with its counit d*(d_* q) -> q.
///
/// Total elements are "(b|m:e,...)": a section of q over d^-1(b), listed in the
/// order of d^-1(b).
class DependentProduct {
 public:
  DependentProduct(FinMap along, Bundle input) : along_(std::move(along)), input_(std::move(input)) {
    require(input_.base() == along_.dom(), ErrorKind::ShapeMismatch, "input bundle is not over dom(d)");
    const FinSet& b = along_.cod();
    const FinSet& m = along_.dom();
    const FinSet& e = input_.total();
    preimages_ = fibers(along_);
    auto fib = fibers(input_.map());
    std::vector<std::string> names;
    std::vector<std::size_t> proj;
    for (std::size_t y = 0; y < b.size(); ++y) {
      std::vector<std::vector<std::size_t>> choices;
      for (std::size_t x : preimages_[y]) choices.push_back(fib[x]);
      for_each_choice(choices, [&](const std::vector<std::size_t>& table) {
        std::string name = "(" + b[y] + "|";
        for (std::size_t k = 0; k < table.size(); ++k) {
          if (k) name += ',';
          name += m[preimages_[y][k]] + ":" + e[table[k]];
        }
        name += ")";
        index_.emplace(std::make_pair(y, table), names.size());
        names.push_back(std::move(name));
        proj.push_back(y);
        tables_.push_back(table);
      });
    }
    FinSet total("Pi(" + e.name() + ")", std::move(names));
    result_ = Bundle(FinMap(total, b, std::move(proj)));

    position_.assign(m.size(), 0);
    for (const auto& pre : preimages_)
      for (std::size_t k = 0; k < pre.size(); ++k) position_[pre[k]] = k;

    PullbackResult pb = pullback(along_, result_.map());
    std::vector<std::size_t> counit(pb.apex.size());
    for (std::size_t w = 0; w < counit.size(); ++w) counit[w] = tables_[pb.to_right(w)][position_[pb.to_left(w)]];
    counit_.emplace(Bundle(pb.to_left), input_, FinMap(pb.apex, e, std::move(counit)));
  }

  const FinMap& along() const { return along_; }
  const Bundle& input() const { return input_; }
  const Bundle& result() const { return result_; }
  /// Evaluation (m, (b, s)) |-> s(m).
  const SliceMorphism& counit() const { return *counit_; }

  const std::vector<std::size_t>& table(std::size_t t) const { return tables_[t]; }
  const std::vector<std::size_t>& preimage(std::size_t b) const { return preimages_[b]; }
  std::size_t position(std::size_t m) const { return position_[m]; }

  std::optional<std::size_t> find(std::size_t b, const std::vector<std::size_t>& table) const {
    auto it = index_.find(std::make_pair(b, table));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t find_or_throw(std::size_t b, const std::vector<std::size_t>& table) const {
    auto t = find(b, table);
    require(t.has_value(), ErrorKind::ShapeMismatch, "table is not a section over the fiber");
    return *t;
  }

 private:
  FinMap along_;
  Bundle input_;
  Bundle result_;
  std::optional<SliceMorphism> counit_;
  std::vector<std::vector<std::size_t>> preimages_;
  std::vector<std::size_t> position_;
  std::vector<std::vector<std::size_t>> tables_;
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::size_t> index_;
};

inline DependentProduct dependent_product(const FinMap& d, const Bundle& q) { return DependentProduct(d, q); }

/// d_* on a vertical r: q -> q' over M: (b, s) |-> (b, r s).
inline SliceMorphism dependent_product_morphism(const DependentProduct& from, const DependentProduct& to,
                                                const SliceMorphism& r) {
  require(from.along() == to.along(), ErrorKind::ShapeMismatch, "dependent products along different maps");
  require(r.src() == from.input() && r.dst() == to.input(), ErrorKind::ShapeMismatch,
          "vertical does not connect the inputs");
  const FinMap& proj = from.result().map();
  std::vector<std::size_t> out(proj.dom().size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    std::vector<std::size_t> table = from.table(t);
    for (auto& v : table) v = r.arrow()(v);
    out[t] = to.find_or_throw(proj(t), table);
  }
  return SliceMorphism(from.result(), to.result(), FinMap(proj.dom(), to.result().total(), std::move(out)));
}

/// Unit y -> d_*(d*(y)): t |-> (y(t), m |-> (m, t)). `dp` must be d_* of d*(y).
inline SliceMorphism adjunction_unit(const DependentProduct& dp, const Bundle& y) {
  const FinMap& d = dp.along();
  PullbackResult pb = pullback(d, y.map());
  require(dp.input() == Bundle(pb.to_left), ErrorKind::ShapeMismatch, "dependent product is not of d*(y)");
  std::vector<std::size_t> out(y.total().size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    std::size_t b = y.map()(t);
    std::vector<std::size_t> table;
    for (std::size_t m : dp.preimage(b)) table.push_back(*pb.pair_index(m, t));
    out[t] = dp.find_or_throw(b, table);
  }
  return SliceMorphism(y, dp.result(), FinMap(y.total(), dp.result().total(), std::move(out)));
}

/// phi: d*(y) -> q  |->  y -> d_*(q), t |-> (y(t), m |-> phi(m, t)).
inline SliceMorphism transpose(const DependentProduct& dp, const Bundle& y, const SliceMorphism& phi) {
  PullbackResult pb = pullback(dp.along(), y.map());
  require(phi.src() == Bundle(pb.to_left) && phi.dst() == dp.input(), ErrorKind::ShapeMismatch,
          "morphism is not d*(y) -> q");
  std::vector<std::size_t> out(y.total().size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    std::size_t b = y.map()(t);
    std::vector<std::size_t> table;
    for (std::size_t m : dp.preimage(b)) table.push_back(phi.arrow()(*pb.pair_index(m, t)));
    out[t] = dp.find_or_throw(b, table);
  }
  return SliceMorphism(y, dp.result(), FinMap(y.total(), dp.result().total(), std::move(out)));
}

/// psi: y -> d_*(q)  |->  counit after d*(psi).
inline SliceMorphism untranspose(const DependentProduct& dp, const SliceMorphism& psi) {
  require(psi.dst() == dp.result(), ErrorKind::ShapeMismatch, "morphism does not land in d_*(q)");
  return compose(dp.counit(), pullback_morphism(dp.along(), psi));
}

/// hom(d*(y), q) ~ hom(y, d_*(q)) with both hom-sets enumerated and both
/// directions tabulated by index.
struct AdjunctionBijection {
  std::vector<SliceMorphism> left;   // d*(y) -> q over M
  std::vector<SliceMorphism> right;  // y -> d_*(q) over B
  std::vector<std::size_t> to_right;
  std::vector<std::size_t> to_left;

  bool roundtrips() const {
    if (left.size() != right.size()) return false;
    for (std::size_t i = 0; i < left.size(); ++i)
      if (to_left[to_right[i]] != i) return false;
    for (std::size_t i = 0; i < right.size(); ++i)
      if (to_right[to_left[i]] != i) return false;
    return true;
  }
};

inline AdjunctionBijection adjunction_bijection(const FinMap& d, const Bundle& y, const Bundle& q) {
  require(y.base() == d.cod() && q.base() == d.dom(), ErrorKind::ShapeMismatch, "bundles are not over the ends of d");
  DependentProduct dp(d, q);
  Bundle pulled = pullback_bundle(d, y);
  AdjunctionBijection out;
  out.left = enumerate_slice_morphisms(pulled, q);
  out.right = enumerate_slice_morphisms(y, dp.result());
  auto key = [](const SliceMorphism& u) {
    return std::vector<std::size_t>(u.arrow().table().begin(), u.arrow().table().end());
  };
  std::map<std::vector<std::size_t>, std::size_t> left_index, right_index;
  for (std::size_t i = 0; i < out.left.size(); ++i) left_index.emplace(key(out.left[i]), i);
  for (std::size_t i = 0; i < out.right.size(); ++i) right_index.emplace(key(out.right[i]), i);
  for (const auto& phi : out.left) {
    auto it = right_index.find(key(transpose(dp, y, phi)));
    out.to_right.push_back(it == right_index.end() ? npos : it->second);
  }
  for (const auto& psi : out.right) {
    auto it = left_index.find(key(untranspose(dp, psi)));
    out.to_left.push_back(it == left_index.end() ? npos : it->second);
  }
  return out;
}

/// J = d_* c^* for a span A <-c- M -d-> A0 (not necessarily jointly monic).
struct PolynomialJet {
  PullbackResult pulled;  // c*(p), total {(m, e) | c(m) = p(e)}
  DependentProduct product;

  const Bundle& result() const { return product.result(); }
};

inline PolynomialJet polynomial_jet(const FinMap& c, const FinMap& d, const Bundle& p) {
  require(c.dom() == d.dom(), ErrorKind::ShapeMismatch, "span legs have different domains");
  require(c.cod() == p.base(), ErrorKind::ShapeMismatch, "bundle is not over the span's left end");
  PullbackResult pulled = pullback(c, p.map());
  DependentProduct product(d, Bundle(pulled.to_left));
  return PolynomialJet{std::move(pulled), std::move(product)};
}

inline PolynomialJet polynomial_jet(const Relation& r, const Bundle& p) {
  Span legs = r.legs();
  return polynomial_jet(legs.left(), legs.right(), p);
}

/// The isomorphism J(p) -> d_* c^*(p) over A0 for a relation with its canonical
/// legs: (a0, s) |-> (a0, (a,a0) |-> ((a,a0), s(a))).
inline SliceMorphism jet_polynomial_iso(const JetBundle& jb, const PolynomialJet& pj) {
  Span legs = jb.relation().legs();
  require(pj.product.along() == legs.right() && pj.pulled.f == legs.left(), ErrorKind::ShapeMismatch,
          "polynomial jet is not built on the relation's canonical legs");
  require(pj.pulled.p == jb.bundle(), ErrorKind::ShapeMismatch, "different bundles");
  const FinMap& proj = jb.projection();
  std::vector<std::size_t> out(proj.dom().size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    std::size_t a0 = proj(t);
    const auto& pre = pj.product.preimage(a0);
    const auto& s = jb.table(t);
    std::vector<std::size_t> table(pre.size());
    for (std::size_t k = 0; k < pre.size(); ++k) table[k] = *pj.pulled.pair_index(pre[k], s[k]);
    out[t] = pj.product.find_or_throw(a0, table);
  }
  SliceMorphism iso(Bundle(proj), pj.result(), FinMap(proj.dom(), pj.result().total(), std::move(out)));
  require(is_bijective(iso.arrow()), ErrorKind::ShapeMismatch, "jet bundle comparison is not invertible");
  return iso;
}

/// A commuting diagram of spans
///   A' <-c'- M' -d'-> B'
///   |f       |fbar    |g
///   A  <-c-  M  -d->  B
struct SpanMorphism {
  Span upper;
  Span lower;
  FinMap f;
  FinMap fbar;
  FinMap g;
};

struct MateResult {
  SliceMorphism component;       // g*(J(y)) -> J'(f*(y)) over B'
  std::optional<FinMap> inverse;  // present when the component is invertible
};

/// True iff the right square of the span morphism (d' over g, fbar over d) is a pullback.
inline bool right_square_is_pullback(const SpanMorphism& s) {
  try {
    PullbackSquare(s.g, s.lower.right(), s.upper.right(), s.fbar);
    return true;
  } catch (const Error&) {
    return false;
  }
}

/// The mate 2-cell g* d_* c* => d'_* c'^* f* at y, computed on section tables.
///
/// A section s over d^-1(g(b')) is sent to m' |-> (m', (c'(m'), e)) where
/// s(fbar(m')) = (fbar(m'), e).
inline MateResult mate_transform(const SpanMorphism& s, const Bundle& y) {
  const FinMap& c = s.lower.left();
  const FinMap& d = s.lower.right();
  const FinMap& c1 = s.upper.left();
  const FinMap& d1 = s.upper.right();
  require(compose(c, s.fbar) == compose(s.f, c1), ErrorKind::SquaresNotCommuting, "left square does not commute");
  require(compose(d, s.fbar) == compose(s.g, d1), ErrorKind::SquaresNotCommuting, "right square does not commute");

  PolynomialJet lower = polynomial_jet(c, d, y);
  Bundle fy = pullback_bundle(s.f, y);
  PullbackResult fy_pb = pullback(s.f, y.map());
  PolynomialJet upper = polynomial_jet(c1, d1, fy);
  PullbackResult src = pullback(s.g, lower.result().map());

  std::vector<std::size_t> out(src.apex.size());
  for (std::size_t w = 0; w < out.size(); ++w) {
    std::size_t b1 = src.to_left(w);
    const auto& section = lower.product.table(src.to_right(w));
    std::vector<std::size_t> table;
    for (std::size_t m1 : upper.product.preimage(b1)) {
      std::size_t m = s.fbar(m1);
      std::size_t e = lower.pulled.to_right(section[lower.product.position(m)]);
      std::size_t u = *fy_pb.pair_index(c1(m1), e);
      table.push_back(*upper.pulled.pair_index(m1, u));
    }
    out[w] = upper.product.find_or_throw(b1, table);
  }
  SliceMorphism component(Bundle(src.to_left), upper.result(),
                          FinMap(src.apex, upper.result().total(), std::move(out)));
  std::optional<FinMap> inv;
  if (is_bijective(component.arrow())) inv = inverse(component.arrow());
  return MateResult{std::move(component), std::move(inv)};
}

}  // namespace kjet

#pragma once

// Finite sets and total maps: the ambient category the semantics is evaluated in.
//
// Elements are strings, kept in a fixed canonical order. Maps store their table as
// indices into the codomain. Every limit construction here is canonical: pullback
// and product apexes consist of named pairs "(a,b)" in lexicographic index order,
// so two constructions from the same data always produce equal sets.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kjet/error.hpp"

namespace kjet {

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

inline std::string pair_name(std::string_view a, std::string_view b) {
  std::string out;
  out.reserve(a.size() + b.size() + 3);
  out += '(';
  out += a;
  out += ',';
  out += b;
  out += ')';
  return out;
}

/// A finite set with a fixed element order.
///
/// Two sets compare equal when they list the same elements in the same order; the
/// name is a display label only. Copies share storage.
class FinSet {
 public:
  FinSet() : FinSet("0", {}) {}

  FinSet(std::string name, std::vector<std::string> elements) {
    auto data = std::make_shared<Data>();
    data->name = std::move(name);
    data->elements = std::move(elements);
    for (std::size_t i = 0; i < data->elements.size(); ++i) {
      auto [it, inserted] = data->index.emplace(data->elements[i], i);
      require(inserted, ErrorKind::InvalidSet,
              "duplicate element '" + data->elements[i] + "' in set '" + data->name + "'");
    }
    data_ = std::move(data);
  }

  const std::string& name() const { return data_->name; }
  std::size_t size() const { return data_->elements.size(); }
  bool empty() const { return data_->elements.empty(); }
  const std::vector<std::string>& elements() const { return data_->elements; }
  const std::string& operator[](std::size_t i) const { return data_->elements[i]; }

  std::optional<std::size_t> find(std::string_view id) const {
    auto it = data_->index.find(id);
    if (it == data_->index.end()) return std::nullopt;
    return it->second;
  }

  bool contains(std::string_view id) const { return find(id).has_value(); }

  std::size_t index_of(std::string_view id) const {
    auto i = find(id);
    require(i.has_value(), ErrorKind::InvalidSet,
            "'" + std::string(id) + "' is not an element of '" + name() + "'");
    return *i;
  }

  FinSet renamed(std::string name) const { return FinSet(std::move(name), elements()); }

  friend bool operator==(const FinSet& x, const FinSet& y) {
    return x.data_ == y.data_ || x.data_->elements == y.data_->elements;
  }

 private:
  struct Data {
    std::string name;
    std::vector<std::string> elements;
    std::map<std::string, std::size_t, std::less<>> index;
  };
  std::shared_ptr<const Data> data_;
};

/// A set with elements prefix0, prefix1, ...
inline FinSet standard_set(const std::string& name, std::size_t n, std::string_view prefix = "x") {
  std::vector<std::string> elements;
  elements.reserve(n);
  for (std::size_t i = 0; i < n; ++i) elements.push_back(std::string(prefix) + std::to_string(i));
  return FinSet(name, std::move(elements));
}

/// A total function between finite sets.
class FinMap {
 public:
  FinMap() = default;

  FinMap(FinSet dom, FinSet cod, std::vector<std::size_t> table)
      : dom_(std::move(dom)), cod_(std::move(cod)), table_(std::move(table)) {
    require(table_.size() == dom_.size(), ErrorKind::InvalidMap,
            "table size " + std::to_string(table_.size()) + " does not match domain '" + dom_.name() +
                "' of size " + std::to_string(dom_.size()));
    for (std::size_t v : table_)
      require(v < cod_.size(), ErrorKind::InvalidMap, "value out of range of codomain '" + cod_.name() + "'");
  }

  /// Builds a map from (source, target) element names; every domain element exactly once.
  static FinMap from_pairs(FinSet dom, FinSet cod,
                           const std::vector<std::pair<std::string, std::string>>& assignment) {
    std::vector<std::size_t> table(dom.size(), npos);
    for (const auto& [x, y] : assignment) {
      std::size_t i = dom.index_of(x);
      require(table[i] == npos, ErrorKind::InvalidMap, "element '" + x + "' assigned twice");
      table[i] = cod.index_of(y);
    }
    for (std::size_t i = 0; i < table.size(); ++i)
      require(table[i] != npos, ErrorKind::InvalidMap, "element '" + dom[i] + "' has no value");
    return FinMap(std::move(dom), std::move(cod), std::move(table));
  }

  const FinSet& dom() const { return dom_; }
  const FinSet& cod() const { return cod_; }
  std::span<const std::size_t> table() const { return table_; }
  std::size_t operator()(std::size_t i) const { return table_[i]; }

  const std::string& at(std::string_view x) const { return cod_[table_[dom_.index_of(x)]]; }

  friend bool operator==(const FinMap& f, const FinMap& g) {
    return f.table_ == g.table_ && f.dom_ == g.dom_ && f.cod_ == g.cod_;
  }

 private:
  FinSet dom_;
  FinSet cod_;
  std::vector<std::size_t> table_;
};

inline FinMap identity(const FinSet& a) {
  std::vector<std::size_t> table(a.size());
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = i;
  return FinMap(a, a, std::move(table));
}

inline FinMap constant_map(const FinSet& dom, const FinSet& cod, std::size_t value) {
  return FinMap(dom, cod, std::vector<std::size_t>(dom.size(), value));
}

/// The unique map out of the empty set.
inline FinMap empty_map(const FinSet& cod) { return FinMap(FinSet("0", {}), cod, {}); }

/// g after f.
inline FinMap compose(const FinMap& g, const FinMap& f) {
  require(f.cod() == g.dom(), ErrorKind::CompositionMismatch,
          "codomain '" + f.cod().name() + "' does not match domain '" + g.dom().name() + "'");
  std::vector<std::size_t> table(f.dom().size());
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = g(f(i));
  return FinMap(f.dom(), g.cod(), std::move(table));
}

inline bool is_monic(const FinMap& f) {
  std::vector<bool> hit(f.cod().size(), false);
  for (std::size_t v : f.table()) {
    if (hit[v]) return false;
    hit[v] = true;
  }
  return true;
}

inline bool is_surjective(const FinMap& f) {
  std::vector<bool> hit(f.cod().size(), false);
  for (std::size_t v : f.table()) hit[v] = true;
  return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
}

inline bool is_bijective(const FinMap& f) { return f.dom().size() == f.cod().size() && is_monic(f); }

/// Inverse of a bijection.
inline FinMap inverse(const FinMap& f) {
  require(is_bijective(f), ErrorKind::InvalidMap, "map is not invertible");
  std::vector<std::size_t> table(f.dom().size());
  for (std::size_t i = 0; i < table.size(); ++i) table[f(i)] = i;
  return FinMap(f.cod(), f.dom(), std::move(table));
}

/// Indices of the domain grouped by value: fibers(f)[y] lists f^-1(y) in domain order.
inline std::vector<std::vector<std::size_t>> fibers(const FinMap& f) {
  std::vector<std::vector<std::size_t>> out(f.cod().size());
  for (std::size_t i = 0; i < f.dom().size(); ++i) out[f(i)].push_back(i);
  return out;
}

/// Canonical pullback of f: A -> C and p: B -> C.
///
/// The apex lists the pairs (a,b) with f(a) = p(b), ordered by (index of a, index of b).
struct PullbackResult {
  FinMap f;
  FinMap p;
  FinSet apex;
  FinMap to_left;
  FinMap to_right;
  std::vector<std::size_t> lookup;  // a * |B| + b -> apex index, or npos

  std::optional<std::size_t> pair_index(std::size_t a, std::size_t b) const {
    std::size_t k = lookup[a * p.dom().size() + b];
    if (k == npos) return std::nullopt;
    return k;
  }

  std::size_t pair_index_or_throw(std::size_t a, std::size_t b) const {
    auto k = pair_index(a, b);
    require(k.has_value(), ErrorKind::NotCommuting,
            "pair (" + f.dom()[a] + "," + p.dom()[b] + ") does not lie in the pullback");
    return *k;
  }
};

inline PullbackResult pullback(const FinMap& f, const FinMap& p) {
  require(f.cod() == p.cod(), ErrorKind::CompositionMismatch,
          "pullback legs have different codomains '" + f.cod().name() + "' and '" + p.cod().name() + "'");
  const FinSet& a = f.dom();
  const FinSet& b = p.dom();
  std::vector<std::string> names;
  std::vector<std::size_t> left, right;
  std::vector<std::size_t> lookup(a.size() * b.size(), npos);
  auto p_fibers = fibers(p);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j : p_fibers[f(i)]) {
      lookup[i * b.size() + j] = names.size();
      names.push_back(pair_name(a[i], b[j]));
      left.push_back(i);
      right.push_back(j);
    }
  }
  FinSet apex(a.name() + "_x_" + b.name(), std::move(names));
  FinMap to_left(apex, a, std::move(left));
  FinMap to_right(apex, b, std::move(right));
  return PullbackResult{f, p, std::move(apex), std::move(to_left), std::move(to_right), std::move(lookup)};
}

/// The factorization <a, b>: X -> apex of a commuting cone.
inline FinMap pair_into_pullback(const FinMap& a, const FinMap& b, const PullbackResult& pb) {
  require(a.dom() == b.dom(), ErrorKind::NotCommuting, "cone legs have different domains");
  require(a.cod() == pb.f.dom() && b.cod() == pb.p.dom(), ErrorKind::NotCommuting,
          "cone legs do not land in the pullback's corners");
  std::vector<std::size_t> table(a.dom().size());
  for (std::size_t x = 0; x < table.size(); ++x) {
    require(pb.f(a(x)) == pb.p(b(x)), ErrorKind::NotCommuting,
            "cone does not commute at '" + a.dom()[x] + "'");
    table[x] = *pb.pair_index(a(x), b(x));
  }
  return FinMap(a.dom(), pb.apex, std::move(table));
}

/// A pullback square of p: E -> B along f: A -> B with any apex E'.
///
/// pair(a, e) is the unique apex element over a and e.
class PullbackSquare {
 public:
  PullbackSquare(FinMap base, FinMap bundle, FinMap left, FinMap right)
      : base_(std::move(base)), bundle_(std::move(bundle)), left_(std::move(left)), right_(std::move(right)) {
    require(base_.cod() == bundle_.cod(), ErrorKind::ShapeMismatch, "square corners do not meet");
    require(left_.dom() == right_.dom() && left_.cod() == base_.dom() && right_.cod() == bundle_.dom(),
            ErrorKind::ShapeMismatch, "square sides have the wrong ends");
    require(compose(base_, left_) == compose(bundle_, right_), ErrorKind::NotCommuting, "square does not commute");
    lookup_.assign(base_.dom().size() * bundle_.dom().size(), npos);
    for (std::size_t w = 0; w < left_.dom().size(); ++w) {
      std::size_t& slot = lookup_[left_(w) * bundle_.dom().size() + right_(w)];
      require(slot == npos, ErrorKind::ShapeMismatch, "square is not a pullback: legs not jointly monic");
      slot = w;
    }
    std::size_t matching = 0;
    auto fib = fibers(bundle_);
    for (std::size_t a = 0; a < base_.dom().size(); ++a) matching += fib[base_(a)].size();
    require(matching == left_.dom().size(), ErrorKind::ShapeMismatch, "square is not a pullback: cone missing");
  }

  const FinMap& base() const { return base_; }
  const FinMap& bundle() const { return bundle_; }
  const FinMap& left() const { return left_; }
  const FinMap& right() const { return right_; }
  const FinSet& apex() const { return left_.dom(); }

  std::size_t pair(std::size_t a, std::size_t e) const {
    std::size_t w = lookup_[a * bundle_.dom().size() + e];
    require(w != npos, ErrorKind::NotCommuting, "pair does not lie over a common point");
    return w;
  }

  /// <a, e>: Y -> E'.
  FinMap pair(const FinMap& a, const FinMap& e) const {
    require(a.dom() == e.dom(), ErrorKind::NotCommuting, "pair of elements at different stages");
    std::vector<std::size_t> table(a.dom().size());
    for (std::size_t y = 0; y < table.size(); ++y) table[y] = pair(a(y), e(y));
    return FinMap(a.dom(), apex(), std::move(table));
  }

 private:
  FinMap base_;
  FinMap bundle_;
  FinMap left_;
  FinMap right_;
  std::vector<std::size_t> lookup_;
};

inline PullbackSquare canonical_square(const FinMap& f, const FinMap& p) {
  PullbackResult pb = pullback(f, p);
  return PullbackSquare(f, p, pb.to_left, pb.to_right);
}

/// Pastes `upper` (a pullback of p' along f) onto `lower` (a pullback of p along g,
/// with left side p'), giving a pullback of p along g f.
inline PullbackSquare paste(const PullbackSquare& upper, const PullbackSquare& lower) {
  require(upper.bundle() == lower.left(), ErrorKind::ShapeMismatch, "squares do not stack");
  return PullbackSquare(compose(lower.base(), upper.base()), lower.bundle(), upper.left(),
                        compose(lower.right(), upper.right()));
}

struct Product {
  FinSet set;
  FinMap first;
  FinMap second;
};

inline Product product(const FinSet& a, const FinSet& b) {
  std::vector<std::string> names;
  std::vector<std::size_t> first, second;
  names.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      names.push_back(pair_name(a[i], b[j]));
      first.push_back(i);
      second.push_back(j);
    }
  }
  FinSet set(a.name() + "_x_" + b.name(), std::move(names));
  FinMap p1(set, a, std::move(first));
  FinMap p2(set, b, std::move(second));
  return Product{std::move(set), std::move(p1), std::move(p2)};
}

/// A span A <- M -> X.
class Span {
 public:
  Span(FinMap left, FinMap right) : left_(std::move(left)), right_(std::move(right)) {
    require(left_.dom() == right_.dom(), ErrorKind::ShapeMismatch, "span legs have different domains");
  }

  const FinMap& left() const { return left_; }
  const FinMap& right() const { return right_; }
  const FinSet& apex() const { return left_.dom(); }

 private:
  FinMap left_;
  FinMap right_;
};

inline bool is_jointly_monic(const Span& s) {
  const std::size_t width = s.right().cod().size();
  std::vector<bool> hit(s.left().cod().size() * width, false);
  for (std::size_t m = 0; m < s.apex().size(); ++m) {
    std::size_t key = s.left()(m) * width + s.right()(m);
    if (hit[key]) return false;
    hit[key] = true;
  }
  return true;
}

/// The unique mu: M -> M' with left' mu = left and right' mu = right, if there is one.
inline std::optional<FinMap> span_leq(const Span& s, const Span& t) {
  require(is_jointly_monic(s) && is_jointly_monic(t), ErrorKind::NotJointlyMonic,
          "span_leq needs jointly monic spans");
  require(s.left().cod() == t.left().cod() && s.right().cod() == t.right().cod(), ErrorKind::ShapeMismatch,
          "spans have different ends");
  const std::size_t width = t.right().cod().size();
  std::vector<std::size_t> where(t.left().cod().size() * width, npos);
  for (std::size_t m = 0; m < t.apex().size(); ++m) where[t.left()(m) * width + t.right()(m)] = m;
  std::vector<std::size_t> table(s.apex().size());
  for (std::size_t m = 0; m < table.size(); ++m) {
    std::size_t k = where[s.left()(m) * width + s.right()(m)];
    if (k == npos) return std::nullopt;
    table[m] = k;
  }
  return FinMap(s.apex(), t.apex(), std::move(table));
}

}  // namespace kjet

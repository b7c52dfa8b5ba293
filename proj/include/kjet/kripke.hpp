#pragma once

// Generalized elements, subobjects and partial maps at a stage.
//
// A generalized subobject of A at stage X is a class of jointly monic spans
// A <- M -> X. Its canonical representative is the image pair-set inside A x X,
// so equality of classes is equality of pair-sets and the change-of-stage and
// counterimage laws hold on the nose.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kjet/enumerate.hpp"
#include "kjet/error.hpp"
#include "kjet/finset.hpp"

namespace kjet {

using IndexPair = std::pair<std::size_t, std::size_t>;

class SubobjectAtStage {
 public:
  /// Pairs are (index in over, index in stage); duplicates collapse.
  SubobjectAtStage(FinSet over, FinSet stage, std::vector<IndexPair> pairs)
      : over_(std::move(over)), stage_(std::move(stage)), pairs_(std::move(pairs)) {
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
    lookup_.assign(over_.size() * stage_.size(), npos);
    std::vector<std::string> names;
    std::vector<std::size_t> left, right;
    names.reserve(pairs_.size());
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      auto [a, x] = pairs_[k];
      require(a < over_.size() && x < stage_.size(), ErrorKind::ShapeMismatch, "pair index out of range");
      lookup_[a * stage_.size() + x] = k;
      names.push_back(pair_name(over_[a], stage_[x]));
      left.push_back(a);
      right.push_back(x);
    }
    FinSet apex("U", std::move(names));
    legs_.emplace(FinMap(apex, over_, std::move(left)), FinMap(apex, stage_, std::move(right)));
  }

  static SubobjectAtStage empty(const FinSet& over, const FinSet& stage) { return {over, stage, {}}; }

  static SubobjectAtStage full(const FinSet& over, const FinSet& stage) {
    std::vector<IndexPair> pairs;
    for (std::size_t a = 0; a < over.size(); ++a)
      for (std::size_t x = 0; x < stage.size(); ++x) pairs.emplace_back(a, x);
    return {over, stage, std::move(pairs)};
  }

  const FinSet& over() const { return over_; }
  const FinSet& stage() const { return stage_; }
  const std::vector<IndexPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

  /// Position of (a, x) in pairs(), or npos.
  std::size_t index_of(std::size_t a, std::size_t x) const { return lookup_[a * stage_.size() + x]; }
  bool contains(std::size_t a, std::size_t x) const { return index_of(a, x) != npos; }

  /// The canonical span A <- M -> X whose apex lists the pairs.
  const Span& legs() const { return *legs_; }
  const FinSet& apex() const { return legs_->apex(); }

  friend bool operator==(const SubobjectAtStage& u, const SubobjectAtStage& v) {
    return u.pairs_ == v.pairs_ && u.over_ == v.over_ && u.stage_ == v.stage_;
  }

 private:
  FinSet over_;
  FinSet stage_;
  std::vector<IndexPair> pairs_;
  std::vector<std::size_t> lookup_;
  std::optional<Span> legs_;
};

/// The canonical representative of the class of a jointly monic span.
inline SubobjectAtStage canonicalize(const Span& s) {
  require(is_jointly_monic(s), ErrorKind::NotJointlyMonic, "span is not jointly monic");
  std::vector<IndexPair> pairs;
  pairs.reserve(s.apex().size());
  for (std::size_t m = 0; m < s.apex().size(); ++m) pairs.emplace_back(s.left()(m), s.right()(m));
  return SubobjectAtStage(s.left().cod(), s.right().cod(), std::move(pairs));
}

inline void require_same_ends(const SubobjectAtStage& u, const SubobjectAtStage& v) {
  require(u.over() == v.over(), ErrorKind::OverMismatch, "subobjects of different objects");
  require(u.stage() == v.stage(), ErrorKind::StageMismatch, "subobjects at different stages");
}

inline bool sub_leq(const SubobjectAtStage& u, const SubobjectAtStage& v) {
  require_same_ends(u, v);
  return std::includes(v.pairs().begin(), v.pairs().end(), u.pairs().begin(), u.pairs().end());
}

/// alpha*(U) for alpha: Y -> X.
inline SubobjectAtStage change_of_stage(const SubobjectAtStage& u, const FinMap& alpha) {
  require(alpha.cod() == u.stage(), ErrorKind::StageMismatch,
          "change of stage along a map into '" + alpha.cod().name() + "', not the stage '" + u.stage().name() + "'");
  std::vector<IndexPair> pairs;
  for (std::size_t a = 0; a < u.over().size(); ++a)
    for (std::size_t y = 0; y < alpha.dom().size(); ++y)
      if (u.contains(a, alpha(y))) pairs.emplace_back(a, y);
  return SubobjectAtStage(u.over(), alpha.dom(), std::move(pairs));
}

/// f^-1(U) for f: A' -> A.
inline SubobjectAtStage counterimage(const FinMap& f, const SubobjectAtStage& u) {
  require(f.cod() == u.over(), ErrorKind::OverMismatch,
          "counterimage along a map into '" + f.cod().name() + "', not '" + u.over().name() + "'");
  std::vector<IndexPair> pairs;
  for (std::size_t a = 0; a < f.dom().size(); ++a)
    for (std::size_t x = 0; x < u.stage().size(); ++x)
      if (u.contains(f(a), x)) pairs.emplace_back(a, x);
  return SubobjectAtStage(f.dom(), u.stage(), std::move(pairs));
}

/// Proof that a is a member of U at the later stage alpha: the map Y -> M through
/// the canonical apex.
struct Witness {
  FinMap map;
};

/// a in_alpha U.
inline std::optional<Witness> member(const FinMap& a, const FinMap& alpha, const SubobjectAtStage& u) {
  require(a.cod() == u.over(), ErrorKind::OverMismatch, "element of '" + a.cod().name() + "', not of '" +
                                                            u.over().name() + "'");
  require(alpha.cod() == u.stage(), ErrorKind::StageMismatch, "stage change does not end at the stage");
  require(a.dom() == alpha.dom(), ErrorKind::StageMismatch, "element and stage change disagree on the stage");
  std::vector<std::size_t> table(a.dom().size());
  for (std::size_t y = 0; y < table.size(); ++y) {
    std::size_t k = u.index_of(a(y), alpha(y));
    if (k == npos) return std::nullopt;
    table[y] = k;
  }
  return Witness{FinMap(a.dom(), u.apex(), std::move(table))};
}

/// Decides U <= U' the way the extensionality argument does: probe U' with the
/// canonical legs (c, d) of U.
inline bool extensionality_leq(const SubobjectAtStage& u, const SubobjectAtStage& v) {
  require_same_ends(u, v);
  return member(u.legs().left(), u.legs().right(), v).has_value();
}

/// A partial map at a stage: a support and a value for each of its pairs.
class PartialMapAtStage {
 public:
  PartialMapAtStage(SubobjectAtStage support, FinSet target, std::vector<std::size_t> values)
      : support_(std::move(support)), target_(std::move(target)), values_(std::move(values)) {
    require(values_.size() == support_.size(), ErrorKind::ShapeMismatch, "values do not cover the support");
    for (std::size_t v : values_)
      require(v < target_.size(), ErrorKind::TargetMismatch, "value outside target '" + target_.name() + "'");
  }

  const SubobjectAtStage& support() const { return support_; }
  const FinSet& over() const { return support_.over(); }
  const FinSet& stage() const { return support_.stage(); }
  const FinSet& target() const { return target_; }
  const std::vector<std::size_t>& values() const { return values_; }

  std::size_t at(std::size_t a, std::size_t x) const {
    std::size_t k = support_.index_of(a, x);
    require(k != npos, ErrorKind::NotInSupport,
            "(" + over()[a] + "," + stage()[x] + ") is not in the support");
    return values_[k];
  }

  /// The representing map M -> E on the canonical apex.
  FinMap representative() const { return FinMap(support_.apex(), target_, values_); }

  friend bool operator==(const PartialMapAtStage& s, const PartialMapAtStage& t) {
    return s.values_ == t.values_ && s.target_ == t.target_ && s.support_ == t.support_;
  }

 private:
  SubobjectAtStage support_;
  FinSet target_;
  std::vector<std::size_t> values_;
};

/// alpha*(s).
inline PartialMapAtStage change_of_stage(const PartialMapAtStage& s, const FinMap& alpha) {
  SubobjectAtStage support = change_of_stage(s.support(), alpha);
  std::vector<std::size_t> values;
  values.reserve(support.size());
  for (auto [a, y] : support.pairs()) values.push_back(s.at(a, alpha(y)));
  return PartialMapAtStage(std::move(support), s.target(), std::move(values));
}

/// s(a) for a in_alpha support(s).
inline FinMap value(const PartialMapAtStage& s, const FinMap& a, const FinMap& alpha) {
  auto witness = member(a, alpha, s.support());
  require(witness.has_value(), ErrorKind::NotInSupport, "element is not a member of the support");
  return compose(s.representative(), witness->map);
}

inline PartialMapAtStage postcompose(const FinMap& q, const PartialMapAtStage& s) {
  require(q.dom() == s.target(), ErrorKind::TargetMismatch,
          "cannot postcompose: '" + q.dom().name() + "' is not the target '" + s.target().name() + "'");
  std::vector<std::size_t> values(s.values().size());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = q(s.values()[k]);
  return PartialMapAtStage(s.support(), q.cod(), std::move(values));
}

/// s after f, with support f^-1(support(s)).
inline PartialMapAtStage precompose(const PartialMapAtStage& s, const FinMap& f) {
  SubobjectAtStage support = counterimage(f, s.support());
  std::vector<std::size_t> values;
  values.reserve(support.size());
  for (auto [a, x] : support.pairs()) values.push_back(s.at(f(a), x));
  return PartialMapAtStage(std::move(support), s.target(), std::move(values));
}

/// A partial map into E that splits p: E -> A over its support.
class PartialSection {
 public:
  PartialSection(PartialMapAtStage map, FinMap bundle) : map_(std::move(map)), bundle_(std::move(bundle)) {
    require(bundle_.dom() == map_.target(), ErrorKind::TargetMismatch, "bundle total is not the target");
    require(bundle_.cod() == map_.over(), ErrorKind::OverMismatch, "bundle base is not the support's object");
    const auto& pairs = map_.support().pairs();
    for (std::size_t k = 0; k < pairs.size(); ++k)
      require(bundle_(map_.values()[k]) == pairs[k].first, ErrorKind::ShapeMismatch,
              "value at (" + map_.over()[pairs[k].first] + "," + map_.stage()[pairs[k].second] +
                  ") is not in the fiber");
  }

  const PartialMapAtStage& map() const { return map_; }
  const FinMap& bundle() const { return bundle_; }
  const SubobjectAtStage& support() const { return map_.support(); }

  friend bool operator==(const PartialSection& s, const PartialSection& t) {
    return s.map_ == t.map_ && s.bundle_ == t.bundle_;
  }

 private:
  PartialMapAtStage map_;
  FinMap bundle_;
};

/// Restriction of a partial section t of p along f to a smaller support U' <= f^-1(U).
///
/// The result is a partial section of the canonical pullback p' = f*(p), valued
/// (a', t(f(a'), x)).
inline PartialSection restrict_section(const PartialSection& t, const FinMap& f, const SubobjectAtStage& smaller) {
  SubobjectAtStage pulled = counterimage(f, t.support());
  require(smaller.over() == pulled.over() && smaller.stage() == pulled.stage(), ErrorKind::ShapeMismatch,
          "restriction target has the wrong ends");
  require(sub_leq(smaller, pulled), ErrorKind::SupportNotContained, "support is not inside f^-1(U)");
  PullbackResult pb = pullback(f, t.bundle());
  std::vector<std::size_t> values;
  values.reserve(smaller.size());
  for (auto [a, x] : smaller.pairs()) values.push_back(*pb.pair_index(a, t.map().at(f(a), x)));
  return PartialSection(PartialMapAtStage(smaller, pb.apex, std::move(values)), pb.to_left);
}

/// A law assigning to each (a, alpha) with a in_alpha U an element of E at stage dom(a).
using Law = std::function<FinMap(const FinMap& a, const FinMap& alpha)>;

/// The law of an existing partial map: (a, alpha) |-> s(a).
inline Law law_of(const PartialMapAtStage& s) {
  return [s](const FinMap& a, const FinMap& alpha) { return value(s, a, alpha); };
}

struct YonedaOptions {
  /// Stability is sampled on every beta: Z -> M with |Z| up to this size.
  std::size_t probe_size = 2;
};

/// The unique partial map with support U agreeing with a stable law.
///
/// Only sigma(c, d) at the canonical legs determines the result; the remaining
/// evaluations check stability sigma(c,d) beta = sigma(c beta, d beta).
inline PartialMapAtStage yoneda_construct(const SubobjectAtStage& u, const FinSet& target, const Law& sigma,
                                          const YonedaOptions& options = {}) {
  const FinMap& c = u.legs().left();
  const FinMap& d = u.legs().right();
  FinMap generic = sigma(c, d);
  require(generic.dom() == u.apex() && generic.cod() == target, ErrorKind::TargetMismatch,
          "law value at the canonical legs has the wrong shape");
  for (std::size_t n = 0; n <= options.probe_size; ++n) {
    FinSet z = standard_set("Z", n, "z");
    for_each_map(z, u.apex(), [&](const FinMap& beta) {
      FinMap lhs = compose(generic, beta);
      FinMap rhs = sigma(compose(c, beta), compose(d, beta));
      require(lhs == rhs, ErrorKind::UnstableLaw,
              "law is not stable under a change of stage of size " + std::to_string(n));
    });
  }
  return PartialMapAtStage(u, target, std::vector<std::size_t>(generic.table().begin(), generic.table().end()));
}

}  // namespace kjet

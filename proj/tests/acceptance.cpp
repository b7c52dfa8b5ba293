// Acceptance run: one PASS/FAIL line per criterion. All comparisons are exact;
// the only numeric tolerance is the runtime limit of criterion 1.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kjet/cli.hpp"
#include "kjet/enumerate.hpp"
#include "kjet/fibdual.hpp"
#include "kjet/fixtures.hpp"
#include "kjet/generate.hpp"
#include "kjet/jets.hpp"
#include "kjet/kripke.hpp"
#include "kjet/polyfun.hpp"
#include "kjet/relations.hpp"

using namespace kjet;

namespace {

constexpr std::uint64_t kSeed = 42;
constexpr double kCriterion1Seconds = 30.0;

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string failure;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      failure = what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fixed(double x) {
  std::ostringstream s;
  s.precision(2);
  s << std::fixed << x;
  return s.str();
}

// Calls fn(table) for every table of a map from an n-element set into an m-element set.
template <class Fn>
void for_each_table(std::size_t n, std::size_t m, Fn&& fn) {
  if (n > 0 && m == 0) return;
  std::vector<std::size_t> t(n, 0);
  while (true) {
    fn(t);
    std::size_t k = 0;
    while (k < n && ++t[k] == m) t[k++] = 0;
    if (k == n) return;
  }
}

// Number of maps h: dom(p) -> dom(q) with q h = p, by running through all maps.
std::size_t brute_force_verticals(const FinMap& p, const FinMap& q) {
  std::size_t count = 0;
  for_each_table(p.dom().size(), q.dom().size(), [&](const std::vector<std::size_t>& h) {
    for (std::size_t x = 0; x < h.size(); ++x)
      if (q(h[x]) != p(x)) return;
    ++count;
  });
  return count;
}

struct JetInstance {
  Relation r;
  FinMap p;
};

std::vector<JetInstance> criterion1_instances() {
  std::vector<JetInstance> out;
  for (std::uint64_t i = 0; i < 200; ++i) {
    auto rng = gen::instance_rng(kSeed, "acceptance-jets", i);
    FinSet a = gen::random_set(rng, "A", 4, "a");
    FinSet a0 = gen::random_set(rng, "A0", 4, "p");
    Relation r = gen::random_relation(rng, a, a0);
    FinMap p = gen::random_bundle(rng, a, 3);
    out.push_back({r, p});
  }
  return out;
}

Outcome criterion1(const std::vector<JetInstance>& instances) {
  Outcome o;
  auto t0 = Clock::now();
  std::size_t fibers_checked = 0;
  for (const auto& [r, p] : instances) {
    JetBundle jb(r, p);
    auto sizes = jb.fiber_sizes();
    auto fib = fibers(p);
    for (std::size_t b = 0; b < r.dst().size(); ++b) {
      const auto& nbhd = r.neighbourhood(b);
      std::size_t product = 1;
      for (std::size_t a : nbhd) product *= fib[a].size();
      // Every tuple of total-space elements indexed by the monad, kept when it is a section.
      std::size_t sections = 0;
      for_each_table(nbhd.size(), p.dom().size(), [&](const std::vector<std::size_t>& s) {
        for (std::size_t k = 0; k < s.size(); ++k)
          if (p(s[k]) != nbhd[k]) return;
        ++sections;
      });
      o.require(sizes[b] == product && sizes[b] == sections,
                "fiber over '" + r.dst()[b] + "' has " + std::to_string(sizes[b]) + " elements, expected " +
                    std::to_string(product));
      ++fibers_checked;
    }
  }
  double elapsed = seconds_since(t0);
  o.require(elapsed < kCriterion1Seconds, "took " + fixed(elapsed) + " s");
  o.detail = std::to_string(instances.size()) + " instances, " + std::to_string(fibers_checked) +
             " fibers, exact; " + fixed(elapsed) + " s (limit " + fixed(kCriterion1Seconds) + " s)";
  return o;
}

Outcome criterion2(const std::vector<JetInstance>& instances) {
  Outcome o;
  std::size_t verticals = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& [r, p] = instances[i];
    auto rng = gen::instance_rng(kSeed, "acceptance-naturality", i);
    FinMap unused(p);
    FinMap p2 = gen::random_vertical_target(rng, p, 2, "E2", &unused);
    JetBundle jp(r, p), jp2(r, p2);
    PolynomialJet pp = polynomial_jet(r, Bundle(p)), pp2 = polynomial_jet(r, Bundle(p2));
    SliceMorphism iso = jet_polynomial_iso(jp, pp), iso2 = jet_polynomial_iso(jp2, pp2);
    o.require(is_bijective(iso.arrow()) && is_bijective(iso2.arrow()), "comparison is not invertible");
    Span legs = r.legs();
    const FinMap& c = legs.left();
    auto natural = [&](const JetBundle& jt, const PolynomialJet& pt, const SliceMorphism& iso_t,
                       const SliceMorphism& u) {
      SliceMorphism poly_u = dependent_product_morphism(pp.product, pt.product, pullback_morphism(c, u));
      o.require(compose(iso_t.arrow(), jet_on_vertical(jp, jt, u.arrow())) == compose(poly_u.arrow(), iso.arrow()),
                "naturality fails on instance " + std::to_string(i));
      ++verticals;
    };
    for (const SliceMorphism& u : enumerate_slice_morphisms(Bundle(p), Bundle(p))) natural(jp, pp, iso, u);
    for (const SliceMorphism& u : enumerate_slice_morphisms(Bundle(p), Bundle(p2))) natural(jp2, pp2, iso2, u);
  }
  o.detail = std::to_string(instances.size()) + " instances, " + std::to_string(verticals) +
             " verticals (all endomorphisms of p, all maps into a second bundle with fibers <= 2), exact";
  return o;
}

Outcome criterion3() {
  Outcome o;
  std::size_t instances = 0;
  for (std::size_t nb = 0; nb <= 3; ++nb)
    for (std::size_t nm = 0; nm <= 3; ++nm) {
      FinSet b = standard_set("B", nb, "b"), m = standard_set("M", nm, "m");
      for_each_map(m, b, [&](const FinMap& d) {
        for_each_table(nb, 3, [&](const std::vector<std::size_t>& ys) {
          FinMap y = gen::bundle_with_fibers(b, ys, "Y");
          for_each_table(nm, 3, [&](const std::vector<std::size_t>& qs) {
            FinMap q = gen::bundle_with_fibers(m, qs, "Q");
            AdjunctionBijection bij = adjunction_bijection(d, Bundle(y), Bundle(q));
            DependentProduct dp(d, Bundle(q));
            Bundle pulled = pullback_bundle(d, Bundle(y));
            o.require(bij.roundtrips(), "roundtrip fails");
            o.require(bij.left.size() == brute_force_verticals(pulled.map(), q), "hom(d*y, q) count differs");
            o.require(bij.right.size() == brute_force_verticals(y, dp.result().map()), "hom(y, d_*q) count differs");
            ++instances;
          });
        });
      });
    }
  o.detail = std::to_string(instances) + " instances (all d, all fiber sizes), exact";
  return o;
}

Outcome criterion4() {
  Outcome o;
  std::size_t pairs = 0;
  for (std::size_t na = 0; na <= 3; ++na)
    for (std::size_t nx = 0; nx <= 3; ++nx) {
      FinSet a = standard_set("A", na, "a"), x = standard_set("X", nx, "x");
      std::vector<std::pair<FinMap, FinMap>> elements;
      for (std::size_t ny = 0; ny <= 3; ++ny) {
        FinSet y = standard_set("Y", ny, "y");
        for_each_map(y, a, [&](const FinMap& el) {
          for_each_map(y, x, [&](const FinMap& alpha) { elements.emplace_back(el, alpha); });
        });
      }
      std::vector<SubobjectAtStage> subs;
      std::vector<std::vector<bool>> members;
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (na * nx)); ++mask) {
        std::vector<IndexPair> ps;
        for (std::size_t i = 0; i < na; ++i)
          for (std::size_t j = 0; j < nx; ++j)
            if (mask >> (i * nx + j) & 1u) ps.emplace_back(i, j);
        subs.emplace_back(a, x, ps);
        std::vector<bool> row;
        for (const auto& [el, alpha] : elements) row.push_back(member(el, alpha, subs.back()).has_value());
        members.push_back(std::move(row));
      }
      for (std::size_t i = 0; i < subs.size(); ++i)
        for (std::size_t j = 0; j < subs.size(); ++j) {
          bool brute = true;
          for (std::size_t k = 0; k < elements.size() && brute; ++k) brute = !members[i][k] || members[j][k];
          o.require(sub_leq(subs[i], subs[j]) == brute && extensionality_leq(subs[i], subs[j]) == brute,
                    "disagreement at |A| = " + std::to_string(na) + ", |X| = " + std::to_string(nx));
          ++pairs;
        }
    }
  o.detail = std::to_string(pairs) + " subobject pairs, stages |Y| <= 3, exhaustive, exact";
  return o;
}

Outcome criterion5() {
  Outcome o;
  std::size_t maps = 0;
  FinSet one("1", {"*"});
  for (std::size_t na = 0; na <= 3; ++na)
    for (std::size_t nx = 0; nx <= 3; ++nx)
      for (std::size_t ne = 0; ne <= 3; ++ne) {
        FinSet a = standard_set("A", na, "a"), x = standard_set("X", nx, "x"), e = standard_set("E", ne, "e");
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (na * nx)); ++mask) {
          std::vector<IndexPair> ps;
          for (std::size_t i = 0; i < na; ++i)
            for (std::size_t j = 0; j < nx; ++j)
              if (mask >> (i * nx + j) & 1u) ps.emplace_back(i, j);
          SubobjectAtStage u(a, x, ps);
          // Law values at the point probes, for every partial map with support u.
          std::set<std::vector<std::size_t>> laws;
          std::size_t with_support = 0;
          for_each_table(u.size(), ne, [&](const std::vector<std::size_t>& values) {
            PartialMapAtStage s(u, e, values);
            Law sigma = law_of(s);
            o.require(yoneda_construct(u, e, sigma) == s, "reconstruction differs");
            std::vector<std::size_t> probes;
            for (auto [i, j] : u.pairs()) probes.push_back(sigma(FinMap(one, a, {i}), FinMap(one, x, {j}))(0));
            laws.insert(probes);
            ++with_support;
            ++maps;
          });
          o.require(laws.size() == with_support, "two partial maps share a law");
        }
      }
  o.detail = std::to_string(maps) + " partial maps, each against all rivals on its support, exact";
  return o;
}

struct PreservingConfig {
  EndoRelation ra, rb, rc;
  FinMap f, g;  // A -> B -> C
  FinMap p;     // over C
  FinMap q, r;  // r: q -> p_B vertical over B
  FinMap pb;    // over B
};

PreservingConfig random_configuration(std::uint64_t i) {
  auto rng = gen::instance_rng(kSeed, "acceptance-phi", i);
  std::size_t radius = gen::uniform(rng, 0, 1);
  FinSet c = gen::random_set(rng, "C", 3, "c", 1);
  Relation gc = gen::random_graph(rng, c);
  FinSet b = gen::random_set(rng, "B", 3, "b", 1);
  FinMap g = gen::random_map(rng, b, c);
  Relation gb = gen::random_graph_over(rng, b, g, gc);
  FinSet a = gen::random_set(rng, "A", 3, "a", 1);
  FinMap f = gen::random_map(rng, a, b);
  Relation ga = gen::random_graph_over(rng, a, f, gb);
  FinMap p = gen::random_bundle(rng, c, 2);
  FinMap pb = gen::random_bundle(rng, b, 2, "EB");
  FinMap r(pb);
  FinMap q = gen::random_vertical_source(rng, pb, 2, "F", &r);
  return PreservingConfig{ball_relation(ga, radius), ball_relation(gb, radius), ball_relation(gc, radius), f, g, p,
                          q, r, pb};
}

Outcome criterion6() {
  Outcome o;
  for (std::uint64_t i = 0; i < 100; ++i) {
    PreservingConfig cfg = random_configuration(i);
    FinMap all = identity(cfg.f.dom());
    PhiContext outer = make_phi_context(*check_preserves(cfg.g, cfg.g, cfg.rb.base(), cfg.rc.base()), cfg.p);
    PhiContext inner =
        make_phi_context(*check_preserves(cfg.f, cfg.f, cfg.ra.base(), cfg.rb.base()), outer.square.left());
    o.require(phi_compose_check(outer, inner, all), "phi composition fails on configuration " + std::to_string(i));
    o.require(cluex_check(cfg.ra, cfg.rb, cfg.f, cfg.pb, cfg.r, all),
              "Cluex square fails on configuration " + std::to_string(i));
  }
  o.detail = "100 configurations, stage = whole base, exact table equality";
  return o;
}

Outcome criterion7(const std::vector<JetInstance>& instances) {
  Outcome o;
  std::size_t jets = 0, maps = 0;
  for (const auto& [r, p] : instances) {
    JetBundle jb(r, p);
    for (std::size_t n = 0; n <= 2; ++n) {
      FinSet x = standard_set("X", n);
      // Every map h: X -> J(p), indexed by the jet it pulls the generic jet back to.
      std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>, std::vector<std::vector<std::size_t>>>
          pulled_back;
      for_each_table(n, jb.total().size(), [&](const std::vector<std::size_t>& h) {
        SectionJet j = classified_jet(jb, FinMap(x, jb.total(), h));
        std::vector<std::size_t> at(j.at.table().begin(), j.at.table().end());
        pulled_back[{at, j.section.map().values()}].push_back(h);
        ++maps;
      });
      if (r.dst().empty() && n > 0) continue;
      for_each_map(x, r.dst(), [&](const FinMap& b) {
        for (const SectionJet& j : enumerate_jets(r, b, p)) {
          FinMap h = classify(jb, j);
          std::vector<std::size_t> at(b.table().begin(), b.table().end());
          auto it = pulled_back.find({at, j.section.map().values()});
          bool unique = it != pulled_back.end() && it->second.size() == 1 &&
                        it->second[0] == std::vector<std::size_t>(h.table().begin(), h.table().end());
          o.require(unique, "classifying map is not the unique one");
          ++jets;
        }
      });
    }
  }
  o.detail = std::to_string(jets) + " jets at stages |X| <= 2 against " + std::to_string(maps) +
             " maps into J(p), exact";
  return o;
}

Outcome criterion8() {
  Outcome o;
  P3Fixture p3 = p3_fixture();
  std::size_t bc = 0;
  for_each_map(standard_set("B0", 2, "q"), p3.base, [&](const FinMap& g) {
    o.require(beck_chevalley_check(g, p3.ball.base(), p3.bundle, 2), "representing object fails on the fixture");
    ++bc;
  });
  for (std::uint64_t i = 0; i < 50; ++i) {
    auto rng = gen::instance_rng(kSeed, "acceptance-bc", i);
    FinSet a = gen::random_set(rng, "A", 3, "a");
    FinSet a0 = gen::random_set(rng, "A0", 3, "p", 1);
    FinSet b0 = gen::random_set(rng, "B0", 3, "q");
    o.require(beck_chevalley_check(gen::random_map(rng, b0, a0), gen::random_relation(rng, a, a0),
                                   gen::random_bundle(rng, a, 2), 2),
              "representing object fails on instance " + std::to_string(i));
    ++bc;
  }

  std::size_t mates = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    auto rng = gen::instance_rng(kSeed, "acceptance-mate", i);
    FinSet a = gen::random_set(rng, "A", 3, "a", 1);
    FinSet m = gen::random_set(rng, "M", 3, "m");
    FinSet b = gen::random_set(rng, "B", 3, "b", 1);
    FinSet b1 = gen::random_set(rng, "B1", 3, "q", 1);
    FinMap c = gen::random_map(rng, m, a), d = gen::random_map(rng, m, b), g = gen::random_map(rng, b1, b);
    PullbackResult pb = pullback(g, d);
    SpanMorphism s{Span(compose(c, pb.to_right), pb.to_left), Span(c, d), identity(a), pb.to_right, g};
    MateResult mate = mate_transform(s, Bundle(gen::random_bundle(rng, a, 2)));
    o.require(right_square_is_pullback(s) && mate.inverse.has_value() &&
                  compose(*mate.inverse, mate.component.arrow()) == identity(mate.component.src().total()) &&
                  compose(mate.component.arrow(), *mate.inverse) == identity(mate.component.dst().total()),
              "mate over a pullback square is not invertible");
    ++mates;
  }

  // A square whose apex map collapses two points: the mate forgets a choice.
  FinSet a("A", {"a"}), b("B", {"b"}), m("M", {"m1", "m2"}), m1("M1", {"n"});
  SpanMorphism collapse{Span(constant_map(m1, a, 0), constant_map(m1, b, 0)),
                        Span(constant_map(m, a, 0), constant_map(m, b, 0)), identity(a), constant_map(m1, m, 0),
                        identity(b)};
  MateResult bad = mate_transform(collapse, Bundle(gen::bundle_with_fibers(a, {2})));
  o.require(!right_square_is_pullback(collapse) && !bad.inverse.has_value(), "collapsing mate is invertible");
  o.detail = std::to_string(bc) + " representing-object checks, " + std::to_string(mates) +
             " invertible mates over pullbacks, non-pullback mate " + std::to_string(bad.component.src().total().size()) +
             " -> " + std::to_string(bad.component.dst().total().size()) + " elements, not invertible";
  return o;
}

Outcome criterion9() {
  Outcome o;
  P3Fixture p3 = p3_fixture();
  Span legs = p3.ball.base().legs();
  TerminalityReport report = distributivity_terminal(legs.left(), legs.right(), Bundle(p3.bundle), 4);
  o.require(report.terminal, "generic jet is not terminal");

  JetBundle jb(p3.ball.base(), p3.bundle);
  Comorphism eps = generic_jet_comorphism(legs, jb);
  const FinMap& v = eps.vertical().arrow();
  auto target_fibers = fibers(eps.src().map());
  std::vector<std::size_t> table(v.table().begin(), v.table().end());
  std::size_t mutated = npos;
  for (std::size_t w = 0; w < table.size() && mutated == npos; ++w)
    for (std::size_t other : target_fibers[eps.src().map()(table[w])])
      if (other != table[w]) {
        table[w] = other;
        mutated = w;
        break;
      }
  o.require(mutated != npos, "no vertical value can be changed");
  Comorphism wrong(eps.over(), eps.src(), eps.dst(), FinMap(v.dom(), v.cod(), table));
  TerminalityReport wrong_report = comorphism_is_terminal(wrong, 4);
  o.require(!wrong_report.terminal, "mutated generic jet is still terminal");
  o.detail = "fixture terminal over " + std::to_string(report.codomains) + " codomains / " +
             std::to_string(report.comorphisms) + " comorphisms (bound 4); mutation at '" +
             (mutated == npos ? std::string("?") : v.dom()[mutated]) + "' is not terminal";
  return o;
}

Outcome criterion10() {
  Outcome o;
  for (std::uint64_t i = 0; i < 100; ++i) {
    auto rng = gen::instance_rng(kSeed, "acceptance-global", i);
    std::size_t radius = gen::uniform(rng, 0, 1);
    std::vector<FinSet> bases{gen::random_set(rng, "A0", 3, "p", 1)};
    std::vector<Relation> graphs{gen::random_graph(rng, bases[0])};
    std::vector<EndoRelation> balls{ball_relation(graphs[0], radius)};
    std::vector<Bundle> bundles{Bundle(gen::random_bundle(rng, bases[0], 2, "E0"))};
    std::vector<Comorphism> chain;
    for (std::size_t k = 1; k <= 3; ++k) {
      FinSet ak = gen::random_set(rng, "A" + std::to_string(k), 3, "a" + std::to_string(k) + "_", 1);
      FinMap f = gen::random_map(rng, ak, bases.back());
      graphs.push_back(gen::random_graph_over(rng, ak, f, graphs.back()));
      balls.push_back(ball_relation(graphs.back(), radius));
      bases.push_back(ak);
      Bundle pulled = pullback_bundle(f, bundles.back());
      FinMap v(pulled.map());
      Bundle src(gen::random_vertical_target(rng, pulled.map(), 2, "E" + std::to_string(k), &v));
      chain.emplace_back(f, src, bundles.back(), v);
      bundles.push_back(src);
    }
    for (std::size_t k = 0; k < bundles.size(); ++k)
      o.require(global_jet(identity_comorphism(bundles[k]), balls[k], balls[k]) ==
                    identity_comorphism(jet_bundle_of(balls[k], bundles[k])),
                "identity not preserved on chain " + std::to_string(i));
    auto jet = [&](std::size_t k) { return global_jet(chain[k], balls[k + 1], balls[k]); };
    Comorphism whole = comorphism_compose(chain[0], comorphism_compose(chain[1], chain[2]));
    o.require(global_jet(whole, balls[3], balls[0]) == comorphism_compose(jet(0), comorphism_compose(jet(1), jet(2))),
              "composition not preserved on chain " + std::to_string(i));
  }
  o.detail = "100 chains of length 3, identities on all 4 levels, exact";
  return o;
}

std::string run_in_process(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  run_cli(args, out, err);
  return out.str();
}

#ifdef KJET_CLI_PATH
std::string run_binary(const std::string& args) {
  std::string command = std::string(KJET_CLI_PATH) + " " + args;
  std::string out;
  if (FILE* pipe = popen(command.c_str(), "r")) {
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    pclose(pipe);
  }
  return out;
}
#endif

Outcome criterion11() {
  Outcome o;
  std::vector<std::string> args{"check", "--suite", "all", "--seed", "42"};
  std::string first = run_in_process(args);
  o.require(first.find("suites passed") != std::string::npos, "suite report shows failures");
  o.require(run_in_process(args) == first, "second run differs");
  std::size_t variants = 2;
  for (const char* threads : {"2", "4", "0"}) {
    auto with_threads = args;
    with_threads.insert(with_threads.end(), {"--threads", threads});
    o.require(run_in_process(with_threads) == first, std::string("report differs with --threads ") + threads);
    ++variants;
  }
#ifdef KJET_CLI_PATH
  o.require(run_binary("check --suite all --seed 42") == first, "binary report differs");
  o.require(run_binary("check --suite all --seed 42 --threads 3") == first, "binary report differs with threads");
  variants += 2;
#endif
  o.detail = std::to_string(variants) + " runs byte-identical (" + std::to_string(first.size()) + " bytes)";
  return o;
}

}  // namespace

int main() {
  std::vector<JetInstance> instances = criterion1_instances();
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria{
      {"product-of-fibers", [&] { return criterion1(instances); }},
      {"dual-construction", [&] { return criterion2(instances); }},
      {"adjunction", criterion3},
      {"extensionality", criterion4},
      {"yoneda", criterion5},
      {"phi-composition-cluex", criterion6},
      {"classifying-map", [&] { return criterion7(instances); }},
      {"beck-chevalley", criterion8},
      {"distributivity", criterion9},
      {"global-functor", criterion10},
      {"determinism", criterion11},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[k].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.failure = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << (k + 1) << ' ' << criteria[k].name << ": "
              << (o.pass ? o.detail : o.failure) << " [" << fixed(seconds_since(t0)) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

#pragma once

// Randomized property suites over small instances. Instance i of suite s draws
// from gen::instance_rng(seed, s, i), so reports depend only on the seed and the
// bounds, never on the thread count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "kjet/enumerate.hpp"
#include "kjet/fibdual.hpp"
#include "kjet/generate.hpp"
#include "kjet/jets.hpp"
#include "kjet/kripke.hpp"
#include "kjet/polyfun.hpp"
#include "kjet/relations.hpp"
#include "kjet/workspace.hpp"

namespace kjet {

struct SuiteConfig {
  std::uint64_t seed = 42;
  std::size_t max_obj = 3;
  std::size_t max_fiber = 3;
  std::size_t trials = 200;
  std::size_t threads = 1;  // 0: one per hardware thread
};

/// Outcome of one instance: counted checks, the first failure, and the inputs.
struct Trial {
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::string message;
  Workspace fragment;

  void check(bool ok, const std::string& what) {
    if (ok) {
      ++passed;
    } else {
      ++failed;
      if (message.empty()) message = what;
    }
  }
};

struct Suite {
  std::string name;
  std::string summary;
  std::function<void(gen::Rng&, const SuiteConfig&, Trial&)> run;
};

struct Counterexample {
  std::size_t instance = 0;
  std::string message;
  std::string workspace;
};

struct SuiteReport {
  std::string suite;
  SuiteConfig config;
  std::size_t instances = 0;
  std::size_t checks_passed = 0;
  std::size_t checks_failed = 0;
  std::optional<Counterexample> first_failure;

  bool ok() const { return checks_failed == 0; }
};

namespace suites {

inline FinMap relabel(const FinMap& f, const std::string& dom, const std::string& cod) {
  return FinMap(f.dom().renamed(dom), f.cod().renamed(cod), std::vector<std::size_t>(f.table().begin(), f.table().end()));
}

inline void add_objects(Workspace& ws, const std::vector<std::pair<std::string, FinSet>>& objects) {
  for (const auto& [name, set] : objects) ws.add_object(name, set);
}

inline FinMap point(const FinSet& a, std::size_t i) { return FinMap(FinSet("1", {"*"}), a, {i}); }

inline std::size_t product_of_fibers(const std::vector<std::vector<std::size_t>>& fib,
                                     const std::vector<std::size_t>& points) {
  std::size_t n = 1;
  for (std::size_t a : points) n *= fib[a].size();
  return n;
}

// A graph morphism f: A -> B between random graphs and the balls of a common radius.
struct GraphPair {
  FinSet a, b;
  FinMap f;
  EndoRelation ball_a, ball_b;
};

inline GraphPair random_graph_pair(gen::Rng& rng, std::size_t max_obj, std::size_t radius) {
  FinSet b = gen::random_set(rng, "B", max_obj, "b", 1);
  FinSet a = gen::random_set(rng, "A", max_obj, "a", 1);
  Relation gb = gen::random_graph(rng, b);
  FinMap f = gen::random_map(rng, a, b);
  Relation ga = gen::random_graph_over(rng, a, f, gb);
  return GraphPair{a, b, f, ball_relation(ga, radius), ball_relation(gb, radius)};
}

inline void product_of_fibers_suite(gen::Rng& rng, const SuiteConfig& cfg, Trial& t) {
  FinSet a = gen::random_set(rng, "A", cfg.max_obj, "a");
  FinSet a0 = gen::random_set(rng, "A0", cfg.max_obj, "p");
  Relation r = gen::random_relation(rng, a, a0);
  FinMap p = gen::random_bundle(rng, a, cfg.max_fiber);
  t.fragment.add_object("A", a);
  t.fragment.add_object("A0", a0);
  t.fragment.add_object("E", p.dom());
  t.fragment.add_relation("R", r);
  t.fragment.add_bundle("p", "pmap", p);

  JetBundle jb(r, p);
  auto fib = fibers(p);
  auto sizes = jb.fiber_sizes();
  for (std::size_t b = 0; b < a0.size(); ++b)
    t.check(sizes[b] == product_of_fibers(fib, r.neighbourhood(b)), "fiber over '" + a0[b] + "' has size " +
                                                                         std::to_string(sizes[b]));
}

inline void polynomial_jet_suite(gen::Rng& rng, const SuiteConfig& cfg, Trial& t) {
  FinSet a = gen::random_set(rng, "A", cfg.max_obj, "a");
  FinSet a0 = gen::random_set(rng, "A0", cfg.max_obj, "p");
  Relation r = gen::random_relation(rng, a, a0);
  FinMap p = gen::random_bundle(rng, a, cfg.max_fiber);
  FinMap v(p);
  FinMap q = gen::random_vertical_source(rng, p, cfg.max_fiber, "F", &v);
  t.fragment.add_object("A", a);
  t.fragment.add_object("A0", a0);
  t.fragment.add_object("E", p.dom());
  t.fragment.add_object("F", q.dom());
  t.fragment.add_relation("R", r);
  t.fragment.add_bundle("p", "pmap", p);
  t.fragment.add_bundle("q", "qmap", q);
  t.fragment.add_map("v", v);

  JetBundle jp(r, p), jq(r, q);
  PolynomialJet pp = polynomial_jet(r, Bundle(p)), pq = polynomial_jet(r, Bundle(q));
  SliceMorphism ip = jet_polynomial_iso(jp, pp), iq = jet_polynomial_iso(jq, pq);
  t.check(is_bijective(ip.arrow()) && is_bijective(iq.arrow()), "comparison map is not a bijection");
  SliceMorphism pulled_v = pullback_morphism(r.legs().left(), SliceMorphism(Bundle(q), Bundle(p), v));
  SliceMorphism poly_v = dependent_product_morphism(pq.product, pp.product, pulled_v);
  t.check(compose(ip.arrow(), jet_on_vertical(jq, jp, v)) == compose(poly_v.arrow(), iq.arrow()),
          "comparison is not natural in v");
}

inline void adjunction_suite(gen::Rng& rng, const SuiteConfig& cfg, Trial& t) {
  const std::size_t fiber = std::min<std::size_t>(cfg.max_fiber, 2);
  FinSet b = gen::random_set(rng, "B", cfg.max_obj, "b", 1);
  FinSet m = gen::random_set(rng, "M", cfg.max_obj, "m");
  FinMap d = gen::random_map(rng, m, b);
  FinMap y = gen::random_bundle(rng, b, fiber, "Y");
  FinMap q = gen::random_bundle(rng, m, fiber, "Q");
  t.fragment.add_object("B", b);
  t.fragment.add_object("M", m);
  t.fragment.add_object("Y", y.dom());
  t.fragment.add_object("Q", q.dom());
  t.fragment.add_map("d", d);
  t.fragment.add_bundle("y", "ymap", y);
  t.fragment.add_bundle("q", "qmap", q);

  AdjunctionBijection bij = adjunction_bijection(d, Bundle(y), Bundle(q));
  t.check(bij.roundtrips(), "transpose and untranspose are not inverse");
  // Both hom-sets are products, over the points of Y, of the sections of q over the d-fiber.
  auto qf = fibers(q);
  std::size_t homs = 1;
  for (std::size_t e = 0; e < y.dom().size(); ++e)
    for (std::size_t k = 0; k < m.size(); ++k)
      if (d(k) == y(e)) homs *= qf[k].size();
  t.check(bij.left.size() == homs, "hom(d*y, q) has " + std::to_string(bij.left.size()) + " elements");
  t.check(bij.right.size() == homs, "hom(y, d_*q) has " + std::to_string(bij.right.size()) + " elements");
}

inline void extensionality_suite(gen::Rng& rng, const SuiteConfig& cfg, Trial& t) {
  FinSet a = gen::random_set(rng, "A", cfg.max_obj, "a");
  FinSet x = gen::random_set(rng, "X", cfg.max_obj, "x");
  Relation ru = gen::random_relation(rng, a, x);
  Relation rv = gen::random_relation(rng, a, x);
  if (gen::coin(rng)) rv = Relation(a, x, [&] {
      auto pairs = ru.pairs();
      pairs.insert(pairs.end(), rv.pairs().begin(), rv.pairs().end());
      return pairs;
    }());
  t.fragment.add_object("A", a);
  t.fragment.add_object("X", x);
  t.fragment.add_relation("U", ru);
  t.fragment.add_relation("V", rv);

  SubobjectAtStage u(a, x, ru.pairs()), v(a, x, rv.pairs());
  bool brute = true;
  for (std::size_t n = 0; n <= 2 && brute; ++n) {
    FinSet y = standard_set("Y", n, "y");
    for_each_map(y, a, [&](const FinMap& el) {
      for_each_map(y, x, [&](const FinMap& alpha) {
        if (member(el, alpha, u) && !member(el, alpha, v)) brute = false;
      });
    });
  }
  t.check(sub_leq(u, v) == brute, "sub_leq disagrees with quantification over stages");
  t.check(extensionality_leq(u, v) == brute, "extensionality_leq disagrees with quantification over stages");
}

inline void yoneda_suite(gen::Rng& rng, const SuiteConfig& cfg, Trial& t) {
  FinSet a = gen::random_set(rng, "A", cfg.max_obj, "a");
  FinSet x = gen::random_set(rng, "X", cfg.max_obj, "x");
  FinSet e = gen::random_set(rng, "E", cfg.max_obj, "e", 1);
  Relation support = gen::random_relation(rng, a, x);
  SubobjectAtStage u(a, x, support.pairs());
  std::vector<std::size_t> values(u.size());
  for (auto& v : values) v = gen::uniform(rng, 0, e.size() - 1);
  PartialMapAtStage s(u, e, values);
  t.fragment.add_object("A", a);
  t.fragment.add_object("X", x);
  t.fragment.add_object("E", e);
  t.fragment.add_object("U", u.apex());
  t.fragment.add_relation("S", support);
  t.fragment.add_map("s", s.representative());

  t.check(yoneda_construct(u, e, law_of(s)) == s, "reconstruction differs from the partial map");
  FinMap generic = law_of(s)(u.legs().left(), u.legs().right());
  for (std::size_t k = 0; k < values.size() && e.size() > 1; ++k) {
    std::vector<std::size_t> rival = values;
    rival[k] = (rival[k] + 1) % e.size();
    t.check(!(generic == PartialMapAtStage(u, e, rival).representative()), "a rival partial map has the same law");
  }
}

inline void phi_compose_suite(gen::Rng& rng, const SuiteConfig& cfg, Trial& t) {
  std::size_t radius = gen::uniform(rng, 0, 1);
  FinSet c = gen::random_set(rng, "C", cfg.max_obj, "c", 1);
  Relation gc = gen::random_graph(rng, c);
  FinSet b = gen::random_set(rng, "B", cfg.max_obj, "b", 1);
  FinMap g = gen::random_map(rng, b, c);
  Relation gb = gen::random_graph_over(rng, b, g, gc);
  FinSet a = gen::random_set(rng, "A", cfg.max_obj, "a", 1);
  FinMap f = gen::random_map(rng, a, b);
  Relation ga = gen::random_graph_over(rng, a, f, gb);
  FinMap p = gen::random_bundle(rng, c, cfg.max_fiber);
  std::size_t at = gen::uniform(rng, 0, a.size() - 1);
  EndoRelation ra = ball_relation(ga, radius), rb = ball_relation(gb, radius), rc = ball_relation(gc, radius);
  add_objects(t.fragment, {{"A", a}, {"B", b}, {"C", c}, {"E", p.dom()}});
  t.fragment.add_map("f", f);
  t.fragment.add_map("g", g);
  t.fragment.add_relation("RA", ra.base());
  t.fragment.add_relation("RB", rb.base());
  t.fragment.add_relation("RC", rc.base());
  t.fragment.add_bundle("p", "pmap", p);

  PhiContext outer = make_phi_context(*check_preserves(g, g, rb.base(), rc.base()), p);
  PhiContext inner = make_phi_context(*check_preserves(f, f, ra.base(), rb.base()), outer.square.left());
  t.check(phi_compose_check(outer, inner, point(a, at)), "phi of the pasted square differs at '" + a[at] + "'");
}

inline void cluex_suite(gen::Rng& rng, const SuiteConfig& cfg, Trial& t) {
  GraphPair gp = random_graph_pair(rng, cfg.max_obj, gen::uniform(rng, 0, 1));
  FinMap p = gen::random_bundle(rng, gp.b, cfg.max_fiber);
  FinMap r(p);
  FinMap q = gen::random_vertical_source(rng, p, cfg.max_fiber, "F", &r);
  std::size_t at = gen::uniform(rng, 0, gp.a.size() - 1);
  add_objects(t.fragment, {{"A", gp.a}, {"B", gp.b}, {"E", p.dom()}, {"F", q.dom()}});
  t.fragment.add_map("f", gp.f);
  t.fragment.add_relation("RA", gp.ball_a.base());
  t.fragment.add_relation("RB", gp.ball_b.base());
  t.fragment.add_bundle("p", "pmap", p);
  t.fragment.add_map("r", r);

  t.check(cluex_check(gp.ball_a, gp.ball_b, gp.f, p, r, point(gp.a, at)),
          "square fails at '" + gp.a[at] + "'");
}

inline void classify_suite(gen::Rng& rng, const SuiteConfig& cfg, Trial& t) {
  FinSet a = gen::random_set(rng, "A", cfg.max_obj, "a");
  FinSet a0 = gen::random_set(rng, "A0", cfg.max_obj, "p", 1);
  Relation r = gen::random_relation(rng, a, a0);
  FinMap p = gen::random_bundle(rng, a, cfg.max_fiber);
  FinSet x = gen::random_set(rng, "X", 2, "x");
  FinMap b = gen::random_map(rng, x, a0);
  add_objects(t.fragment, {{"A", a}, {"A0", a0}, {"E", p.dom()}, {"X", x}});
  t.fragment.add_relation("R", r);
  t.fragment.add_bundle("p", "pmap", p);
  t.fragment.add_map("b", b);

  JetBundle jb(r, p);
  for (const SectionJet& j : enumerate_jets(r, b, p)) {
    FinMap h = classify(jb, j);
    t.check(compose(jb.projection(), h) == b && classified_jet(jb, h) == j, "classifying map does not recover the jet");
  }
}

inline void beck_chevalley_suite(gen::Rng& rng, const SuiteConfig& cfg, Trial& t) {
  FinSet a = gen::random_set(rng, "A", cfg.max_obj, "a");
  FinSet a0 = gen::random_set(rng, "A0", cfg.max_obj, "p", 1);
  FinSet b0 = gen::random_set(rng, "B0", cfg.max_obj, "q");
  Relation r = gen::random_relation(rng, a, a0);
  FinMap g = gen::random_map(rng, b0, a0);
  FinMap q = gen::random_bundle(rng, a, cfg.max_fiber);
  add_objects(t.fragment, {{"A", a}, {"A0", a0}, {"B0", b0}, {"E", q.dom()}});
  t.fragment.add_relation("R", r);
  t.fragment.add_map("g", g);
  t.fragment.add_bundle("q", "qmap", q);

  t.check(beck_chevalley_check(g, r, q, 2), "pulled back jet bundle does not represent jets along g");
}

inline void distributivity_suite(gen::Rng& rng, const SuiteConfig& cfg, Trial& t) {
  const std::size_t size = std::min<std::size_t>(cfg.max_obj, 2);
  FinSet a = gen::random_set(rng, "A", size, "a");
  FinSet a0 = gen::random_set(rng, "A0", size, "p", 1);
  Relation r = gen::random_relation(rng, a, a0);
  FinMap p = gen::random_bundle(rng, a, std::min<std::size_t>(cfg.max_fiber, 2));
  add_objects(t.fragment, {{"A", a}, {"A0", a0}, {"E", p.dom()}});
  t.fragment.add_relation("R", r);
  t.fragment.add_bundle("p", "pmap", p);

  Span legs = r.legs();
  t.check(distributivity_terminal(legs.left(), legs.right(), Bundle(p), 2).terminal,
          "generic jet is not terminal among comorphisms with codomain total at most 2");
}

inline void global_jet_suite(gen::Rng& rng, const SuiteConfig& cfg, Trial& t) {
  std::size_t radius = gen::uniform(rng, 0, 1);
  std::vector<FinSet> bases{gen::random_set(rng, "A0", cfg.max_obj, "p", 1)};
  std::vector<Relation> graphs{gen::random_graph(rng, bases[0])};
  std::vector<EndoRelation> balls{ball_relation(graphs[0], radius)};
  std::vector<Comorphism> chain;
  Bundle p(gen::random_bundle(rng, bases[0], cfg.max_fiber, "E0"));
  Bundle p0 = p;
  t.fragment.add_object("A0", bases[0]);
  t.fragment.add_object("E0", p.total());
  t.fragment.add_relation("R0", balls[0].base());
  t.fragment.add_bundle("p0", "p0map", p.map());
  for (std::size_t k = 1; k <= 3; ++k) {
    std::string n = std::to_string(k);
    FinSet ak = gen::random_set(rng, "A" + n, cfg.max_obj, "a" + n + "_", 1);
    FinMap f = gen::random_map(rng, ak, bases.back());
    graphs.push_back(gen::random_graph_over(rng, ak, f, graphs.back()));
    balls.push_back(ball_relation(graphs.back(), radius));
    bases.push_back(ak);
    Bundle pulled = pullback_bundle(f, p);
    FinMap v(pulled.map());
    Bundle src(gen::random_vertical_target(rng, pulled.map(), 2, "E" + n, &v));
    chain.emplace_back(f, src, p, v);
    t.fragment.add_object("A" + n, ak);
    t.fragment.add_object("E" + n, src.total());
    t.fragment.add_object("P" + n, pulled.total());
    t.fragment.add_map("f" + n, f);
    t.fragment.add_relation("R" + n, balls.back().base());
    t.fragment.add_bundle("p" + n, "p" + n + "map", src.map());
    t.fragment.add_map("v" + n, relabel(v, "P" + n, "E" + n));
    p = src;
  }

  t.check(global_jet(identity_comorphism(p0), balls[0], balls[0]) == identity_comorphism(jet_bundle_of(balls[0], p0)),
          "identity is not preserved");
  Comorphism whole = comorphism_compose(chain[0], comorphism_compose(chain[1], chain[2]));
  Comorphism stepwise = comorphism_compose(
      global_jet(chain[0], balls[1], balls[0]),
      comorphism_compose(global_jet(chain[1], balls[2], balls[1]), global_jet(chain[2], balls[3], balls[2])));
  t.check(global_jet(whole, balls[3], balls[0]) == stepwise, "composite of the chain is not preserved");
}

}  // namespace suites

inline const std::vector<Suite>& all_suites() {
  static const std::vector<Suite> list{
      {"product-of-fibers", "jet bundle fibers are products of bundle fibers over the monad",
       suites::product_of_fibers_suite},
      {"polynomial-jet", "d_* c^* agrees with the jet bundle, naturally in verticals", suites::polynomial_jet_suite},
      {"adjunction", "pullback is left adjoint to the dependent product", suites::adjunction_suite},
      {"extensionality", "inclusion of subobjects is decided by generalized elements", suites::extensionality_suite},
      {"yoneda", "partial maps are determined by their stable laws", suites::yoneda_suite},
      {"phi-compose", "phi respects pasting of pullback squares", suites::phi_compose_suite},
      {"cluex", "phi is natural in verticals", suites::cluex_suite},
      {"classify", "every jet is the pullback of the generic jet along its classifying map",
       suites::classify_suite},
      {"beck-chevalley", "the jet bundle is stable under pullback of the base", suites::beck_chevalley_suite},
      {"distributivity", "the generic jet is terminal among comorphisms", suites::distributivity_suite},
      {"global-jet", "the global jet functor preserves identities and composition", suites::global_jet_suite},
  };
  return list;
}

inline const Suite* find_suite(std::string_view name) {
  for (const auto& s : all_suites())
    if (s.name == name) return &s;
  return nullptr;
}

inline SuiteReport run_suite(const Suite& suite, const SuiteConfig& cfg) {
  std::vector<Trial> trials(cfg.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < trials.size(); i = next++) {
      gen::Rng rng = gen::instance_rng(cfg.seed, suite.name, i);
      try {
        suite.run(rng, cfg, trials[i]);
      } catch (const std::exception& e) {
        trials[i].check(false, std::string("error: ") + e.what());
      }
    }
  };
  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(trials.size(), 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }

  SuiteReport report;
  report.suite = suite.name;
  report.config = cfg;
  report.instances = trials.size();
  for (std::size_t i = 0; i < trials.size(); ++i) {
    report.checks_passed += trials[i].passed;
    report.checks_failed += trials[i].failed;
    if (trials[i].failed && !report.first_failure)
      report.first_failure = Counterexample{i, trials[i].message, print_workspace(trials[i].fragment)};
  }
  return report;
}

enum class OutputFormat { Text, Records };

namespace detail {

inline std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\t', ' ');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace detail

inline std::string format_reports(const std::vector<SuiteReport>& reports, OutputFormat format) {
  std::ostringstream out;
  std::size_t failed = 0;
  for (const auto& r : reports) failed += !r.ok();
  if (format == OutputFormat::Records) {
    std::vector<std::string> lines;
    for (const auto& r : reports) {
      std::ostringstream line;
      line << "suite\t" << r.suite << "\tinstances\t" << r.instances << "\tpassed\t" << r.checks_passed << "\tfailed\t"
           << r.checks_failed << "\tseed\t" << r.config.seed << "\tmax-obj\t" << r.config.max_obj << "\tmax-fiber\t"
           << r.config.max_fiber << "\ttrials\t" << r.config.trials;
      lines.push_back(line.str());
      if (!r.first_failure) continue;
      const auto& c = *r.first_failure;
      lines.push_back("counterexample\t" + r.suite + "\t" + std::to_string(c.instance) + "\t" +
                      detail::one_line(c.message));
      auto body = detail::split_lines(c.workspace);
      for (std::size_t k = 0; k < body.size(); ++k) {
        std::ostringstream num;
        num << std::setw(4) << std::setfill('0') << k;
        lines.push_back("fragment\t" + r.suite + "\t" + num.str() + "\t" + detail::one_line(body[k]));
      }
    }
    lines.push_back("summary\tsuites\t" + std::to_string(reports.size()) + "\tfailed\t" + std::to_string(failed));
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) out << l << '\n';
    return out.str();
  }
  for (const auto& r : reports) {
    out << (r.ok() ? "ok   " : "FAIL ") << r.suite << ": " << r.instances << " instances, " << r.checks_passed
        << " checks passed, " << r.checks_failed << " failed (seed " << r.config.seed << ", max-obj "
        << r.config.max_obj << ", max-fiber " << r.config.max_fiber << ", trials " << r.config.trials << ")\n";
    if (!r.first_failure) continue;
    out << "     first counterexample, instance " << r.first_failure->instance << ": " << r.first_failure->message
        << '\n';
    for (const auto& line : detail::split_lines(r.first_failure->workspace)) out << "       " << line << '\n';
  }
  out << (failed ? std::to_string(failed) + " of " + std::to_string(reports.size()) + " suites failed"
                 : "all " + std::to_string(reports.size()) + " suites passed")
      << '\n';
  return out.str();
}

}  // namespace kjet

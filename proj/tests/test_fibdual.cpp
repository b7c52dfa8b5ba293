#include <gtest/gtest.h>

#include "kjet/fibdual.hpp"
#include "kjet/fixtures.hpp"
#include "kjet/generate.hpp"

namespace kjet {
namespace {

// A comorphism into p over f: a random vertical out of f*(p).
Comorphism random_comorphism(gen::Rng& rng, const FinMap& f, const Bundle& p, const std::string& name) {
  Bundle pulled = pullback_bundle(f, p);
  FinMap v(pulled.map());
  Bundle src(gen::random_vertical_target(rng, pulled.map(), 2, name, &v));
  return Comorphism(f, src, p, v);
}

struct Level {
  FinSet base;
  Relation graph;
  EndoRelation ball;
};

// Bases A3 -> A2 -> A1 -> A0 with graphs making every base map a graph morphism,
// and a chain of comorphisms c1 over A1 -> A0, c2 over A2 -> A1, c3 over A3 -> A2.
struct Chain {
  std::vector<Level> levels;
  std::vector<FinMap> maps;  // maps[k]: levels[k+1] -> levels[k]
  std::vector<Comorphism> comorphisms;
};

Chain random_chain(gen::Rng& rng, std::size_t length) {
  Chain ch;
  std::size_t radius = gen::uniform(rng, 0, 1);
  FinSet a0 = gen::random_set(rng, "A0", 3, "p", 1);
  Relation g0 = gen::random_graph(rng, a0);
  ch.levels.push_back(Level{a0, g0, ball_relation(g0, radius)});
  Bundle p(gen::random_bundle(rng, a0, 2, "E0"));
  for (std::size_t k = 1; k <= length; ++k) {
    FinSet ak = gen::random_set(rng, "A" + std::to_string(k), 3, "a" + std::to_string(k) + "_", 1);
    FinMap f = gen::random_map(rng, ak, ch.levels.back().base);
    Relation gk = gen::random_graph_over(rng, ak, f, ch.levels.back().graph);
    ch.levels.push_back(Level{ak, gk, ball_relation(gk, radius)});
    ch.maps.push_back(f);
    Comorphism c = random_comorphism(rng, f, p, "E" + std::to_string(k));
    p = c.src();
    ch.comorphisms.push_back(c);
  }
  return ch;
}

TEST(Comorphism, IdentityIsNeutral) {
  for (std::uint64_t i = 0; i < 50; ++i) {
    auto rng = gen::instance_rng(42, "co-identity", i);
    Chain ch = random_chain(rng, 1);
    const Comorphism& c = ch.comorphisms[0];
    EXPECT_EQ(comorphism_compose(c, identity_comorphism(c.src())), c);
    EXPECT_EQ(comorphism_compose(identity_comorphism(c.dst()), c), c);
  }
}

TEST(Comorphism, ComposeIsAssociative) {
  for (std::uint64_t i = 0; i < 100; ++i) {
    auto rng = gen::instance_rng(42, "co-assoc", i);
    Chain ch = random_chain(rng, 3);
    const auto& c = ch.comorphisms;
    EXPECT_EQ(comorphism_compose(c[0], comorphism_compose(c[1], c[2])),
              comorphism_compose(comorphism_compose(c[0], c[1]), c[2]));
  }
}

TEST(Comorphism, ChainMismatchThrows) {
  P3Fixture p3 = p3_fixture();
  Bundle p(p3.bundle);
  Comorphism c = identity_comorphism(p);
  try {
    comorphism_compose(c, identity_comorphism(Bundle(identity(p3.base))));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ChainMismatch);
  }
}

TEST(Comorphism, CartesianClosure) {
  for (std::uint64_t i = 0; i < 60; ++i) {
    auto rng = gen::instance_rng(42, "co-cartesian", i);
    FinSet a = gen::random_set(rng, "A", 3, "a", 1);
    FinSet b = gen::random_set(rng, "B", 3, "b", 1);
    FinSet c = gen::random_set(rng, "C", 3, "c", 1);
    Bundle p(gen::random_bundle(rng, a, 2));
    FinMap g = gen::random_map(rng, b, a), f = gen::random_map(rng, c, b);
    Comorphism cg = cartesian_comorphism(g, p);
    Comorphism cf = cartesian_comorphism(f, cg.src());
    EXPECT_TRUE(is_cartesian(cg));
    Comorphism both = comorphism_compose(cg, cf);
    EXPECT_TRUE(is_cartesian(both));
    EXPECT_EQ(both.over(), compose(g, f));
  }
}

TEST(Comorphism, CollapsingVerticalIsNotCartesian) {
  FinSet a("A", {"a"});
  Bundle two(gen::bundle_with_fibers(a, {2})), one(identity(a));
  SliceMorphism collapse(two, one, constant_map(two.total(), a, 0));
  EXPECT_FALSE(is_cartesian(vertical_comorphism(collapse)));
}

TEST(Comorphism, VerticalsComposeInReverse) {
  for (std::uint64_t i = 0; i < 60; ++i) {
    auto rng = gen::instance_rng(42, "co-vertical", i);
    FinSet a = gen::random_set(rng, "A", 3, "a", 1);
    FinMap p = gen::random_bundle(rng, a, 2);
    FinMap v1(p), v2(p);
    FinMap q = gen::random_vertical_target(rng, p, 2, "F", &v1);
    FinMap s = gen::random_vertical_target(rng, q, 2, "G", &v2);
    SliceMorphism u1(Bundle(p), Bundle(q), v1), u2(Bundle(q), Bundle(s), v2);
    EXPECT_EQ(comorphism_compose(vertical_comorphism(u1), vertical_comorphism(u2)),
              vertical_comorphism(compose(u2, u1)));
  }
}

TEST(Comorphism, CartesianOnesMatchPullbackSquares) {
  P3Fixture p3 = p3_fixture();
  FinSet b("B", {"u", "v"});
  FinMap f(b, p3.base, {0, 2});
  Comorphism c = cartesian_comorphism(f, Bundle(p3.bundle));
  PullbackResult pb = pullback(f, p3.bundle);
  EXPECT_EQ(c.src().map(), pb.to_left);
  EXPECT_EQ(c.vertical().arrow(), identity(pb.apex));
}

TEST(GlobalJet, IdentityGoesToIdentity) {
  P3Fixture p3 = p3_fixture();
  Bundle p(p3.bundle);
  Comorphism image = global_jet(identity_comorphism(p), p3.ball, p3.ball);
  EXPECT_EQ(image, identity_comorphism(jet_bundle_of(p3.ball, p)));
}

TEST(GlobalJet, VerticalAgreesWithJetOnVertical) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    auto rng = gen::instance_rng(42, "gj-vertical", i);
    FinSet a = gen::random_set(rng, "A", 3, "a", 1);
    EndoRelation r = ball_relation(gen::random_graph(rng, a), 1);
    FinMap p = gen::random_bundle(rng, a, 2);
    FinMap v(p);
    FinMap q = gen::random_vertical_target(rng, p, 2, "F", &v);
    SliceMorphism u(Bundle(p), Bundle(q), v);
    Comorphism image = global_jet(vertical_comorphism(u), r, r);
    JetBundle jp(r.base(), p), jq(r.base(), q);
    SliceMorphism ju(Bundle(jp.projection()), Bundle(jq.projection()), jet_on_vertical(jp, jq, v));
    EXPECT_EQ(image, vertical_comorphism(ju));
  }
}

TEST(GlobalJet, PreservesCompositionOnChains) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    auto rng = gen::instance_rng(42, "gj-chain", i);
    Chain ch = random_chain(rng, 3);
    const auto& c = ch.comorphisms;
    const auto& lv = ch.levels;
    Comorphism whole = comorphism_compose(c[0], comorphism_compose(c[1], c[2]));
    Comorphism lhs = global_jet(whole, lv[3].ball, lv[0].ball);
    Comorphism rhs = comorphism_compose(global_jet(c[0], lv[1].ball, lv[0].ball),
                                        comorphism_compose(global_jet(c[1], lv[2].ball, lv[1].ball),
                                                           global_jet(c[2], lv[3].ball, lv[2].ball)));
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(GlobalJet, RejectsNonPreservingBaseMap) {
  P3Fixture p3 = p3_fixture();
  FinMap swap(p3.base, p3.base, {1, 0, 2});
  EndoRelation diag(Relation::diagonal(p3.base));
  Comorphism c = cartesian_comorphism(swap, Bundle(p3.bundle));
  EXPECT_NO_THROW(global_jet(c, diag, p3.ball));
  try {
    global_jet(c, p3.ball, p3.ball);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PreservationViolated);
  }
}

TEST(BoundedFiberVectors, CountsCompositions) {
  // weak compositions of at most 4 into 3 parts: C(7, 3)
  EXPECT_EQ(bounded_fiber_vectors(3, 4).size(), 35u);
  EXPECT_EQ(bounded_fiber_vectors(0, 4).size(), 1u);
}

TEST(Distributivity, DiagonalWithIdentityBundle) {
  FinSet a = standard_set("A", 2, "a");
  auto report = distributivity_terminal(identity(a), identity(a), Bundle(identity(a)), 3);
  EXPECT_TRUE(report.terminal);
  EXPECT_EQ(report.codomains, bounded_fiber_vectors(2, 3).size());
}

TEST(Distributivity, FixtureIsTerminalAndMutationIsNot) {
  P3Fixture p3 = p3_fixture();
  Span legs = p3.ball.base().legs();
  Bundle p(p3.bundle);
  auto report = distributivity_terminal(legs.left(), legs.right(), p, 4);
  EXPECT_TRUE(report.terminal);
  EXPECT_GT(report.comorphisms, 0u);

  JetBundle jb(p3.ball.base(), p3.bundle);
  Comorphism eps = generic_jet_comorphism(legs, jb);
  const FinMap& v = eps.vertical().arrow();
  auto target_fibers = fibers(eps.src().map());
  std::vector<std::size_t> table(v.table().begin(), v.table().end());
  bool mutated = false;
  for (std::size_t w = 0; w < table.size() && !mutated; ++w) {
    const auto& fib = target_fibers[eps.src().map()(table[w])];
    for (std::size_t other : fib)
      if (other != table[w]) {
        table[w] = other;
        mutated = true;
        break;
      }
  }
  ASSERT_TRUE(mutated);
  Comorphism wrong(eps.over(), eps.src(), eps.dst(), FinMap(v.dom(), v.cod(), table));
  EXPECT_FALSE(comorphism_is_terminal(wrong, 4).terminal);
}

TEST(Distributivity, RandomRelations) {
  for (std::uint64_t i = 0; i < 10; ++i) {
    auto rng = gen::instance_rng(42, "distributivity", i);
    FinSet a = gen::random_set(rng, "A", 2, "a", 1);
    FinSet a0 = gen::random_set(rng, "A0", 2, "p", 1);
    Relation r = gen::random_relation(rng, a, a0);
    Span legs = r.legs();
    EXPECT_TRUE(distributivity_terminal(legs.left(), legs.right(), Bundle(gen::random_bundle(rng, a, 2)), 3).terminal);
  }
}

}  // namespace
}  // namespace kjet

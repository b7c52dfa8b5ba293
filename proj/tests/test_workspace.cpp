#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "kjet/fixtures.hpp"
#include "kjet/generate.hpp"
#include "kjet/workspace.hpp"

namespace kjet {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

WorkspaceError parse_error(std::string_view text) {
  try {
    parse_workspace(text);
  } catch (const WorkspaceError& e) {
    return e;
  }
  ADD_FAILURE() << "parsed without error: " << text;
  return WorkspaceError(ErrorKind::SyntaxError, {}, "none");
}

TEST(Parse, SingleObject) {
  Workspace ws = parse_workspace("object A { x y }\n");
  ASSERT_EQ(ws.objects().size(), 1u);
  EXPECT_EQ(ws.object("A").elements(), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(ws.maps().size(), 0u);
}

TEST(Parse, EmptyTextAndComments) {
  EXPECT_EQ(parse_workspace("").objects().size(), 0u);
  EXPECT_EQ(parse_workspace("# nothing\n  # here\n").objects().size(), 0u);
  EXPECT_EQ(parse_workspace("object A { } # trailing").object("A").size(), 0u);
}

TEST(Parse, FixtureFileMatchesBuiltFixture) {
  Workspace ws = parse_workspace(read_file(std::string(KJET_SOURCE_DIR) + "/fixtures/p3.kjw"));
  P3Fixture p3 = p3_fixture();
  EXPECT_EQ(ws.object("A"), p3.base);
  EXPECT_EQ(ws.bundle("p").map(), p3.bundle);
  EXPECT_EQ(ws.relation("G"), p3.adjacency);
  EXPECT_EQ(ws.relation("R"), p3.ball.base());
  EXPECT_EQ(ws.bundles().entries()[0].second.map, "pmap");
}

TEST(Parse, FixtureGolden) {
  Workspace ws = parse_workspace(read_file(std::string(KJET_SOURCE_DIR) + "/fixtures/p3.kjw"));
  EXPECT_EQ(print_workspace(ws),
            "object A { a b c }\n"
            "object E { a1 a2 b1 c1 c2 }\n"
            "map pmap : E -> A { a1 -> a ; a2 -> a ; b1 -> b ; c1 -> c ; c2 -> c }\n"
            "relation G : A ~ A { (a,b) (b,a) (b,c) (c,b) }\n"
            "relation R : A ~ A { (a,a) (a,b) (b,a) (b,b) (b,c) (c,b) (c,c) }\n"
            "bundle p = pmap\n");
}

TEST(Parse, MultiLineDeclarations) {
  Workspace ws = parse_workspace(
      "object A {\n  a\n  b\n}\n"
      "map f : A -> A {\n  a -> b\n  b -> a\n}\n");
  EXPECT_EQ(ws.map("f").table()[0], 1u);
}

TEST(Errors, UnknownObjectReferenceHasLine) {
  WorkspaceError e = parse_error("object A { a }\n\nmap f : A -> B { a -> b }\n");
  EXPECT_EQ(e.kind(), ErrorKind::UnknownReference);
  EXPECT_EQ(e.where().line, 3u);
  EXPECT_EQ(e.where().column, 14u);
}

TEST(Errors, UnknownElement) {
  WorkspaceError e = parse_error("object A { a }\nrelation R : A ~ A { (a,z) }");
  EXPECT_EQ(e.kind(), ErrorKind::UnknownReference);
  EXPECT_EQ(e.where().line, 2u);
}

TEST(Errors, UnknownBundleMap) {
  EXPECT_EQ(parse_error("bundle p = q").kind(), ErrorKind::UnknownReference);
}

TEST(Errors, NonTotalMap) {
  WorkspaceError missing = parse_error("object A { a b }\nmap f : A -> A { a -> b }");
  EXPECT_EQ(missing.kind(), ErrorKind::NonTotalMap);
  EXPECT_EQ(missing.where().line, 2u);
  WorkspaceError twice = parse_error("object A { a b }\nmap f : A -> A { a -> b ; a -> a ; b -> b }");
  EXPECT_EQ(twice.kind(), ErrorKind::NonTotalMap);
  EXPECT_EQ(twice.where().column, 27u);
}

TEST(Errors, DuplicateNames) {
  EXPECT_EQ(parse_error("object A { a }\nobject A { b }").kind(), ErrorKind::DuplicateName);
  EXPECT_EQ(parse_error("object A { a a }").kind(), ErrorKind::DuplicateName);
  EXPECT_EQ(parse_error("object A { a }\ngraph R on A { }\nrelation R : A ~ A { }").kind(), ErrorKind::DuplicateName);
  // Names are unique per kind only.
  EXPECT_NO_THROW(parse_workspace("object p { x }\nmap p : p -> p { x -> x }\nbundle p = p"));
}

TEST(Errors, Syntax) {
  EXPECT_EQ(parse_error("objekt A { }").kind(), ErrorKind::SyntaxError);
  EXPECT_EQ(parse_error("object A { a").kind(), ErrorKind::SyntaxError);
  EXPECT_EQ(parse_error("object A { a$ }").kind(), ErrorKind::SyntaxError);
  EXPECT_EQ(parse_error("object A { \"a }").kind(), ErrorKind::SyntaxError);
  WorkspaceError e = parse_error("object A { a }\nmap f : A A { }");
  EXPECT_EQ(e.kind(), ErrorKind::SyntaxError);
  EXPECT_EQ(e.where().line, 2u);
  EXPECT_EQ(e.where().column, 11u);
}

TEST(Quoting, AwkwardIdentifiersRoundtrip) {
  Workspace ws;
  ws.add_object("A B", FinSet("A B", {"(a,b)", "say \"hi\"", "x->y", "back\\slash"}));
  ws.add_map("f g", FinMap(ws.object("A B"), ws.object("A B"), {1, 2, 3, 0}));
  std::string text = print_workspace(ws);
  EXPECT_EQ(parse_workspace(text), ws);
}

TEST(Roundtrip, RandomWorkspaces) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    auto rng = gen::instance_rng(42, "workspace", i);
    Workspace ws;
    FinSet a = gen::random_set(rng, "A", 4, "a"), b = gen::random_set(rng, "B", 4, "b", 1);
    ws.add_object("A", a);
    ws.add_object("B", b);
    ws.add_map("f", gen::random_map(rng, a, b));
    ws.add_relation("R", gen::random_relation(rng, a, b));
    ws.add_relation("G", gen::random_graph(rng, b));
    FinMap p = gen::random_bundle(rng, b, 3);
    ws.add_object("E", p.dom());
    ws.add_bundle("p", "pmap", p);
    std::string text = print_workspace(ws);
    Workspace again = parse_workspace(text);
    EXPECT_EQ(again, ws);
    EXPECT_EQ(print_workspace(again), text);
  }
}

TEST(Workspace, AddRejectsUndeclaredEnds) {
  Workspace ws;
  ws.add_object("A", FinSet("A", {"a"}));
  EXPECT_THROW(ws.add_map("f", identity(FinSet("B", {"b"}))), Error);
  EXPECT_THROW(ws.add_map("g", identity(FinSet("A", {"z"}))), Error);
  EXPECT_THROW(ws.bundle("p"), Error);
}

}  // namespace
}  // namespace kjet

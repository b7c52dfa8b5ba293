#pragma once

// Named objects, maps, relations and bundles, read from and written to a small
// line-oriented text format:
//
//   object A { a b c }
//   map p : E -> A { a1 -> a ; a2 -> a ; b1 -> b }
//   relation R : A ~ A { (a,a) (a,b) (b,a) }
//   bundle E = p
//   graph G on A { a -- b  b -- c }
//
// Identifiers are runs of letters, digits, '_', '.' and '\''; anything else can be
// written as a double-quoted string. '#' starts a comment.

#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kjet/error.hpp"
#include "kjet/finset.hpp"
#include "kjet/polyfun.hpp"
#include "kjet/relations.hpp"

namespace kjet {

struct Location {
  std::size_t line = 0;
  std::size_t column = 0;
};

class WorkspaceError : public Error {
 public:
  WorkspaceError(ErrorKind kind, Location where, const std::string& what)
      : Error(kind, "line " + std::to_string(where.line) + ", column " + std::to_string(where.column) + ": " + what),
        where_(where) {}

  Location where() const { return where_; }

 private:
  Location where_;
};

/// Name -> value in insertion order.
template <class T>
class NamedTable {
 public:
  bool add(const std::string& name, T value) {
    if (!index_.emplace(name, entries_.size()).second) return false;
    entries_.emplace_back(name, std::move(value));
    return true;
  }

  const T* find(std::string_view name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &entries_[it->second].second;
  }

  const std::vector<std::pair<std::string, T>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  friend bool operator==(const NamedTable& x, const NamedTable& y) { return x.entries_ == y.entries_; }

 private:
  std::vector<std::pair<std::string, T>> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct NamedBundle {
  std::string map;
  Bundle bundle;

  friend bool operator==(const NamedBundle&, const NamedBundle&) = default;
};

class Workspace {
 public:
  /// The set is stored under `name`; maps and relations refer to objects by set name.
  void add_object(const std::string& name, const FinSet& set) {
    if (!objects_.add(name, set.renamed(name))) fail(ErrorKind::DuplicateName, "object '" + name + "'");
  }

  void add_map(const std::string& name, const FinMap& f) {
    const FinSet& dom = resolve(f.dom());
    const FinSet& cod = resolve(f.cod());
    FinMap stored(dom, cod, std::vector<std::size_t>(f.table().begin(), f.table().end()));
    if (!maps_.add(name, std::move(stored))) fail(ErrorKind::DuplicateName, "map '" + name + "'");
  }

  void add_relation(const std::string& name, const Relation& r) {
    Relation stored(resolve(r.src()), resolve(r.dst()), r.pairs());
    if (!relations_.add(name, std::move(stored))) fail(ErrorKind::DuplicateName, "relation '" + name + "'");
  }

  void add_bundle(const std::string& name, const std::string& map_name) {
    Bundle b(map(map_name));
    if (!bundles_.add(name, NamedBundle{map_name, std::move(b)}))
      fail(ErrorKind::DuplicateName, "bundle '" + name + "'");
  }

  /// Adds the map under `map_name` and a bundle over it under `name`.
  void add_bundle(const std::string& name, const std::string& map_name, const FinMap& f) {
    add_map(map_name, f);
    add_bundle(name, map_name);
  }

  const FinSet& object(std::string_view name) const { return lookup(objects_, "object", name); }
  const FinMap& map(std::string_view name) const { return lookup(maps_, "map", name); }
  const Relation& relation(std::string_view name) const { return lookup(relations_, "relation", name); }
  const Bundle& bundle(std::string_view name) const { return lookup(bundles_, "bundle", name).bundle; }

  const NamedTable<FinSet>& objects() const { return objects_; }
  const NamedTable<FinMap>& maps() const { return maps_; }
  const NamedTable<Relation>& relations() const { return relations_; }
  const NamedTable<NamedBundle>& bundles() const { return bundles_; }

  friend bool operator==(const Workspace& x, const Workspace& y) {
    return x.objects_ == y.objects_ && x.maps_ == y.maps_ && x.relations_ == y.relations_ &&
           x.bundles_ == y.bundles_;
  }

 private:
  template <class T>
  static const T& lookup(const NamedTable<T>& table, const char* kind, std::string_view name) {
    const T* found = table.find(name);
    if (!found) fail(ErrorKind::UnknownReference, std::string(kind) + " '" + std::string(name) + "' is not declared");
    return *found;
  }

  const FinSet& resolve(const FinSet& set) const {
    const FinSet& stored = object(set.name());
    require(stored == set, ErrorKind::UnknownReference,
            "set '" + set.name() + "' differs from the declared object of that name");
    return stored;
  }

  NamedTable<FinSet> objects_;
  NamedTable<FinMap> maps_;
  NamedTable<Relation> relations_;
  NamedTable<NamedBundle> bundles_;
};

namespace detail {

inline bool is_ident_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' || ch == '\'';
}

enum class TokenKind { Ident, Symbol, End };

struct Token {
  TokenKind kind;
  std::string text;
  Location where;
  bool quoted = false;
};

inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, column = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  while (i < text.size()) {
    char ch = text[i];
    Location here{line, column};
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
    } else if (ch == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
    } else if (is_ident_char(ch)) {
      std::size_t start = i;
      while (i < text.size() && is_ident_char(text[i])) advance(1);
      out.push_back({TokenKind::Ident, std::string(text.substr(start, i - start)), here});
    } else if (ch == '"') {
      advance(1);
      std::string value;
      while (true) {
        if (i >= text.size() || text[i] == '\n')
          throw WorkspaceError(ErrorKind::SyntaxError, here, "unterminated string");
        if (text[i] == '"') break;
        if (text[i] == '\\' && i + 1 < text.size()) advance(1);
        value += text[i];
        advance(1);
      }
      advance(1);
      out.push_back({TokenKind::Ident, std::move(value), here, true});
    } else if (text.substr(i, 2) == "->" || text.substr(i, 2) == "--") {
      out.push_back({TokenKind::Symbol, std::string(text.substr(i, 2)), here});
      advance(2);
    } else if (std::string_view("{}:~(),;=").find(ch) != std::string_view::npos) {
      out.push_back({TokenKind::Symbol, std::string(1, ch), here});
      advance(1);
    } else {
      throw WorkspaceError(ErrorKind::SyntaxError, here, std::string("unexpected character '") + ch + "'");
    }
  }
  out.push_back({TokenKind::End, "", Location{line, column}});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  Workspace run() {
    while (peek().kind != TokenKind::End) {
      const Token& head = next();
      if (head.kind != TokenKind::Ident || head.quoted) error(head, "expected a declaration keyword");
      if (head.text == "object") object();
      else if (head.text == "map") map();
      else if (head.text == "relation") relation();
      else if (head.text == "bundle") bundle();
      else if (head.text == "graph") graph();
      else error(head, "unknown declaration '" + head.text + "'");
    }
    return std::move(ws_);
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] static void error(const Token& t, const std::string& what, ErrorKind kind = ErrorKind::SyntaxError) {
    throw WorkspaceError(kind, t.where, what);
  }

  bool at_symbol(std::string_view s) const { return peek().kind == TokenKind::Symbol && peek().text == s; }

  const Token& expect_symbol(std::string_view s) {
    if (!at_symbol(s)) {
      std::string found = peek().kind == TokenKind::End ? "end of input" : "'" + peek().text + "'";
      error(peek(), "expected '" + std::string(s) + "', found " + found);
    }
    return next();
  }

  const Token& expect_ident() {
    if (peek().kind != TokenKind::Ident) {
      std::string found = peek().kind == TokenKind::End ? "end of input" : "'" + peek().text + "'";
      error(peek(), "expected an identifier, found " + found);
    }
    return next();
  }

  void expect_keyword(std::string_view kw) {
    if (peek().kind != TokenKind::Ident || peek().quoted || peek().text != kw)
      error(peek(), "expected '" + std::string(kw) + "'");
    next();
  }

  const FinSet& object_ref(const Token& t) {
    const FinSet* set = ws_.objects().find(t.text);
    if (!set) error(t, "object '" + t.text + "' is not declared", ErrorKind::UnknownReference);
    return *set;
  }

  std::size_t element_ref(const FinSet& set, const Token& t) {
    auto i = set.find(t.text);
    if (!i) error(t, "'" + t.text + "' is not an element of '" + set.name() + "'", ErrorKind::UnknownReference);
    return *i;
  }

  void object() {
    const Token& name = expect_ident();
    expect_symbol("{");
    std::vector<std::string> elements;
    std::map<std::string, bool, std::less<>> seen;
    while (!at_symbol("}")) {
      const Token& id = expect_ident();
      if (!seen.emplace(id.text, true).second)
        error(id, "element '" + id.text + "' listed twice", ErrorKind::DuplicateName);
      elements.push_back(id.text);
    }
    expect_symbol("}");
    if (ws_.objects().find(name.text)) error(name, "object '" + name.text + "' already declared", ErrorKind::DuplicateName);
    ws_.add_object(name.text, FinSet(name.text, std::move(elements)));
  }

  void map() {
    const Token& name = expect_ident();
    expect_symbol(":");
    const FinSet& dom = object_ref(expect_ident());
    expect_symbol("->");
    const FinSet& cod = object_ref(expect_ident());
    const Token& open = expect_symbol("{");
    std::vector<std::size_t> table(dom.size(), npos);
    while (!at_symbol("}")) {
      const Token& x = expect_ident();
      std::size_t i = element_ref(dom, x);
      expect_symbol("->");
      std::size_t v = element_ref(cod, expect_ident());
      if (table[i] != npos) error(x, "'" + x.text + "' is assigned twice", ErrorKind::NonTotalMap);
      table[i] = v;
      if (at_symbol(";")) next();
    }
    expect_symbol("}");
    for (std::size_t i = 0; i < table.size(); ++i)
      if (table[i] == npos)
        error(open, "map '" + name.text + "' has no value for '" + dom[i] + "'", ErrorKind::NonTotalMap);
    if (ws_.maps().find(name.text)) error(name, "map '" + name.text + "' already declared", ErrorKind::DuplicateName);
    ws_.add_map(name.text, FinMap(dom, cod, std::move(table)));
  }

  void relation() {
    const Token& name = expect_ident();
    expect_symbol(":");
    const FinSet& src = object_ref(expect_ident());
    expect_symbol("~");
    const FinSet& dst = object_ref(expect_ident());
    expect_symbol("{");
    std::vector<IndexPair> pairs;
    while (!at_symbol("}")) {
      expect_symbol("(");
      std::size_t a = element_ref(src, expect_ident());
      expect_symbol(",");
      std::size_t b = element_ref(dst, expect_ident());
      expect_symbol(")");
      pairs.emplace_back(a, b);
      if (at_symbol(",") || at_symbol(";")) next();
    }
    expect_symbol("}");
    add_relation(name, Relation(src, dst, std::move(pairs)));
  }

  void graph() {
    const Token& name = expect_ident();
    expect_keyword("on");
    const FinSet& vertices = object_ref(expect_ident());
    expect_symbol("{");
    std::vector<IndexPair> edges;
    while (!at_symbol("}")) {
      std::size_t a = element_ref(vertices, expect_ident());
      expect_symbol("--");
      std::size_t b = element_ref(vertices, expect_ident());
      edges.emplace_back(a, b);
      if (at_symbol(",") || at_symbol(";")) next();
    }
    expect_symbol("}");
    add_relation(name, graph_adjacency(vertices, edges));
  }

  void add_relation(const Token& name, Relation r) {
    if (ws_.relations().find(name.text))
      error(name, "relation '" + name.text + "' already declared", ErrorKind::DuplicateName);
    ws_.add_relation(name.text, r);
  }

  void bundle() {
    const Token& name = expect_ident();
    expect_symbol("=");
    const Token& target = expect_ident();
    if (!ws_.maps().find(target.text))
      error(target, "map '" + target.text + "' is not declared", ErrorKind::UnknownReference);
    if (ws_.bundles().find(name.text))
      error(name, "bundle '" + name.text + "' already declared", ErrorKind::DuplicateName);
    ws_.add_bundle(name.text, target.text);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Workspace ws_;
};

inline std::string quote(std::string_view id) {
  bool bare = !id.empty();
  for (char ch : id) bare = bare && is_ident_char(ch);
  if (bare) return std::string(id);
  std::string out = "\"";
  for (char ch : id) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

}  // namespace detail

inline Workspace parse_workspace(std::string_view text) { return detail::Parser(text).run(); }

/// Canonical text: objects, maps, relations, bundles, each in declaration order.
/// Graphs are written as the relations they denote.
inline std::string print_workspace(const Workspace& ws) {
  using detail::quote;
  std::ostringstream out;
  for (const auto& [name, set] : ws.objects().entries()) {
    out << "object " << quote(name) << " {";
    for (const auto& e : set.elements()) out << ' ' << quote(e);
    out << " }\n";
  }
  for (const auto& [name, f] : ws.maps().entries()) {
    out << "map " << quote(name) << " : " << quote(f.dom().name()) << " -> " << quote(f.cod().name()) << " {";
    for (std::size_t i = 0; i < f.dom().size(); ++i)
      out << (i ? " ; " : " ") << quote(f.dom()[i]) << " -> " << quote(f.cod()[f(i)]);
    out << " }\n";
  }
  for (const auto& [name, r] : ws.relations().entries()) {
    out << "relation " << quote(name) << " : " << quote(r.src().name()) << " ~ " << quote(r.dst().name()) << " {";
    for (auto [a, b] : r.pairs()) out << " (" << quote(r.src()[a]) << "," << quote(r.dst()[b]) << ")";
    out << " }\n";
  }
  for (const auto& [name, b] : ws.bundles().entries()) out << "bundle " << quote(name) << " = " << quote(b.map) << "\n";
  return out.str();
}

}  // namespace kjet

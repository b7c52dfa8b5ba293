#pragma once

// The kjet command line: computations on a workspace file and the suite runner.
// Exit codes: 0 success, 1 a computation or check failed, 2 usage or input error.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "kjet/fibdual.hpp"
#include "kjet/jets.hpp"
#include "kjet/polyfun.hpp"
#include "kjet/relations.hpp"
#include "kjet/suite.hpp"
#include "kjet/workspace.hpp"

namespace kjet {

namespace cli {

/// Thrown for bad command input that is not a workspace parse error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Collects output lines; records are sorted before printing.
class Output {
 public:
  explicit Output(OutputFormat format) : format_(format) {}

  bool records() const { return format_ == OutputFormat::Records; }

  void text(const std::string& line) {
    if (!records()) lines_.push_back(line);
  }

  template <class... Fields>
  void record(const std::string& kind, const Fields&... fields) {
    if (!records()) return;
    std::string line = kind;
    ((line += '\t', line += field_text(fields)), ...);
    lines_.push_back(std::move(line));
  }

  void flush(std::ostream& out) {
    if (records()) std::sort(lines_.begin(), lines_.end());
    for (const auto& l : lines_) out << l << '\n';
    lines_.clear();
  }

 private:
  static std::string field_text(const std::string& s) { return s; }
  static std::string field_text(const char* s) { return s; }
  static std::string field_text(std::size_t n) { return std::to_string(n); }

  OutputFormat format_;
  std::vector<std::string> lines_;
};

struct Options {
  std::string workspace;
  std::string format = "text";
  std::string relation, source, target, bundle, map, left, right, point, at, values, suite = "all";
  std::optional<std::size_t> radius;
  std::size_t bound = 4;
  SuiteConfig suite_config;
};

inline Workspace load_workspace(const std::string& path) {
  if (path.empty()) throw UsageError("--workspace is required for this command");
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read workspace file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_workspace(buf.str());
  } catch (const WorkspaceError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

// Name lookups and argument shapes are input errors, not computation failures.
template <class F>
auto resolve(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

inline Relation relation_arg(const Workspace& ws, const std::string& name, const Options& o) {
  Relation r = resolve([&] { return ws.relation(name); });
  if (!o.radius) return r;
  return resolve([&] { return ball_relation(r, *o.radius).base(); });
}

inline EndoRelation endo_relation_arg(const Workspace& ws, const std::string& name, const Options& o) {
  Relation r = relation_arg(ws, name, o);
  if (!(r.src() == r.dst())) throw UsageError("relation '" + name + "' is not an endo-relation");
  return EndoRelation(r);
}

inline Bundle bundle_arg(const Workspace& ws, const std::string& name) {
  return resolve([&] { return ws.bundle(name); });
}

/// The generalized element named by --point (a map from a one-point stage) or --at.
inline FinMap element_arg(const Workspace& ws, const FinSet& over, const Options& o) {
  if (o.point.empty() == o.at.empty()) throw UsageError("give exactly one of --point and --at");
  if (!o.point.empty()) {
    auto i = over.find(o.point);
    if (!i) throw UsageError("'" + o.point + "' is not an element of '" + over.name() + "'");
    return FinMap(FinSet("1", {"*"}), over, {*i});
  }
  FinMap b = resolve([&] { return ws.map(o.at); });
  if (!(b.cod() == over)) throw UsageError("map '" + o.at + "' does not land in '" + over.name() + "'");
  return b;
}

inline std::string describe(const SectionJet& j) {
  const PartialMapAtStage& s = j.section.map();
  bool point = s.stage().size() == 1;
  std::string out;
  for (std::size_t k = 0; k < s.support().size(); ++k) {
    auto [a, x] = s.support().pairs()[k];
    if (k) out += ',';
    out += s.over()[a];
    if (!point) out += "@" + s.stage()[x];
    out += ":" + s.target()[s.values()[k]];
  }
  return out;
}

inline int cmd_pullback(const Workspace& ws, const Options& o, Output& out) {
  FinMap f = resolve([&] { return ws.map(o.left); });
  FinMap g = resolve([&] { return ws.map(o.right); });
  if (!(f.cod() == g.cod())) throw UsageError("maps '" + o.left + "' and '" + o.right + "' have different codomains");
  PullbackResult pb = pullback(f, g);
  out.text("pullback of " + o.left + " and " + o.right + ": " + std::to_string(pb.apex.size()) + " elements");
  for (std::size_t w = 0; w < pb.apex.size(); ++w) {
    const std::string& x = f.dom()[pb.to_left(w)];
    const std::string& y = g.dom()[pb.to_right(w)];
    out.text("  " + x + " " + y + " over " + f.cod()[f(pb.to_left(w))]);
    out.record("element", x, y, f.cod()[f(pb.to_left(w))]);
  }
  return 0;
}

inline int cmd_monad(const Workspace& ws, const Options& o, Output& out) {
  Relation r = relation_arg(ws, o.relation, o);
  FinMap b = element_arg(ws, r.dst(), o);
  SubobjectAtStage m = monad(r, b);
  bool point = b.dom().size() == 1;
  std::string members;
  for (auto [a, x] : m.pairs()) {
    members += " " + r.src()[a] + (point ? "" : "@" + b.dom()[x]);
    out.record("member", r.src()[a], b.dom()[x]);
  }
  out.text("M(" + (point ? b.cod()[b(0)] : o.at) + ") = {" + members + " }");
  return 0;
}

inline int cmd_jets(const Workspace& ws, const Options& o, Output& out) {
  Relation r = relation_arg(ws, o.relation, o);
  Bundle p = bundle_arg(ws, o.bundle);
  if (!(p.base() == r.src())) throw UsageError("bundle '" + o.bundle + "' is not over the relation's source");
  FinMap b = element_arg(ws, r.dst(), o);
  auto jets = enumerate_jets(r, b, p.map());
  out.text(std::to_string(jets.size()) + " jets");
  for (const auto& j : jets) {
    out.text("  " + describe(j));
    out.record("jet", describe(j));
  }
  return 0;
}

inline int cmd_jetbundle(const Workspace& ws, const Options& o, Output& out) {
  Relation r = relation_arg(ws, o.relation, o);
  Bundle p = bundle_arg(ws, o.bundle);
  if (!(p.base() == r.src())) throw UsageError("bundle '" + o.bundle + "' is not over the relation's source");
  JetBundle jb(r, p.map());
  auto fib = fibers(jb.projection());
  out.text("J(" + o.bundle + ") over " + r.dst().name() + ": " + std::to_string(jb.total().size()) + " elements");
  for (std::size_t b = 0; b < fib.size(); ++b) {
    out.text("  " + r.dst()[b] + ": " + std::to_string(fib[b].size()));
    out.record("fiber", r.dst()[b], fib[b].size());
    for (std::size_t t : fib[b]) {
      out.text("    " + jb.total()[t]);
      out.record("element", r.dst()[b], jb.total()[t]);
    }
  }
  return 0;
}

inline int cmd_classify(const Workspace& ws, const Options& o, Output& out) {
  Relation r = relation_arg(ws, o.relation, o);
  Bundle p = bundle_arg(ws, o.bundle);
  if (!(p.base() == r.src())) throw UsageError("bundle '" + o.bundle + "' is not over the relation's source");
  if (o.point.empty()) throw UsageError("classify needs --point");
  FinMap b = element_arg(ws, r.dst(), o);
  SubobjectAtStage support = monad(r, b);
  std::vector<std::size_t> values(support.size(), npos);
  std::stringstream list(o.values);
  for (std::string item; std::getline(list, item, ',');) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("--values entries look like point:element, got '" + item + "'");
    auto a = r.src().find(item.substr(0, colon));
    auto e = p.total().find(item.substr(colon + 1));
    if (!a || !e) throw UsageError("unknown point or element in '" + item + "'");
    std::size_t k = support.index_of(*a, 0);
    if (k == npos) throw UsageError("'" + r.src()[*a] + "' is not in the monad of '" + o.point + "'");
    if (p.map()(*e) != *a) throw UsageError("'" + p.total()[*e] + "' does not lie over '" + r.src()[*a] + "'");
    if (values[k] != npos) throw UsageError("'" + r.src()[*a] + "' is given twice");
    values[k] = *e;
  }
  for (std::size_t k = 0; k < values.size(); ++k)
    if (values[k] == npos) throw UsageError("no value for '" + r.src()[support.pairs()[k].first] + "'");
  SectionJet j{b, PartialSection(PartialMapAtStage(support, p.total(), values), p.map())};
  JetBundle jb(r, p.map());
  FinMap h = classify(jb, j);
  const std::string& name = jb.total()[h(0)];
  bool ok = classified_jet(jb, h) == j;
  out.text("class: " + name + (ok ? "" : " (pullback of the generic jet differs)"));
  out.record("class", o.point, name);
  return ok ? 0 : 1;
}

inline int cmd_phi(const Workspace& ws, const Options& o, Output& out) {
  EndoRelation r_src = endo_relation_arg(ws, o.source, o);
  EndoRelation r_dst = endo_relation_arg(ws, o.target, o);
  FinMap f = resolve([&] { return ws.map(o.map); });
  Bundle p = bundle_arg(ws, o.bundle);
  if (!(f.dom() == r_src.carrier() && f.cod() == r_dst.carrier() && p.base() == r_dst.carrier()))
    throw UsageError("phi needs f: source carrier -> target carrier and a bundle over the target carrier");
  Comorphism c = jet_phi_comorphism(f, p, r_src, r_dst);
  const SliceMorphism& v = c.vertical();
  PullbackResult stage = pullback(f, c.dst().map());
  out.text("phi along " + o.map + ": " + std::to_string(stage.apex.size()) + " jets");
  for (std::size_t w = 0; w < stage.apex.size(); ++w) {
    const std::string& a = f.dom()[stage.to_left(w)];
    const std::string& from = c.dst().total()[stage.to_right(w)];
    const std::string& to = v.dst().total()[v.arrow()(w)];
    out.text("  " + a + ": " + from + " -> " + to);
    out.record("phi", a, from, to);
  }
  return 0;
}

inline int cmd_polyjet(const Workspace& ws, const Options& o, Output& out) {
  Relation r = relation_arg(ws, o.relation, o);
  Bundle p = bundle_arg(ws, o.bundle);
  if (!(p.base() == r.src())) throw UsageError("bundle '" + o.bundle + "' is not over the relation's source");
  PolynomialJet pj = polynomial_jet(r, p);
  JetBundle jb(r, p.map());
  SliceMorphism iso = jet_polynomial_iso(jb, pj);
  const FinSet& total = pj.result().total();
  out.text("d_* c^*(" + o.bundle + ") over " + r.dst().name() + ": " + std::to_string(total.size()) + " elements");
  for (std::size_t t = 0; t < jb.total().size(); ++t) {
    const std::string& a0 = r.dst()[jb.projection()(t)];
    const std::string& image = total[iso.arrow()(t)];
    out.text("  " + jb.total()[t] + " -> " + image);
    out.record("element", a0, image);
    out.record("iso", jb.total()[t], image);
  }
  return 0;
}

inline int cmd_dualjet(const Workspace& ws, const Options& o, Output& out) {
  Relation r = relation_arg(ws, o.relation, o);
  Bundle p = bundle_arg(ws, o.bundle);
  if (!(p.base() == r.src())) throw UsageError("bundle '" + o.bundle + "' is not over the relation's source");
  JetBundle jb(r, p.map());
  Comorphism eps = generic_jet_comorphism(r.legs(), jb);
  const SliceMorphism& v = eps.vertical();
  out.text("generic jet as a comorphism c*(" + o.bundle + ") -> J(" + o.bundle + "): " +
           std::to_string(v.src().total().size()) + " elements");
  for (std::size_t w = 0; w < v.src().total().size(); ++w) {
    out.text("  " + v.src().total()[w] + " -> " + v.dst().total()[v.arrow()(w)]);
    out.record("vertical", v.src().total()[w], v.dst().total()[v.arrow()(w)]);
  }
  TerminalityReport rep = comorphism_is_terminal(eps, o.bound);
  out.text(std::string(rep.terminal ? "terminal" : "NOT terminal") + " among comorphisms into bundles of total at most " +
           std::to_string(o.bound) + " (" + std::to_string(rep.codomains) + " codomains, " +
           std::to_string(rep.comorphisms) + " comorphisms)");
  out.record("terminal", rep.terminal ? "true" : "false", "bound", o.bound, "codomains", rep.codomains, "comorphisms",
             rep.comorphisms);
  return rep.terminal ? 0 : 1;
}

inline int cmd_check(const Options& o, std::ostream& stream) {
  std::vector<const Suite*> selected;
  if (o.suite == "all") {
    for (const auto& s : all_suites()) selected.push_back(&s);
  } else if (const Suite* s = find_suite(o.suite)) {
    selected.push_back(s);
  } else {
    std::string names;
    for (const auto& s : all_suites()) names += " " + s.name;
    throw UsageError("unknown suite '" + o.suite + "'; known suites: all" + names);
  }
  std::vector<SuiteReport> reports;
  for (const Suite* s : selected) reports.push_back(run_suite(*s, o.suite_config));
  stream << format_reports(reports, o.format == "records" ? OutputFormat::Records : OutputFormat::Text);
  for (const auto& r : reports)
    if (!r.ok()) return 1;
  return 0;
}

}  // namespace cli

/// Runs the command line `args` (without the program name).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using cli::Options;
  Options o;
  CLI::App app{"Section jets over finite relations", "kjet"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("-w,--workspace", o.workspace, "Workspace file");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "records"}));

  auto with_radius = [&](CLI::App* sub) {
    sub->add_option("--radius", o.radius, "Use the ball of this radius in the relation, read as a graph");
  };
  auto with_element = [&](CLI::App* sub) {
    sub->add_option("--point", o.point, "A point of the relation's target");
    sub->add_option("--at", o.at, "A map into the relation's target, as a generalized element");
  };

  auto* pullback_cmd = app.add_subcommand("pullback", "Pullback of two maps with a common codomain");
  pullback_cmd->add_option("--left", o.left)->required();
  pullback_cmd->add_option("--right", o.right)->required();

  auto* monad_cmd = app.add_subcommand("monad", "The monad M(b) of a relation at an element");
  monad_cmd->add_option("--relation", o.relation)->required();
  with_radius(monad_cmd);
  with_element(monad_cmd);

  auto* jets_cmd = app.add_subcommand("jets", "Section jets of a bundle at an element");
  jets_cmd->add_option("--relation", o.relation)->required();
  jets_cmd->add_option("--bundle", o.bundle)->required();
  with_radius(jets_cmd);
  with_element(jets_cmd);

  auto* jetbundle_cmd = app.add_subcommand("jetbundle", "The jet bundle J(p), fiber by fiber");
  jetbundle_cmd->add_option("--relation", o.relation)->required();
  jetbundle_cmd->add_option("--bundle", o.bundle)->required();
  with_radius(jetbundle_cmd);

  auto* classify_cmd = app.add_subcommand("classify", "The element of J(p) classifying a jet at a point");
  classify_cmd->add_option("--relation", o.relation)->required();
  classify_cmd->add_option("--bundle", o.bundle)->required();
  classify_cmd->add_option("--point", o.point)->required();
  classify_cmd->add_option("--values", o.values, "Jet values as point:element,...")->required();
  with_radius(classify_cmd);

  auto* phi_cmd = app.add_subcommand("phi", "Jets of p at f(a) as jets of f*(p) at a");
  phi_cmd->add_option("--source", o.source, "Relation on the domain of f")->required();
  phi_cmd->add_option("--target", o.target, "Relation on the codomain of f")->required();
  phi_cmd->add_option("--map", o.map)->required();
  phi_cmd->add_option("--bundle", o.bundle)->required();
  with_radius(phi_cmd);

  auto* polyjet_cmd = app.add_subcommand("polyjet", "J(p) as d_* c^*(p), with the comparison to the jet bundle");
  polyjet_cmd->add_option("--relation", o.relation)->required();
  polyjet_cmd->add_option("--bundle", o.bundle)->required();
  with_radius(polyjet_cmd);

  auto* dualjet_cmd = app.add_subcommand("dualjet", "The generic jet as a comorphism, and its terminality");
  dualjet_cmd->add_option("--relation", o.relation)->required();
  dualjet_cmd->add_option("--bundle", o.bundle)->required();
  dualjet_cmd->add_option("--bound", o.bound, "Largest codomain total tried")->capture_default_str();
  with_radius(dualjet_cmd);

  auto* check_cmd = app.add_subcommand("check", "Run randomized property suites");
  check_cmd->add_option("--suite", o.suite, "Suite name or 'all'")->capture_default_str();
  check_cmd->add_option("--seed", o.suite_config.seed)->capture_default_str();
  check_cmd->add_option("--max-obj", o.suite_config.max_obj)->capture_default_str();
  check_cmd->add_option("--max-fiber", o.suite_config.max_fiber)->capture_default_str();
  check_cmd->add_option("--trials", o.suite_config.trials)->capture_default_str();
  check_cmd->add_option("--threads", o.suite_config.threads, "Worker threads, 0 for all cores")
      ->capture_default_str();

  try {
    if (!args.empty() && !args[0].empty() && args[0][0] != '-' && !app.get_subcommand_no_throw(args[0]))
      throw CLI::ParseError("unknown command '" + args[0] + "'", CLI::ExitCodes::ExtrasError);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  cli::Output output(o.format == "records" ? OutputFormat::Records : OutputFormat::Text);
  try {
    if (check_cmd->parsed()) return cli::cmd_check(o, out);
    Workspace ws = cli::load_workspace(o.workspace);
    int code = 0;
    if (pullback_cmd->parsed()) code = cli::cmd_pullback(ws, o, output);
    else if (monad_cmd->parsed()) code = cli::cmd_monad(ws, o, output);
    else if (jets_cmd->parsed()) code = cli::cmd_jets(ws, o, output);
    else if (jetbundle_cmd->parsed()) code = cli::cmd_jetbundle(ws, o, output);
    else if (classify_cmd->parsed()) code = cli::cmd_classify(ws, o, output);
    else if (phi_cmd->parsed()) code = cli::cmd_phi(ws, o, output);
    else if (polyjet_cmd->parsed()) code = cli::cmd_polyjet(ws, o, output);
    else if (dualjet_cmd->parsed()) code = cli::cmd_dualjet(ws, o, output);
    output.flush(out);
    return code;
  } catch (const cli::UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace kjet

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scottgroup/construction_sim.hpp"
#include "scottgroup/group_ring.hpp"
#include "scottgroup/paper_group.hpp"
#include "scottgroup/presentation_io.hpp"
#include "scottgroup/scott.hpp"

namespace sg = scottgroup;

namespace {

enum Exit { kYes = 0, kNo = 1, kUsage = 2, kInternal = 3 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sg::PreconditionError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sg::PreconditionError("cannot write " + path);
  out << text;
}

int verdict(bool yes, const char* yes_text, const char* no_text) {
  std::cout << (yes ? yes_text : no_text) << '\n';
  return yes ? kYes : kNo;
}

std::vector<std::size_t> parse_generators(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw sg::ParseError("expected a comma-separated list of element indices", 0, 1);
    out.push_back(std::stoul(item));
  }
  return out;
}

struct Options {
  std::string file, file2, word, lambda, ring = "z", expr, schedule, out, kind = "dsigma2", generators;
  int cap = sg::kDefaultCap;
  std::int64_t n = 0, times = 1;
  std::size_t stages = 30, max_size = 3, max_cyclic = 6;
};

// pres ----------------------------------------------------------------------

int pres_check(const Options& o) {
  const auto fp = sg::parse_presentation(read_file(o.file));
  sg::Rational lambda = o.lambda.empty() ? fp.lambda.value_or(sg::Rational(1, 6)) : sg::parse_rational(o.lambda);
  const auto p = fp.presentation();
  const std::set<sg::Symbol> letters(fp.generators.begin(), fp.generators.end());
  const auto mp = sg::max_piece(p, letters);
  std::size_t shortest = 0;
  for (const auto& r : fp.relators)
    if (!r.empty() && (shortest == 0 || r.size() < shortest)) shortest = r.size();
  std::cout << "relators: " << fp.relators.size() << "\nshortest relator: " << shortest
            << "\nmax piece: " << mp.length << '\n';
  if (mp.witness)
    std::cout << "witness: " << sg::to_string(mp.witness->r1) << " | " << sg::to_string(mp.witness->r2) << '\n';
  const std::string name = "C'(" + std::to_string(lambda.numerator()) + "/" + std::to_string(lambda.denominator()) + ")";
  return verdict(sg::is_c_prime(p, lambda, letters), (name + ": yes").c_str(), (name + ": no").c_str());
}

int pres_reduce(const Options& o) {
  const auto fp = sg::parse_presentation(read_file(o.file));
  std::cout << sg::to_string(sg::dehn_reduce(sg::parse_word(o.word), fp.presentation())) << '\n';
  return kYes;
}

int pres_trivial(const Options& o) {
  const auto fp = sg::parse_presentation(read_file(o.file));
  return verdict(sg::word_problem(sg::parse_word(o.word), fp.presentation()), "trivial", "nontrivial");
}

// g -------------------------------------------------------------------------

int g_trivial(const Options& o) {
  return verdict(sg::PaperGroup(o.cap).is_trivial(sg::parse_word(o.word)), "trivial", "nontrivial");
}

int g_reduce(const Options& o) {
  const auto r = sg::PaperGroup(o.cap).reduce(sg::parse_word(o.word), true);
  std::cout << sg::to_string(r.terminal) << '\n';
  for (const auto& s : r.trace) std::cout << "  " << sg::to_string(s) << '\n';
  return kYes;
}

int g_iota(const Options& o) {
  std::cout << sg::to_string(sg::iota(sg::parse_word(o.word), o.times)) << '\n';
  return kYes;
}

int g_kappa(const Options& o) {
  std::cout << sg::to_string(sg::kappa(sg::parse_word(o.word), o.n)) << '\n';
  return kYes;
}

int g_in_fb(const Options& o) {
  const auto r = sg::PaperGroup(o.cap).in_fb(sg::parse_word(o.word));
  if (!r) return verdict(false, "", "no");
  std::cout << "yes: " << sg::to_string(*r) << '\n';
  return kYes;
}

// ring ----------------------------------------------------------------------

int ring_eval(const Options& o) {
  const sg::GroupRing ring(sg::PaperGroup(o.cap), sg::parse_coefficient_ring(o.ring));
  std::cout << sg::to_string(sg::parse_ring_expression(o.expr, ring)) << '\n';
  return kYes;
}

// sim -----------------------------------------------------------------------

int sim_run(const Options& o) {
  const sg::Schedule schedule = sg::parse_schedule(read_file(o.schedule));
  sg::Simulator sim{sg::PaperGroup(o.cap)};
  const auto trace = sim.run(schedule, o.stages);
  if (!o.out.empty()) write_file(o.out, sg::trace_to_json(trace).dump(2) + "\n");
  std::cout << sg::to_string(sg::diagnose(trace));
  const auto report = sg::check_invariants(sim, trace);
  for (const auto& v : report.violations) std::cout << "violation: " << v << '\n';
  std::cout << "invariants: " << (report.ok() ? "ok" : "violated") << '\n';
  return report.ok() ? kYes : kInternal;
}

// scott ---------------------------------------------------------------------

int scott_build(const Options& o) {
  const auto a = sg::parse_structure(read_file(o.file));
  const auto g = o.generators.empty() ? sg::minimal_generators(a) : parse_generators(o.generators);
  sg::Sentence s;
  if (o.kind == "dsigma2")
    s = sg::build_dsigma2(a, g);
  else if (o.kind == "sigma3")
    s = sg::build_sigma3(a, g);
  else
    throw sg::PreconditionError("unknown sentence kind '" + o.kind + "'; expected dsigma2 or sigma3");
  const std::string text = sg::sentence_to_json(s).dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file(o.out, text);
    const auto r = sg::classify(s.root);
    std::cout << "tag: " << sg::to_string(s.tag) << "\nrank: sigma " << r.sigma << ", pi " << r.pi
              << "\nshape check: " << (sg::tag_consistent(s) ? "ok" : "failed") << '\n';
  }
  return kYes;
}

int scott_eval(const Options& o) {
  const auto s = sg::parse_sentence(read_file(o.file));
  const auto m = sg::parse_structure(read_file(o.file2));
  return verdict(sg::eval(s, m), "true", "false");
}

int scott_check_catalog(const Options& o) {
  const auto catalog = sg::structure_catalog(o.max_size, o.max_cyclic);
  std::vector<sg::PreparedSentence> sigma3, dsigma2;
  std::size_t bad_shape = 0;
  for (const auto& e : catalog) {
    const auto g = sg::minimal_generators(e.structure);
    auto s3 = sg::build_sigma3(e.structure, g);
    auto d2 = sg::build_dsigma2(e.structure, g);
    bad_shape += !sg::tag_consistent(s3) + !sg::tag_consistent(d2);
    sigma3.emplace_back(s3);
    dsigma2.emplace_back(d2);
  }
  std::size_t pairs = 0, isomorphic = 0, bad3 = 0, bad2 = 0;
  for (std::size_t i = 0; i < catalog.size(); ++i)
    for (std::size_t k = 0; k < catalog.size(); ++k) {
      const auto& m = catalog[k].structure;
      const bool iso = sg::brute_force_iso(catalog[i].structure, m);
      isomorphic += iso;
      bad3 += sigma3[i].eval(m) != iso;
      bad2 += dsigma2[i].eval(m) != iso;
      ++pairs;
    }
  std::cout << "structures: " << catalog.size() << "\npairs: " << pairs << "\nisomorphic pairs: " << isomorphic
            << "\nsigma3 disagreements: " << bad3 << "\ndsigma2 disagreements: " << bad2
            << "\nshape failures: " << bad_shape << '\n';
  return bad3 + bad2 + bad_shape == 0 ? kYes : kNo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Small cancellation, HNN words, and Scott sentences for finite structures"};
  app.require_subcommand(1);
  Options o;
  int (*action)(const Options&) = nullptr;
  auto on = [&](CLI::App* cmd, int (*fn)(const Options&)) { cmd->callback([&action, fn] { action = fn; }); };
  auto word_arg = [&](CLI::App* cmd) { cmd->add_option("word", o.word, "word, e.g. \"v(0,[]) a t^-1\"")->required(); };
  auto cap_opt = [&](CLI::App* cmd) { cmd->add_option("--cap", o.cap, "exponent cap m of the u-relators"); };

  auto* pres = app.add_subcommand("pres", "finite presentations")->require_subcommand(1);
  {
    auto* c = pres->add_subcommand("check", "report the max piece and test C'(lambda)");
    c->add_option("--lambda", o.lambda, "p/q (default: file's lambda, else 1/6)");
    c->add_option("file", o.file)->required();
    on(c, pres_check);
    auto* r = pres->add_subcommand("reduce", "Dehn-reduce a word");
    r->add_option("file", o.file)->required();
    word_arg(r);
    on(r, pres_reduce);
    auto* t = pres->add_subcommand("trivial", "decide triviality (exit 0 trivial, 1 not)");
    t->add_option("file", o.file)->required();
    word_arg(t);
    on(t, pres_trivial);
  }

  auto* g = app.add_subcommand("g", "the group G")->require_subcommand(1);
  {
    auto* t = g->add_subcommand("trivial", "decide triviality (exit 0 trivial, 1 not)");
    word_arg(t);
    cap_opt(t);
    on(t, g_trivial);
    auto* r = g->add_subcommand("reduce", "terminal word and rewrite trace");
    word_arg(r);
    cap_opt(r);
    on(r, g_reduce);
    auto* i = g->add_subcommand("iota", "apply the level shift");
    word_arg(i);
    i->add_option("--times", o.times, "number of applications");
    on(i, g_iota);
    auto* k = g->add_subcommand("kappa", "apply the retraction kappa_n");
    word_arg(k);
    k->add_option("--n", o.n, "retraction index")->required();
    on(k, g_kappa);
    auto* f = g->add_subcommand("in-fb", "membership in the free subgroup on B");
    word_arg(f);
    cap_opt(f);
    on(f, g_in_fb);
  }

  auto* ring = app.add_subcommand("ring", "the group ring")->require_subcommand(1);
  {
    auto* e = ring->add_subcommand("eval", "evaluate and normalize an expression");
    e->add_option("--ring", o.ring, "z or z/<k>");
    e->add_option("expr", o.expr, "e.g. 2*\"t\" - (\"a\" + 1)")->required();
    cap_opt(e);
    on(e, ring_eval);
  }

  auto* sim = app.add_subcommand("sim", "construction simulator")->require_subcommand(1);
  {
    auto* r = sim->add_subcommand("run", "run a schedule and diagnose the trace");
    r->add_option("--schedule", o.schedule, "lines '<t> <level>'")->required();
    r->add_option("--stages", o.stages, "last stage to simulate");
    r->add_option("--out", o.out, "write the trace as JSON");
    cap_opt(r);
    on(r, sim_run);
  }

  auto* scott = app.add_subcommand("scott", "Scott sentences of finite structures")->require_subcommand(1);
  {
    auto* b = scott->add_subcommand("build", "build a Scott sentence");
    b->add_option("--kind", o.kind, "dsigma2 or sigma3");
    b->add_option("file", o.file, "structure JSON")->required();
    b->add_option("--generators", o.generators, "comma-separated 0-based elements (default: a minimal generating tuple)");
    b->add_option("--out", o.out, "write the sentence JSON here");
    on(b, scott_build);
    auto* e = scott->add_subcommand("eval", "evaluate a sentence (exit 0 true, 1 false)");
    e->add_option("sentence", o.file)->required();
    e->add_option("structure", o.file2)->required();
    on(e, scott_eval);
    auto* c = scott->add_subcommand("check-catalog", "compare both sentences with the isomorphism oracle");
    c->add_option("--max-size", o.max_size, "largest magma size");
    c->add_option("--max-cyclic", o.max_cyclic, "largest cyclic group");
    on(c, scott_check_catalog);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return action(o);
  } catch (const sg::InvariantViolation& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  } catch (const sg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

#include <gtest/gtest.h>

#include <map>

#include "generators.hpp"
#include "scottgroup/scott.hpp"

using namespace scottgroup;

namespace {

using Tuple = std::vector<std::size_t>;

// Tree-walking evaluator over an explicit assignment.
std::size_t naive_term(const FiniteStructure& m, const Term& t, const std::map<std::size_t, std::size_t>& env) {
  switch (t.kind) {
    case Term::Kind::variable: return env.at(t.var);
    case Term::Kind::constant: return m.constants.at(t.symbol);
    case Term::Kind::apply: {
      Tuple args;
      for (const auto& a : t.args) args.push_back(naive_term(m, a, env));
      return m.apply(m.functions.at(t.symbol), args);
    }
  }
  return 0;
}

bool naive_eval(const FiniteStructure& m, const Formula& f, std::map<std::size_t, std::size_t>& env) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::equal:
    case K::not_equal:
      return (naive_term(m, f.terms[0], env) == naive_term(m, f.terms[1], env)) == (f.kind == K::equal);
    case K::relation:
    case K::not_relation: {
      Tuple args;
      for (const auto& a : f.terms) args.push_back(naive_term(m, a, env));
      return m.holds(m.relations.at(f.relation), args) == (f.kind == K::relation);
    }
    case K::conjunction:
      for (const auto& c : f.children)
        if (!naive_eval(m, c, env)) return false;
      return true;
    case K::disjunction:
      for (const auto& c : f.children)
        if (naive_eval(m, c, env)) return true;
      return false;
    case K::exists:
    case K::forall: {
      const bool want = f.kind == K::exists;
      std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
        if (i == f.bound.size()) return naive_eval(m, f.children.front(), env);
        for (std::size_t x = 0; x < m.universe_size; ++x) {
          env[f.bound[i]] = x;
          if (go(i + 1) == want) return want;
        }
        return !want;
      };
      auto saved = env;
      const bool r = go(0);
      env = saved;
      return r;
    }
  }
  return false;
}

bool naive_holds(const FiniteStructure& m, const Formula& f, const Tuple& tuple) {
  std::map<std::size_t, std::size_t> env;
  for (std::size_t i = 0; i < tuple.size(); ++i) env[i] = tuple[i];
  return naive_eval(m, f, env);
}

bool naive_sentence(const Sentence& s, const FiniteStructure& m) { return naive_holds(m, s.root, {}); }

// Canonical form: least table over all relabellings.
Tuple canonical_table(const FiniteStructure& a) {
  const std::size_t n = a.universe_size;
  const auto& t = a.functions.at("f").values;
  Tuple p(n), best;
  std::iota(p.begin(), p.end(), 0);
  do {
    Tuple r(n * n);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) r[p[x] * n + p[y]] = p[t[x * n + y]];
    if (best.empty() || r < best) best = r;
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

FiniteStructure random_magma(testgen::Gen& g, std::size_t n) {
  Tuple t(n * n);
  for (auto& x : t) x = static_cast<std::size_t>(g.uniform(0, static_cast<std::int64_t>(n) - 1));
  return magma(n, t);
}

FiniteStructure relabel(const FiniteStructure& a, const Tuple& p) {
  const std::size_t n = a.universe_size;
  Tuple r(n * n);
  const auto& t = a.functions.at("f").values;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) r[p[x] * n + p[y]] = p[t[x * n + y]];
  return magma(n, r);
}

FiniteStructure two_cycles() {
  return parse_structure(R"({"universe_size": 4, "functions": {"s": [1, 0, 3, 2]}})");
}

std::vector<std::string> names(std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= k; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

bool has_literal(const AtomicType& p, const std::string& text) {
  for (const auto& l : p.literals)
    if (to_string(l, names(p.arity)) == text) return true;
  return false;
}

}  // namespace

TEST(Closure, Examples) {
  const auto z4 = cyclic_group(4);
  EXPECT_EQ(generated_closure(z4, Tuple{1}), (Tuple{0, 1, 2, 3}));
  EXPECT_EQ(generated_closure(z4, Tuple{2}), (Tuple{0, 2}));
  EXPECT_EQ(generated_closure(z4, Tuple{0, 1, 2, 3}), (Tuple{0, 1, 2, 3}));
  EXPECT_THROW(generated_closure(z4, Tuple{4}), PreconditionError);
}

TEST(Closure, MatchesFixpointIteration) {
  testgen::Gen g(41);
  for (int i = 0; i < 300; ++i) {
    const auto a = random_magma(g, static_cast<std::size_t>(g.uniform(1, 5)));
    const Tuple seed{static_cast<std::size_t>(g.uniform(0, static_cast<std::int64_t>(a.universe_size) - 1))};
    std::set<std::size_t> s(seed.begin(), seed.end());
    for (bool grew = true; grew;) {
      grew = false;
      for (auto x : std::set(s))
        for (auto y : std::set(s)) grew |= s.insert(a.functions.at("f").values[x * a.universe_size + y]).second;
    }
    EXPECT_EQ(generated_closure(a, seed), Tuple(s.begin(), s.end()));
  }
}

TEST(AtomicType, Examples) {
  const auto z2 = cyclic_group(2);
  const auto p = atomic_type(z2, Tuple{1});
  EXPECT_TRUE(has_literal(p, "x1 != f(x1,x1)"));
  EXPECT_TRUE(has_literal(p, "f(f(x1,x1),x1) = x1"));

  const auto one = magma(1, {0});
  for (const auto& l : atomic_type(one, Tuple{0}).literals) EXPECT_EQ(l.kind, Formula::Kind::equal);

  const auto q = atomic_type(cyclic_group(4), Tuple{1});
  EXPECT_EQ(q.terms.size(), 4u);
  // x + 3x is the canonical name of 0 = 2x + 2x, reached in the second round.
  EXPECT_EQ(to_string(q.terms.back(), names(1)), "f(f(x1,x1),f(x1,x1))");
  EXPECT_EQ(q.depth, 2u);
  EXPECT_TRUE(has_literal(q, "f(x1,f(x1,f(x1,x1))) = f(f(x1,x1),f(x1,x1))"));
}

TEST(AtomicType, LiteralsHoldOfTheTuple) {
  testgen::Gen g(42);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_magma(g, static_cast<std::size_t>(g.uniform(1, 4)));
    Tuple t;
    for (auto k = g.uniform(1, 2); k > 0; --k)
      t.push_back(static_cast<std::size_t>(g.uniform(0, static_cast<std::int64_t>(a.universe_size) - 1)));
    const auto p = atomic_type(a, t);
    for (const auto& l : p.literals) EXPECT_TRUE(naive_holds(a, l, t)) << to_string(l, names(t.size()));
    EXPECT_EQ(p.terms.size(), generated_closure(a, t).size());
  }
}

TEST(Separators, EmptyWhenEveryRealizerGenerates) {
  const auto z4 = cyclic_group(4);
  EXPECT_TRUE(compute_separator_set(z4, Tuple{1}).separators.empty());
  EXPECT_TRUE(generates(z4, Tuple{3}));
  EXPECT_TRUE(satisfies(z4, atomic_type(z4, Tuple{1}), Tuple{3}));
  EXPECT_TRUE(compute_separator_set(two_cycles(), Tuple{0, 2}).separators.empty());
  EXPECT_THROW(compute_separator_set(z4, Tuple{2}), PreconditionError);
}

TEST(Separators, TwoOrbitStructureWithPositiveType) {
  const auto a = two_cycles();
  const Tuple g{0, 2};
  const auto p = positive_part(atomic_type(a, g));
  const auto s = compute_separator_set(a, g, p);
  ASSERT_FALSE(s.separators.empty());
  for (const auto& sep : s.separators) {
    const Tuple witness(sep.realizer.begin(), sep.realizer.begin() + 2);
    EXPECT_TRUE(naive_holds(a, p.conjunction(), witness));
    EXPECT_FALSE(generates(a, witness));
    EXPECT_TRUE(naive_holds(a, sep.psi, sep.realizer));
    // Not realized over g by any witness tuple.
    const bool realized = for_each_tuple(a.universe_size, sep.witness_arity, [&](std::span<const std::size_t> b) {
      Tuple full = g;
      full.insert(full.end(), b.begin(), b.end());
      return naive_holds(a, sep.psi, full);
    });
    EXPECT_FALSE(realized);
  }
}

TEST(Sentences, ShapesAndTags) {
  const auto z4 = cyclic_group(4);
  const auto d2 = build_dsigma2(z4, Tuple{1});
  const auto s3 = build_sigma3(z4, Tuple{1});
  EXPECT_EQ(d2.tag, Complexity::dsigma2);
  EXPECT_TRUE(tag_consistent(d2));
  ASSERT_EQ(d2.root.children.size(), 2u);
  EXPECT_LE(classify(d2.root.children[0]).sigma, 2);
  EXPECT_LE(classify(d2.root.children[1]).pi, 2);
  EXPECT_EQ(s3.tag, Complexity::sigma3);
  EXPECT_TRUE(tag_consistent(s3));
  EXPECT_EQ(classify(s3.root), (Rank{3, 4}));

  Sentence wrong = s3;
  wrong.tag = Complexity::sigma2;
  EXPECT_FALSE(tag_consistent(wrong));
}

TEST(Sentences, Examples) {
  const auto z3 = cyclic_group(3);
  const auto z4 = cyclic_group(4);
  EXPECT_TRUE(eval(build_dsigma2(z4, Tuple{1}), z4));
  EXPECT_TRUE(eval(build_sigma3(z4, Tuple{1}), z4));
  EXPECT_FALSE(eval(build_dsigma2(z3, Tuple{1}), z4));
  EXPECT_FALSE(eval(build_dsigma2(z4, Tuple{1}), klein_four()));
  EXPECT_FALSE(eval(build_sigma3(z4, Tuple{1}), magma(4, Tuple(16, 0))));

  Sentence truth{Complexity::sigma1, z4.signature(), {}, Formula::conjunction({})};
  EXPECT_TRUE(eval(truth, z3));
  Sentence absurd{Complexity::sigma1, z4.signature(), {"x"},
                  Formula::exists({0}, Formula::equal(Term::variable(0), Term::variable(0), false))};
  EXPECT_FALSE(eval(absurd, z4));
}

TEST(Sentences, EvaluatorMatchesTreeWalk) {
  testgen::Gen g(43);
  const auto catalog = structure_catalog(2, 4);
  for (int i = 0; i < 150; ++i) {
    const auto a = random_magma(g, static_cast<std::size_t>(g.uniform(1, 4)));
    const auto gens = minimal_generators(a);
    const auto s = g.coin() ? build_dsigma2(a, gens) : build_sigma3(a, gens);
    const auto& m = g.pick(catalog).structure;
    EXPECT_EQ(eval(s, m), naive_sentence(s, m));
  }
}

TEST(Sentences, SignatureMismatch) {
  const auto s = build_sigma3(cyclic_group(3), Tuple{1});
  EXPECT_THROW(eval(s, two_cycles()), SignatureMismatch);
}

TEST(Sentences, JsonRoundTrip) {
  const auto a = parse_structure(
      R"({"universe_size": 3, "functions": {"f": [[0,1,2],[1,2,0],[2,0,1]]},
          "constants": {"zero": 0}, "relations": {"P": [1, 0, 0]}})");
  for (const auto& s : {build_dsigma2(a, minimal_generators(a)), build_sigma3(a, minimal_generators(a))}) {
    const auto text = sentence_to_json(s).dump();
    const auto back = parse_sentence(text);
    EXPECT_EQ(sentence_to_json(back).dump(), text);
    EXPECT_TRUE(eval(back, a));
  }
  EXPECT_THROW(parse_sentence("{"), ParseError);
  EXPECT_THROW(parse_sentence(R"({"tag": "sigma9"})"), PreconditionError);
}

TEST(Iso, Examples) {
  const auto z4 = cyclic_group(4);
  EXPECT_TRUE(brute_force_iso(z4, z4));
  EXPECT_FALSE(brute_force_iso(z4, cyclic_group(3)));
  EXPECT_FALSE(brute_force_iso(z4, klein_four()));
  EXPECT_THROW(brute_force_iso(cyclic_group(7), cyclic_group(7)), PreconditionError);
  EXPECT_THROW(brute_force_iso(z4, two_cycles()), SignatureMismatch);
}

TEST(Iso, MatchesCanonicalForms) {
  testgen::Gen g(44);
  for (int i = 0; i < 400; ++i) {
    const std::size_t n = static_cast<std::size_t>(g.uniform(1, 4));
    const auto a = random_magma(g, n);
    const auto b = g.coin() ? relabel(a, g.permutation(n)) : random_magma(g, n);
    EXPECT_EQ(brute_force_iso(a, b), canonical_table(a) == canonical_table(b));
  }
}

// Burnside: orbits = average number of tables fixed by a relabelling.
TEST(Catalog, MagmaCountsMatchBurnside) {
  for (std::size_t n = 1; n <= 3; ++n) {
    Tuple p(n);
    std::iota(p.begin(), p.end(), 0);
    std::size_t fixed = 0, perms = 0;
    do {
      ++perms;
      for_each_tuple(n, n * n, [&](std::span<const std::size_t> t) {
        bool same = true;
        for (std::size_t x = 0; x < n && same; ++x)
          for (std::size_t y = 0; y < n && same; ++y) same = t[p[x] * n + p[y]] == p[t[x * n + y]];
        fixed += same;
        return false;
      });
    } while (std::next_permutation(p.begin(), p.end()));
    EXPECT_EQ(magmas_up_to_iso(n).size(), fixed / perms) << n;
  }
}

TEST(Catalog, RepresentativesArePairwiseNonIsomorphic) {
  std::set<Tuple> seen;
  for (const auto& m : magmas_up_to_iso(3)) EXPECT_TRUE(seen.insert(canonical_table(m)).second);
  EXPECT_EQ(structure_catalog(3, 6).size(), 1u + 10u + 3330u + 6u + 1u);
}

TEST(Catalog, SweepSizeTwoMatchesOracle) {
  const auto catalog = structure_catalog(2, 6);
  for (const auto& a : catalog) {
    const auto gens = minimal_generators(a.structure);
    PreparedSentence d2(build_dsigma2(a.structure, gens)), s3(build_sigma3(a.structure, gens));
    for (const auto& m : catalog) {
      const bool iso = brute_force_iso(a.structure, m.structure);
      EXPECT_EQ(d2.eval(m.structure), iso) << a.name << " vs " << m.name;
      EXPECT_EQ(s3.eval(m.structure), iso) << a.name << " vs " << m.name;
    }
  }
}

TEST(Structure, JsonFormats) {
  const auto a = parse_structure(
      R"({"universe_size": 2, "functions": {"g": {"arity": 1, "table": [1, 0]}}, "relations": {"R": [[true, false], [false, true]]}})");
  EXPECT_EQ(a.functions.at("g").arity, 1u);
  EXPECT_EQ(a.relations.at("R").arity, 2u);
  EXPECT_TRUE(a.holds(a.relations.at("R"), Tuple{1, 1}));
  EXPECT_EQ(structure_from_json(nlohmann::json::parse(structure_to_json(a).dump())), a);

  EXPECT_THROW(parse_structure("{\"universe_size\": 2,"), ParseError);
  EXPECT_THROW(parse_structure(R"({"universe_size": 2, "functions": {"f": [0, 5]}})"), PreconditionError);
  EXPECT_THROW(parse_structure(R"({"universe_size": 2, "functions": {"f": [[0], [1, 0]]}})"), PreconditionError);
  EXPECT_THROW(parse_structure(R"({"universe_size": 2, "constants": {"c": 2}})"), PreconditionError);
}

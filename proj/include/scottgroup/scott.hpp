#ifndef SCOTTGROUP_SCOTT_HPP
#define SCOTTGROUP_SCOTT_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scottgroup/errors.hpp"
#include "scottgroup/formula.hpp"
#include "scottgroup/structure.hpp"

namespace scottgroup {

/// Literals true of a tuple, over canonical terms naming its closure.
///
/// Each element of the generated substructure gets one canonical term: the
/// first variable or constant naming it, else the first application found
/// in breadth-first rounds. The literals pin down every function value and
/// relation instance on the closure and all inequalities between distinct
/// elements; variables and constants naming an already named element are
/// equated to its canonical term.
struct AtomicType {
  std::size_t arity = 0;
  std::vector<Formula> literals;
  std::vector<Term> terms;           // canonical terms, discovery order
  std::vector<std::size_t> values;   // element named by terms[i]
  std::size_t depth = 0;             // deepest canonical term

  Formula conjunction() const { return Formula::conjunction(literals, true); }
};

inline AtomicType atomic_type(const FiniteStructure& a, std::span<const std::size_t> tuple) {
  AtomicType p;
  p.arity = tuple.size();
  std::vector<std::optional<std::size_t>> name_of(a.universe_size);
  auto name = [&](std::size_t x, Term t, std::vector<Formula>& dupes) {
    if (x >= a.universe_size) throw PreconditionError("tuple element outside the universe");
    if (name_of[x]) {
      dupes.push_back(Formula::equal(std::move(t), p.terms[*name_of[x]]));
      return;
    }
    name_of[x] = p.terms.size();
    p.terms.push_back(std::move(t));
    p.values.push_back(x);
  };

  std::vector<Formula> dupes;
  for (std::size_t i = 0; i < tuple.size(); ++i) name(tuple[i], Term::variable(i), dupes);
  for (const auto& [c, x] : a.constants) name(x, Term::constant(c), dupes);

  while (true) {
    const std::size_t known = p.terms.size();
    for (const auto& [fn, table] : a.functions) {
      std::vector<std::size_t> args(table.arity);
      for_each_tuple(known, table.arity, [&](std::span<const std::size_t> idx) {
        for (std::size_t i = 0; i < idx.size(); ++i) args[i] = p.values[idx[i]];
        const std::size_t r = a.apply(table, args);
        if (!name_of[r]) {
          std::vector<Term> ts;
          for (auto i : idx) ts.push_back(p.terms[i]);
          name_of[r] = p.terms.size();
          p.terms.push_back(Term::apply(fn, std::move(ts)));
          p.values.push_back(r);
        }
        return false;
      });
    }
    if (p.terms.size() == known) break;
  }
  for (const auto& t : p.terms) p.depth = std::max(p.depth, t.depth());

  p.literals = std::move(dupes);
  const std::size_t c = p.terms.size();
  for (const auto& [fn, table] : a.functions) {
    std::vector<std::size_t> args(table.arity);
    for_each_tuple(c, table.arity, [&](std::span<const std::size_t> idx) {
      std::vector<Term> ts;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        args[i] = p.values[idx[i]];
        ts.push_back(p.terms[idx[i]]);
      }
      Term lhs = Term::apply(fn, std::move(ts));
      const Term& rhs = p.terms[*name_of[a.apply(table, args)]];
      if (!(lhs == rhs)) p.literals.push_back(Formula::equal(std::move(lhs), rhs));
      return false;
    });
  }
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t k = i + 1; k < c; ++k) p.literals.push_back(Formula::equal(p.terms[i], p.terms[k], false));
  for (const auto& [rel, table] : a.relations) {
    std::vector<std::size_t> args(table.arity);
    for_each_tuple(c, table.arity, [&](std::span<const std::size_t> idx) {
      std::vector<Term> ts;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        args[i] = p.values[idx[i]];
        ts.push_back(p.terms[idx[i]]);
      }
      p.literals.push_back(Formula::holds(rel, std::move(ts), a.holds(table, args)));
      return false;
    });
  }
  return p;
}

/// The positive literals of a type only.
inline AtomicType positive_part(AtomicType p) {
  std::erase_if(p.literals, [](const Formula& f) {
    return f.kind == Formula::Kind::not_equal || f.kind == Formula::Kind::not_relation;
  });
  return p;
}

inline bool satisfies(const FiniteStructure& m, const AtomicType& p, std::span<const std::size_t> tuple) {
  return satisfies(m, p.conjunction(), tuple, p.arity);
}

/// A conjunction of literals psi(x, y) realized by `realizer` = (g', a) and
/// by no (g, b).
struct Separator {
  Formula psi;
  std::size_t witness_arity = 0;
  std::vector<std::size_t> realizer;
};

struct SeparatorSet {
  std::vector<Separator> separators;
  std::size_t max_witness_arity() const {
    std::size_t m = 0;
    for (const auto& s : separators) m = std::max(m, s.witness_arity);
    return m;
  }
};

namespace detail {

inline void require_generating(const FiniteStructure& a, std::span<const std::size_t> g) {
  if (!generates(a, g)) throw PreconditionError("the tuple does not generate the structure");
}

inline bool realized_over(const FiniteStructure& a, const Formula& psi, std::span<const std::size_t> g,
                          std::size_t witness_arity) {
  std::vector<std::size_t> full(g.begin(), g.end());
  full.resize(g.size() + witness_arity);
  CompiledFormula compiled(psi, a, full.size());
  return for_each_tuple(a.universe_size, witness_arity, [&](std::span<const std::size_t> b) {
    std::copy(b.begin(), b.end(), full.begin() + static_cast<std::ptrdiff_t>(g.size()));
    return compiled.eval(full);
  });
}

}  // namespace detail

/// For each tuple satisfying p that fails to generate, the first separator
/// found: the complete type of (g', a) for the shortest, then least, witness
/// tuple a whose type no (g, b) realizes.
inline SeparatorSet compute_separator_set(const FiniteStructure& a, std::span<const std::size_t> g,
                                          const AtomicType& p) {
  detail::require_generating(a, g);
  SeparatorSet out;
  std::vector<std::string> seen;
  CompiledFormula type(p.conjunction(), a, p.arity);
  for_each_tuple(a.universe_size, g.size(), [&](std::span<const std::size_t> other) {
    if (!type.eval(other) || generates(a, other)) return false;
    std::optional<Separator> found;
    for (std::size_t l = 0; l <= a.universe_size && !found; ++l) {
      for_each_tuple(a.universe_size, l, [&](std::span<const std::size_t> witness) {
        std::vector<std::size_t> full(other.begin(), other.end());
        full.insert(full.end(), witness.begin(), witness.end());
        Formula psi = Formula::conjunction(atomic_type(a, full).literals);
        if (detail::realized_over(a, psi, g, l)) return false;
        found = Separator{std::move(psi), l, std::move(full)};
        return true;
      });
    }
    if (!found) throw InvariantViolation("no separator for a non-generating tuple");
    const std::string key = to_string(found->psi, {});
    if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
      seen.push_back(key);
      out.separators.push_back(std::move(*found));
    }
    return false;
  });
  return out;
}

inline SeparatorSet compute_separator_set(const FiniteStructure& a, std::span<const std::size_t> g) {
  return compute_separator_set(a, g, atomic_type(a, g));
}

namespace detail {

/// Variables: x1..xk, then z1..zl for separator witnesses, then y.
inline std::vector<std::string> variable_names(std::size_t k, std::size_t l) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= k; ++i) names.push_back("x" + std::to_string(i));
  for (std::size_t i = 1; i <= l; ++i) names.push_back("z" + std::to_string(i));
  names.push_back("y");
  return names;
}

inline std::vector<std::size_t> range(std::size_t from, std::size_t to) {
  std::vector<std::size_t> out;
  for (std::size_t i = from; i < to; ++i) out.push_back(i);
  return out;
}

/// forall y. OR over canonical terms t: y = t.
inline Formula everything_generated(const AtomicType& p, std::size_t y) {
  std::vector<Formula> options;
  for (const auto& t : p.terms) options.push_back(Formula::equal(Term::variable(y), t));
  return Formula::forall({y}, Formula::disjunction(std::move(options), true));
}

}  // namespace detail

/// exists x. [p(x) & forall y. OR_t y = t(x)]
inline Sentence build_sigma3(const FiniteStructure& a, std::span<const std::size_t> g) {
  detail::require_generating(a, g);
  const AtomicType p = atomic_type(a, g);
  const std::size_t k = g.size();
  Sentence s;
  s.tag = Complexity::sigma3;
  s.signature = a.signature();
  s.variable_names = detail::variable_names(k, 0);
  s.root = Formula::exists(detail::range(0, k),
                           Formula::conjunction({p.conjunction(), detail::everything_generated(p, k)}));
  return s;
}

/// Conjunction of
///   exists x. [p(x) & forall z. AND_psi not psi(x, z)]
///   forall x. [not p(x) | forall y. OR_t y = t(x) | exists z. OR_psi psi(x, z)]
inline Sentence build_dsigma2(const FiniteStructure& a, std::span<const std::size_t> g, const AtomicType& p,
                              const SeparatorSet& separators) {
  detail::require_generating(a, g);
  const std::size_t k = g.size();
  const std::size_t l = separators.max_witness_arity();
  const std::size_t y = k + l;
  const auto xs = detail::range(0, k);
  const auto zs = detail::range(k, k + l);

  std::vector<Formula> avoid, some;
  for (const auto& sep : separators.separators) {
    std::vector<Formula> negated;
    for (const auto& lit : sep.psi.children) negated.push_back(negate_literal(lit));
    avoid.push_back(Formula::disjunction(std::move(negated)));
    some.push_back(sep.psi);
  }
  std::vector<Formula> not_p;
  for (const auto& lit : p.literals) not_p.push_back(negate_literal(lit));

  Formula sigma2 = Formula::exists(
      xs, Formula::conjunction({p.conjunction(), Formula::forall(zs, Formula::conjunction(std::move(avoid), true))}));
  Formula pi2 = Formula::forall(
      xs, Formula::disjunction({Formula::disjunction(std::move(not_p), true), detail::everything_generated(p, y),
                                Formula::exists(zs, Formula::disjunction(std::move(some), true))}));

  Sentence s;
  s.tag = Complexity::dsigma2;
  s.signature = a.signature();
  s.variable_names = detail::variable_names(k, l);
  s.root = Formula::conjunction({std::move(sigma2), std::move(pi2)});
  return s;
}

inline Sentence build_dsigma2(const FiniteStructure& a, std::span<const std::size_t> g) {
  const AtomicType p = atomic_type(a, g);
  return build_dsigma2(a, g, p, compute_separator_set(a, g, p));
}

}  // namespace scottgroup

#endif  // SCOTTGROUP_SCOTT_HPP

#ifndef SCOTTGROUP_FORMULA_HPP
#define SCOTTGROUP_FORMULA_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "scottgroup/errors.hpp"
#include "scottgroup/structure.hpp"

namespace scottgroup {

struct Term {
  enum class Kind { variable, constant, apply };

  Kind kind = Kind::variable;
  std::size_t var = 0;
  std::string symbol;
  std::vector<Term> args;

  static Term variable(std::size_t i) { return {Kind::variable, i, {}, {}}; }
  static Term constant(std::string name) { return {Kind::constant, 0, std::move(name), {}}; }
  static Term apply(std::string fn, std::vector<Term> args) { return {Kind::apply, 0, std::move(fn), std::move(args)}; }

  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& a : args) d = std::max(d, a.depth() + 1);
    return kind == Kind::apply && args.empty() ? 1 : d;
  }

  friend bool operator==(const Term&, const Term&) = default;
};

/// Quantifier blocks bind several variables at once. `infinitary` marks a
/// conjunction or disjunction standing for a countable one, truncated to
/// the listed children.
struct Formula {
  enum class Kind { conjunction, disjunction, exists, forall, equal, not_equal, relation, not_relation };

  Kind kind = Kind::conjunction;
  bool infinitary = false;
  std::vector<Formula> children;
  std::vector<std::size_t> bound;
  std::vector<Term> terms;
  std::string relation;

  static Formula conjunction(std::vector<Formula> cs, bool infinitary = false) {
    Formula f;
    f.kind = Kind::conjunction;
    f.infinitary = infinitary;
    f.children = std::move(cs);
    return f;
  }
  static Formula disjunction(std::vector<Formula> cs, bool infinitary = false) {
    Formula f = conjunction(std::move(cs), infinitary);
    f.kind = Kind::disjunction;
    return f;
  }
  static Formula exists(std::vector<std::size_t> vars, Formula body) {
    Formula f;
    f.kind = Kind::exists;
    f.bound = std::move(vars);
    f.children.push_back(std::move(body));
    return f;
  }
  static Formula forall(std::vector<std::size_t> vars, Formula body) {
    Formula f = exists(std::move(vars), std::move(body));
    f.kind = Kind::forall;
    return f;
  }
  static Formula equal(Term l, Term r, bool positive = true) {
    Formula f;
    f.kind = positive ? Kind::equal : Kind::not_equal;
    f.terms = {std::move(l), std::move(r)};
    return f;
  }
  static Formula holds(std::string rel, std::vector<Term> args, bool positive = true) {
    Formula f;
    f.kind = positive ? Kind::relation : Kind::not_relation;
    f.relation = std::move(rel);
    f.terms = std::move(args);
    return f;
  }

  bool is_literal() const { return kind >= Kind::equal; }

  friend bool operator==(const Formula&, const Formula&) = default;
};

/// The negation of a literal.
inline Formula negate_literal(const Formula& f) {
  if (!f.is_literal()) throw PreconditionError("only literals can be negated");
  Formula g = f;
  switch (f.kind) {
    case Formula::Kind::equal: g.kind = Formula::Kind::not_equal; break;
    case Formula::Kind::not_equal: g.kind = Formula::Kind::equal; break;
    case Formula::Kind::relation: g.kind = Formula::Kind::not_relation; break;
    default: g.kind = Formula::Kind::relation; break;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Complexity

enum class Complexity { sigma1, pi1, sigma2, pi2, sigma3, dsigma2 };

inline std::string to_string(Complexity c) {
  switch (c) {
    case Complexity::sigma1: return "sigma1";
    case Complexity::pi1: return "pi1";
    case Complexity::sigma2: return "sigma2";
    case Complexity::pi2: return "pi2";
    case Complexity::sigma3: return "sigma3";
    case Complexity::dsigma2: return "dsigma2";
  }
  return "?";
}

inline Complexity parse_complexity(const std::string& s) {
  for (auto c : {Complexity::sigma1, Complexity::pi1, Complexity::sigma2, Complexity::pi2, Complexity::sigma3,
                 Complexity::dsigma2})
    if (to_string(c) == s) return c;
  throw PreconditionError("unknown complexity tag '" + s + "'");
}

/// Least n with the formula in Sigma_n and least n with it in Pi_n;
/// finitary quantifier-free formulas are (0, 0).
struct Rank {
  int sigma = 0;
  int pi = 0;
  friend bool operator==(const Rank&, const Rank&) = default;
};

inline Rank classify(const Formula& f) {
  using K = Formula::Kind;
  if (f.is_literal()) return {0, 0};
  if (f.kind == K::exists || f.kind == K::forall) {
    const Rank body = classify(f.children.front());
    if (f.bound.empty()) return body;
    if (f.kind == K::exists) {
      const int s = std::max(1, std::min(body.sigma, body.pi + 1));
      return {s, s + 1};
    }
    const int p = std::max(1, std::min(body.pi, body.sigma + 1));
    return {p + 1, p};
  }
  Rank r;
  for (const auto& c : f.children) {
    const Rank x = classify(c);
    r.sigma = std::max(r.sigma, x.sigma);
    r.pi = std::max(r.pi, x.pi);
  }
  if (!f.infinitary) return r;
  if (f.kind == K::disjunction) {
    const int s = std::max(1, r.sigma);
    return {s, s + 1};
  }
  const int p = std::max(1, r.pi);
  return {p + 1, p};
}

struct Sentence {
  Complexity tag = Complexity::sigma1;
  Signature signature;
  std::vector<std::string> variable_names;
  Formula root;
};

/// Whether the tree shape supports the tag. d-Sigma_2 requires a finite
/// two-way conjunction of a Sigma_2 and a Pi_2 formula.
inline bool tag_consistent(const Sentence& s) {
  const Rank r = classify(s.root);
  switch (s.tag) {
    case Complexity::sigma1: return r.sigma <= 1;
    case Complexity::pi1: return r.pi <= 1;
    case Complexity::sigma2: return r.sigma <= 2;
    case Complexity::pi2: return r.pi <= 2;
    case Complexity::sigma3: return r.sigma <= 3;
    case Complexity::dsigma2:
      return s.root.kind == Formula::Kind::conjunction && !s.root.infinitary && s.root.children.size() == 2 &&
             classify(s.root.children[0]).sigma <= 2 && classify(s.root.children[1]).pi <= 2;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string to_string(const Term& t, const std::vector<std::string>& names) {
  switch (t.kind) {
    case Term::Kind::variable: return t.var < names.size() ? names[t.var] : "v" + std::to_string(t.var);
    case Term::Kind::constant: return t.symbol;
    case Term::Kind::apply: {
      std::string out = t.symbol + "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) out += (i ? "," : "") + to_string(t.args[i], names);
      return out + ")";
    }
  }
  return "?";
}

inline std::string to_string(const Formula& f, const std::vector<std::string>& names) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::equal: return to_string(f.terms[0], names) + " = " + to_string(f.terms[1], names);
    case K::not_equal: return to_string(f.terms[0], names) + " != " + to_string(f.terms[1], names);
    case K::relation:
    case K::not_relation: {
      std::string out = f.kind == K::not_relation ? "!" + f.relation + "(" : f.relation + "(";
      for (std::size_t i = 0; i < f.terms.size(); ++i) out += (i ? "," : "") + to_string(f.terms[i], names);
      return out + ")";
    }
    case K::exists:
    case K::forall: {
      std::string out = f.kind == K::exists ? "exists" : "forall";
      for (auto v : f.bound) out += " " + (v < names.size() ? names[v] : "v" + std::to_string(v));
      return out + ". " + to_string(f.children.front(), names);
    }
    case K::conjunction:
    case K::disjunction: {
      const bool conj = f.kind == K::conjunction;
      if (f.children.empty()) return conj ? "true" : "false";
      std::string op = conj ? " & " : " | ";
      std::string out = f.infinitary ? (conj ? "AND[" : "OR[") : "(";
      for (std::size_t i = 0; i < f.children.size(); ++i) {
        if (i) out += f.infinitary ? ", " : op;
        out += to_string(f.children[i], names);
      }
      return out + (f.infinitary ? "]" : ")");
    }
  }
  return "?";
}

inline std::string to_string(const Sentence& s) { return to_string(s.root, s.variable_names); }

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::ordered_json term_to_json(const Term& t) {
  switch (t.kind) {
    case Term::Kind::variable: return {{"var", t.var}};
    case Term::Kind::constant: return {{"const", t.symbol}};
    case Term::Kind::apply: {
      nlohmann::ordered_json args = nlohmann::ordered_json::array();
      for (const auto& a : t.args) args.push_back(term_to_json(a));
      return {{"fn", t.symbol}, {"args", std::move(args)}};
    }
  }
  return {};
}

inline Term term_from_json(const nlohmann::json& j) {
  if (j.contains("var")) return Term::variable(j.at("var").get<std::size_t>());
  if (j.contains("const")) return Term::constant(j.at("const").get<std::string>());
  std::vector<Term> args;
  for (const auto& a : j.at("args")) args.push_back(term_from_json(a));
  return Term::apply(j.at("fn").get<std::string>(), std::move(args));
}

namespace detail {

inline const char* op_name(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::conjunction: return "and";
    case Formula::Kind::disjunction: return "or";
    case Formula::Kind::exists: return "exists";
    case Formula::Kind::forall: return "forall";
    case Formula::Kind::equal: return "eq";
    case Formula::Kind::not_equal: return "neq";
    case Formula::Kind::relation: return "rel";
    case Formula::Kind::not_relation: return "nrel";
  }
  return "?";
}

}  // namespace detail

inline nlohmann::ordered_json formula_to_json(const Formula& f) {
  using K = Formula::Kind;
  nlohmann::ordered_json j;
  j["op"] = detail::op_name(f.kind);
  switch (f.kind) {
    case K::conjunction:
    case K::disjunction: {
      j["infinitary"] = f.infinitary;
      nlohmann::ordered_json cs = nlohmann::ordered_json::array();
      for (const auto& c : f.children) cs.push_back(formula_to_json(c));
      j["children"] = std::move(cs);
      break;
    }
    case K::exists:
    case K::forall:
      j["vars"] = f.bound;
      j["body"] = formula_to_json(f.children.front());
      break;
    case K::equal:
    case K::not_equal:
      j["lhs"] = term_to_json(f.terms[0]);
      j["rhs"] = term_to_json(f.terms[1]);
      break;
    case K::relation:
    case K::not_relation: {
      j["name"] = f.relation;
      nlohmann::ordered_json args = nlohmann::ordered_json::array();
      for (const auto& t : f.terms) args.push_back(term_to_json(t));
      j["args"] = std::move(args);
      break;
    }
  }
  return j;
}

inline Formula formula_from_json(const nlohmann::json& j) {
  using K = Formula::Kind;
  const std::string op = j.at("op").get<std::string>();
  for (auto k : {K::conjunction, K::disjunction, K::exists, K::forall, K::equal, K::not_equal, K::relation,
                 K::not_relation}) {
    if (op != detail::op_name(k)) continue;
    Formula f;
    f.kind = k;
    switch (k) {
      case K::conjunction:
      case K::disjunction:
        f.infinitary = j.value("infinitary", false);
        for (const auto& c : j.at("children")) f.children.push_back(formula_from_json(c));
        break;
      case K::exists:
      case K::forall:
        f.bound = j.at("vars").get<std::vector<std::size_t>>();
        f.children.push_back(formula_from_json(j.at("body")));
        break;
      case K::equal:
      case K::not_equal:
        f.terms = {term_from_json(j.at("lhs")), term_from_json(j.at("rhs"))};
        break;
      default:
        f.relation = j.at("name").get<std::string>();
        for (const auto& t : j.at("args")) f.terms.push_back(term_from_json(t));
        break;
    }
    return f;
  }
  throw PreconditionError("unknown formula operator '" + op + "'");
}

inline nlohmann::ordered_json signature_to_json(const Signature& s) {
  nlohmann::ordered_json fs = nlohmann::ordered_json::object();
  for (const auto& [n, a] : s.functions) fs[n] = a;
  nlohmann::ordered_json rs = nlohmann::ordered_json::object();
  for (const auto& [n, a] : s.relations) rs[n] = a;
  return {{"functions", std::move(fs)}, {"constants", s.constants}, {"relations", std::move(rs)}};
}

inline Signature signature_from_json(const nlohmann::json& j) {
  Signature s;
  for (const auto& [n, a] : j.at("functions").items()) s.functions[n] = a.get<std::size_t>();
  for (const auto& c : j.at("constants")) s.constants.insert(c.get<std::string>());
  for (const auto& [n, a] : j.at("relations").items()) s.relations[n] = a.get<std::size_t>();
  return s;
}

inline nlohmann::ordered_json sentence_to_json(const Sentence& s) {
  nlohmann::ordered_json j;
  j["tag"] = to_string(s.tag);
  j["signature"] = signature_to_json(s.signature);
  j["variables"] = s.variable_names;
  j["formula"] = formula_to_json(s.root);
  return j;
}

inline Sentence sentence_from_json(const nlohmann::json& j) {
  try {
    Sentence s;
    s.tag = parse_complexity(j.at("tag").get<std::string>());
    s.signature = signature_from_json(j.at("signature"));
    s.variable_names = j.at("variables").get<std::vector<std::string>>();
    s.root = formula_from_json(j.at("formula"));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("malformed sentence: ") + e.what());
  }
}

inline Sentence parse_sentence(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), 0, e.byte);
  }
  return sentence_from_json(j);
}

// ---------------------------------------------------------------------------
// Evaluation

/// A formula compiled against a signature. Terms become postfix programs
/// over the variable assignment; bind() points the symbol slots at the
/// tables of a structure with that signature.
class CompiledFormula {
 public:
  CompiledFormula(const Formula& f, const Signature& sig, std::size_t variable_count)
      : assignment_(variable_count, 0) {
    for (const auto& [name, arity] : sig.functions) fn_names_.push_back(name), fn_arity_.push_back(arity);
    for (const auto& [name, arity] : sig.relations) rel_names_.push_back(name), rel_arity_.push_back(arity);
    const_names_.assign(sig.constants.begin(), sig.constants.end());
    root_ = compile(f);
  }

  CompiledFormula(const Formula& f, const FiniteStructure& m, std::size_t variable_count)
      : CompiledFormula(f, m.signature(), variable_count) {
    bind(m);
  }

  /// The structure must outlive every later eval().
  void bind(const FiniteStructure& m) {
    if (!same_signature(m)) throw SignatureMismatch("structure signature differs from the formula's");
    size_ = m.universe_size;
    fns_.clear();
    rels_.clear();
    consts_.clear();
    for (const auto& [name, table] : m.functions) fns_.push_back(&table);
    for (const auto& [name, table] : m.relations) rels_.push_back(&table);
    for (const auto& [name, value] : m.constants) consts_.push_back(value);
  }

  /// Evaluates with the given values for the leading variables.
  bool eval(std::span<const std::size_t> leading = {}) {
    if (fns_.size() != fn_names_.size() || size_ == 0) throw PreconditionError("formula is not bound");
    std::copy(leading.begin(), leading.end(), assignment_.begin());
    return eval(nodes_[root_]);
  }

 private:
  struct Op {
    enum class Kind : std::uint8_t { var, constant, apply } kind;
    std::uint32_t arg;  // variable index, constant slot, or function slot
  };
  using Program = std::vector<Op>;

  struct Node {
    Formula::Kind kind;
    std::vector<std::size_t> children;
    std::vector<std::size_t> bound;
    std::vector<Program> terms;
    std::size_t relation = 0;
  };

  bool same_signature(const FiniteStructure& m) const {
    if (m.functions.size() != fn_names_.size() || m.relations.size() != rel_names_.size() ||
        m.constants.size() != const_names_.size())
      return false;
    std::size_t i = 0;
    for (const auto& [name, table] : m.functions)
      if (name != fn_names_[i] || table.arity != fn_arity_[i]) return false;
      else ++i;
    i = 0;
    for (const auto& [name, table] : m.relations)
      if (name != rel_names_[i] || table.arity != rel_arity_[i]) return false;
      else ++i;
    i = 0;
    for (const auto& [name, value] : m.constants)
      if (name != const_names_[i++]) return false;
    return true;
  }

  static std::uint32_t slot(const std::vector<std::string>& names, const std::string& name, const char* what) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw SignatureMismatch(std::string("unknown ") + what + " " + name);
    return static_cast<std::uint32_t>(it - names.begin());
  }

  std::size_t compile(const Formula& f) {
    Node n;
    n.kind = f.kind;
    n.bound = f.bound;
    for (auto v : f.bound) check_var(v);
    for (const auto& c : f.children) n.children.push_back(compile(c));
    for (const auto& t : f.terms) {
      Program p;
      compile(t, p);
      n.terms.push_back(std::move(p));
    }
    if (f.kind == Formula::Kind::relation || f.kind == Formula::Kind::not_relation) {
      n.relation = slot(rel_names_, f.relation, "relation");
      if (rel_arity_[n.relation] != f.terms.size()) throw SignatureMismatch("arity mismatch for " + f.relation);
    }
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  void compile(const Term& t, Program& out) {
    switch (t.kind) {
      case Term::Kind::variable:
        check_var(t.var);
        out.push_back({Op::Kind::var, static_cast<std::uint32_t>(t.var)});
        return;
      case Term::Kind::constant:
        out.push_back({Op::Kind::constant, slot(const_names_, t.symbol, "constant")});
        return;
      case Term::Kind::apply: {
        const auto s = slot(fn_names_, t.symbol, "function");
        if (fn_arity_[s] != t.args.size()) throw SignatureMismatch("arity mismatch for " + t.symbol);
        for (const auto& a : t.args) compile(a, out);
        out.push_back({Op::Kind::apply, s});
        return;
      }
    }
  }

  void check_var(std::size_t v) const {
    if (v >= assignment_.size()) throw PreconditionError("variable index out of range");
  }

  std::size_t value(const Program& p) {
    if (p.size() == 1) return p[0].kind == Op::Kind::var ? assignment_[p[0].arg] : consts_[p[0].arg];
    stack_.clear();
    for (const auto& op : p) {
      switch (op.kind) {
        case Op::Kind::var: stack_.push_back(assignment_[op.arg]); break;
        case Op::Kind::constant: stack_.push_back(consts_[op.arg]); break;
        case Op::Kind::apply: {
          const FunctionTable& f = *fns_[op.arg];
          std::size_t idx = 0;
          const std::size_t base = stack_.size() - f.arity;
          for (std::size_t i = base; i < stack_.size(); ++i) idx = idx * size_ + stack_[i];
          stack_.resize(base);
          stack_.push_back(f.values[idx]);
          break;
        }
      }
    }
    return stack_.back();
  }

  bool eval(const Node& n) {
    using K = Formula::Kind;
    switch (n.kind) {
      case K::equal: return value(n.terms[0]) == value(n.terms[1]);
      case K::not_equal: return value(n.terms[0]) != value(n.terms[1]);
      case K::relation:
      case K::not_relation: {
        std::size_t idx = 0;
        for (const auto& t : n.terms) idx = idx * size_ + value(t);
        const bool h = rels_[n.relation]->holds[idx] != 0;
        return n.kind == K::relation ? h : !h;
      }
      case K::conjunction:
        for (auto c : n.children)
          if (!eval(nodes_[c])) return false;
        return true;
      case K::disjunction:
        for (auto c : n.children)
          if (eval(nodes_[c])) return true;
        return false;
      case K::exists:
      case K::forall: {
        const bool want = n.kind == K::exists;
        const Node& body = nodes_[n.children.front()];
        for (auto v : n.bound) assignment_[v] = 0;
        while (true) {
          if (eval(body) == want) return want;
          std::size_t i = n.bound.size();
          while (i > 0 && ++assignment_[n.bound[i - 1]] == size_) assignment_[n.bound[--i]] = 0;
          if (i == 0) return !want;
        }
      }
    }
    return false;
  }

  std::vector<std::string> fn_names_, rel_names_, const_names_;
  std::vector<std::size_t> fn_arity_, rel_arity_;
  std::vector<const FunctionTable*> fns_;
  std::vector<const RelationTable*> rels_;
  std::vector<std::size_t> consts_;
  std::size_t size_ = 0;
  std::vector<Node> nodes_;
  std::size_t root_ = 0;
  std::vector<std::size_t> assignment_;
  std::vector<std::size_t> stack_;
};

/// A sentence compiled once and evaluated on many structures.
class PreparedSentence {
 public:
  explicit PreparedSentence(const Sentence& s) : compiled_(s.root, s.signature, s.variable_names.size()) {}

  bool eval(const FiniteStructure& m) {
    compiled_.bind(m);
    return compiled_.eval();
  }

 private:
  CompiledFormula compiled_;
};

/// Finite model checking. The structure must have the sentence's signature.
inline bool eval(const Sentence& s, const FiniteStructure& m) { return PreparedSentence(s).eval(m); }

/// Evaluates a formula with free variables 0..tuple.size()-1 bound to tuple.
inline bool satisfies(const FiniteStructure& m, const Formula& f, std::span<const std::size_t> tuple,
                      std::size_t variable_count) {
  return CompiledFormula(f, m, std::max(variable_count, tuple.size())).eval(tuple);
}

}  // namespace scottgroup

#endif  // SCOTTGROUP_FORMULA_HPP

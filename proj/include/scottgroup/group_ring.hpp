#ifndef SCOTTGROUP_GROUP_RING_HPP
#define SCOTTGROUP_GROUP_RING_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "scottgroup/errors.hpp"
#include "scottgroup/paper_group.hpp"
#include "scottgroup/symbol.hpp"

namespace scottgroup {

using Coefficient = boost::multiprecision::cpp_int;

/// Z, or Z/kZ for a modulus k >= 2.
class CoefficientRing {
 public:
  static CoefficientRing integers() { return CoefficientRing(0); }
  static CoefficientRing modulo(const Coefficient& k) {
    if (k < 2) throw PreconditionError("modulus must be at least 2");
    return CoefficientRing(k);
  }

  bool is_integers() const { return modulus_ == 0; }
  const Coefficient& modulus() const { return modulus_; }

  Coefficient canonical(Coefficient c) const {
    if (is_integers()) return c;
    c %= modulus_;
    if (c < 0) c += modulus_;
    return c;
  }

  std::string name() const { return is_integers() ? "Z" : "Z/" + modulus_.str(); }

  friend bool operator==(const CoefficientRing&, const CoefficientRing&) = default;

 private:
  explicit CoefficientRing(Coefficient m) : modulus_(std::move(m)) {}
  Coefficient modulus_;
};

/// "z" or "z/<k>".
inline CoefficientRing parse_coefficient_ring(std::string_view text) {
  if (text == "z" || text == "Z") return CoefficientRing::integers();
  if (text.size() > 2 && (text[0] == 'z' || text[0] == 'Z') && text[1] == '/') {
    const std::string digits(text.substr(2));
    if (std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
      return CoefficientRing::modulo(Coefficient(digits));
  }
  throw ParseError("unknown coefficient ring '" + std::string(text) + "'; expected z or z/<k>", 0, 1);
}

struct RingTerm {
  SymbolWord word;
  Coefficient coefficient;

  friend bool operator==(const RingTerm&, const RingTerm&) = default;
};

/// A finitely supported map G -> R. Terms are sorted by word text, carry
/// nonzero coefficients, and have pairwise distinct words in G.
class GroupRingElement {
 public:
  const CoefficientRing& ring() const { return ring_; }
  const std::vector<RingTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t support_size() const { return terms_.size(); }

  friend bool operator==(const GroupRingElement&, const GroupRingElement&) = default;

 private:
  friend class GroupRing;
  GroupRingElement(CoefficientRing r, std::vector<RingTerm> t) : ring_(std::move(r)), terms_(std::move(t)) {}
  CoefficientRing ring_;
  std::vector<RingTerm> terms_;
};

/// Terms as `c*"word"` joined by + and -, in stored order; "0" when empty.
inline std::string to_string(const GroupRingElement& x) {
  if (x.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : x.terms()) {
    if (first)
      out += c.str();
    else
      out += c < 0 ? " - " + Coefficient(-c).str() : " + " + c.str();
    out += "*\"" + to_string(w) + "\"";
    first = false;
  }
  return out;
}

struct RingRetraction {
  std::int64_t index;
  std::vector<GroupRingElement> images;
};

/// R[G] for the paper group G.
class GroupRing {
 public:
  GroupRing(PaperGroup group, CoefficientRing ring) : group_(std::move(group)), ring_(std::move(ring)) {}

  const PaperGroup& group() const { return group_; }
  const CoefficientRing& ring() const { return ring_; }

  GroupRingElement zero() const { return {ring_, {}}; }
  GroupRingElement one() const { return scalar(1); }
  GroupRingElement scalar(const Coefficient& c) const { return monomial(SymbolWord{}, c); }
  GroupRingElement monomial(const SymbolWord& w, const Coefficient& c = 1) const { return normalize({{w, c}}); }

  /// Merges words equal in G, sums coefficients and drops zeros. Each class
  /// is represented by its shortest reduced spelling, ties broken by text.
  GroupRingElement normalize(const std::vector<RingTerm>& pairs) const {
    std::map<std::string, RingTerm> by_text;
    for (const auto& [w, c] : pairs) {
      SymbolWord r = group_.reduce(w).terminal;
      auto text = to_string(r);
      auto [it, fresh] = by_text.try_emplace(std::move(text), RingTerm{std::move(r), 0});
      it->second.coefficient += c;
    }

    struct Class {
      std::string text;
      RingTerm term;
    };
    std::vector<Class> classes;
    for (auto& [text, term] : by_text) {
      auto it = std::find_if(classes.begin(), classes.end(),
                             [&](const Class& k) { return group_.equal(k.term.word, term.word); });
      if (it == classes.end()) {
        classes.push_back({text, std::move(term)});
        continue;
      }
      it->term.coefficient += term.coefficient;
      const bool better = term.word.size() < it->term.word.size() ||
                          (term.word.size() == it->term.word.size() && text < it->text);
      if (better) {
        it->text = text;
        it->term.word = std::move(term.word);
      }
    }

    std::sort(classes.begin(), classes.end(), [](const Class& x, const Class& y) { return x.text < y.text; });
    std::vector<RingTerm> out;
    for (auto& k : classes) {
      Coefficient c = ring_.canonical(std::move(k.term.coefficient));
      if (c != 0) out.push_back({std::move(k.term.word), std::move(c)});
    }
    return {ring_, std::move(out)};
  }

  GroupRingElement add(const GroupRingElement& x, const GroupRingElement& y) const {
    check(x);
    check(y);
    std::vector<RingTerm> all = x.terms();
    all.insert(all.end(), y.terms().begin(), y.terms().end());
    return normalize(all);
  }

  GroupRingElement negate(const GroupRingElement& x) const { return scale(x, -1); }

  GroupRingElement sub(const GroupRingElement& x, const GroupRingElement& y) const { return add(x, negate(y)); }

  GroupRingElement scale(const GroupRingElement& x, const Coefficient& c) const {
    check(x);
    std::vector<RingTerm> out;
    for (const auto& [w, d] : x.terms()) out.push_back({w, d * c});
    return normalize(out);
  }

  /// Convolution: sum over pairs of x(g) y(h) at g h.
  GroupRingElement mul(const GroupRingElement& x, const GroupRingElement& y) const {
    check(x);
    check(y);
    std::vector<RingTerm> out;
    out.reserve(x.support_size() * y.support_size());
    for (const auto& [g, c] : x.terms())
      for (const auto& [h, d] : y.terms()) out.push_back({g * h, c * d});
    return normalize(out);
  }

  bool equal(const GroupRingElement& x, const GroupRingElement& y) const { return sub(x, y).is_zero(); }

  /// The endomorphism induced by a letter substitution that sends relators
  /// to trivial words (iota, kappa).
  GroupRingElement induced_endo(const std::function<SymbolWord(const SymbolWord&)>& letter_map,
                                const GroupRingElement& x) const {
    check(x);
    std::vector<RingTerm> out;
    for (const auto& [w, c] : x.terms()) out.push_back({letter_map(w), c});
    return normalize(out);
  }

  /// Chooses n so that kappa(., n) separates every pair of distinct support
  /// words occurring in T, and returns the kappa-images of T.
  RingRetraction ring_retraction(std::span<const GroupRingElement> family) const {
    std::vector<SymbolWord> support;
    for (const auto& x : family) {
      check(x);
      if (x.is_zero()) throw PreconditionError("ring retraction requires nonzero elements");
      for (const auto& t : x.terms()) support.push_back(t.word);
    }
    std::sort(support.begin(), support.end(),
              [](const SymbolWord& a, const SymbolWord& b) { return to_string(a) < to_string(b); });
    support.erase(std::unique(support.begin(), support.end()), support.end());

    std::vector<SymbolWord> quotients;
    for (std::size_t i = 0; i < support.size(); ++i)
      for (std::size_t k = i + 1; k < support.size(); ++k) {
        SymbolWord q = free_reduce(support[i] * invert(support[k]));
        if (!group_.is_trivial(q)) quotients.push_back(std::move(q));
      }

    RingRetraction out{group_.choose_retraction_index(quotients), {}};
    const std::int64_t n = out.index;
    for (const auto& x : family) {
      out.images.push_back(induced_endo([n](const SymbolWord& w) { return kappa(w, n); }, x));
      if (out.images.back().is_zero()) throw InvariantViolation("retraction sent a nonzero element to zero");
    }
    return out;
  }

 private:
  void check(const GroupRingElement& x) const {
    if (!(x.ring() == ring_))
      throw PreconditionError("coefficient ring mismatch: " + x.ring().name() + " vs " + ring_.name());
  }

  PaperGroup group_;
  CoefficientRing ring_;
};

// ---------------------------------------------------------------------------
// Expressions
//
//   expr   := term (('+' | '-') term)*
//   term   := factor ('*' factor)*
//   factor := '-' factor | INT | '"' word '"' | '(' expr ')'

namespace detail {

class RingExpressionParser {
 public:
  RingExpressionParser(std::string_view text, const GroupRing& ring) : text_(text), ring_(ring) {}

  GroupRingElement parse() {
    GroupRingElement x = expr();
    skip_space();
    if (pos_ < text_.size()) fail("unexpected character");
    return x;
  }

 private:
  GroupRingElement expr() {
    GroupRingElement x = term();
    while (true) {
      skip_space();
      if (consume('+'))
        x = ring_.add(x, term());
      else if (consume('-'))
        x = ring_.sub(x, term());
      else
        return x;
    }
  }

  GroupRingElement term() {
    GroupRingElement x = factor();
    while (true) {
      skip_space();
      if (!consume('*')) return x;
      x = ring_.mul(x, factor());
    }
  }

  GroupRingElement factor() {
    skip_space();
    if (consume('-')) return ring_.negate(factor());
    if (consume('(')) {
      GroupRingElement x = expr();
      skip_space();
      if (!consume(')')) fail("expected ')'");
      return x;
    }
    if (consume('"')) {
      const std::size_t start = pos_;
      const std::size_t close = text_.find('"', start);
      if (close == std::string_view::npos) fail("unterminated word");
      pos_ = close + 1;
      return ring_.monomial(parse_word(text_.substr(start, close - start), 0, start));
    }
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return ring_.scalar(Coefficient(std::string(text_.substr(start, pos_ - start))));
    }
    fail("expected integer, quoted word, or '('");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, 0, pos_ + 1); }

  std::string_view text_;
  const GroupRing& ring_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline GroupRingElement parse_ring_expression(std::string_view text, const GroupRing& ring) {
  return detail::RingExpressionParser(text, ring).parse();
}

}  // namespace scottgroup

#endif  // SCOTTGROUP_GROUP_RING_HPP

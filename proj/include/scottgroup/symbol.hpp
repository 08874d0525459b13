#ifndef SCOTTGROUP_SYMBOL_HPP
#define SCOTTGROUP_SYMBOL_HPP

#include <cctype>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "scottgroup/errors.hpp"
#include "scottgroup/words.hpp"

namespace scottgroup {

/// Vertex (n, tau) of the generator tree.
struct TreeVertex {
  std::int64_t level = 0;
  std::vector<std::int64_t> address;

  friend bool operator==(const TreeVertex&, const TreeVertex&) = default;
  friend auto operator<=>(const TreeVertex&, const TreeVertex&) = default;
};

struct AxisA {
  friend bool operator==(AxisA, AxisA) = default;
  friend auto operator<=>(AxisA, AxisA) = default;
};

struct AxisB {
  std::int64_t index = 0;
  friend bool operator==(AxisB, AxisB) = default;
  friend auto operator<=>(AxisB, AxisB) = default;
};

struct StableLetter {
  friend bool operator==(StableLetter, StableLetter) = default;
  friend auto operator<=>(StableLetter, StableLetter) = default;
};

/// Free-form generator used by finite presentations.
struct NamedLetter {
  std::string name;
  friend bool operator==(const NamedLetter&, const NamedLetter&) = default;
  friend auto operator<=>(const NamedLetter&, const NamedLetter&) = default;
};

/// The generator alphabet shared by every module: tree vertices, a, the
/// b_i, the stable letter t, and named generators.
///
/// Order: vertices < a < b_i (by i) < t < named.
class Symbol {
 public:
  using Storage = std::variant<TreeVertex, AxisA, AxisB, StableLetter, NamedLetter>;

  Symbol() : v_(AxisA{}) {}
  Symbol(TreeVertex v) : v_(std::move(v)) {}  // NOLINT(google-explicit-constructor)

  static Symbol vertex(std::int64_t level, std::vector<std::int64_t> address = {}) {
    return Symbol(Storage(TreeVertex{level, std::move(address)}));
  }
  static Symbol a() { return Symbol(Storage(AxisA{})); }
  static Symbol b(std::int64_t i) { return Symbol(Storage(AxisB{i})); }
  static Symbol t() { return Symbol(Storage(StableLetter{})); }
  static Symbol named(std::string name) { return Symbol(Storage(NamedLetter{std::move(name)})); }

  bool is_vertex() const { return std::holds_alternative<TreeVertex>(v_); }
  bool is_a() const { return std::holds_alternative<AxisA>(v_); }
  bool is_b() const { return std::holds_alternative<AxisB>(v_); }
  bool is_t() const { return std::holds_alternative<StableLetter>(v_); }
  bool is_named() const { return std::holds_alternative<NamedLetter>(v_); }

  const TreeVertex& vertex() const { return std::get<TreeVertex>(v_); }
  std::int64_t b_index() const { return std::get<AxisB>(v_).index; }
  const std::string& name() const { return std::get<NamedLetter>(v_).name; }
  const Storage& storage() const { return v_; }

  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend bool operator<(const Symbol& x, const Symbol& y) { return x.v_ < y.v_; }
  friend bool operator>(const Symbol& x, const Symbol& y) { return y < x; }
  friend bool operator<=(const Symbol& x, const Symbol& y) { return !(y < x); }
  friend bool operator>=(const Symbol& x, const Symbol& y) { return !(x < y); }

 private:
  explicit Symbol(Storage v) : v_(std::move(v)) {}
  Storage v_;
};

using SymbolLetter = Letter<Symbol>;
using SymbolWord = Word<Symbol>;

inline SymbolLetter letter(Symbol s, int sign = 1) { return SymbolLetter{std::move(s), sign < 0}; }

// ---------------------------------------------------------------------------
// Text rendering

inline std::string to_string(const TreeVertex& v) {
  std::string out = "v(" + std::to_string(v.level) + ",[";
  for (std::size_t i = 0; i < v.address.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v.address[i]);
  }
  out += "])";
  return out;
}

inline std::string to_string(const Symbol& s) {
  struct Visitor {
    std::string operator()(const TreeVertex& v) const { return to_string(v); }
    std::string operator()(AxisA) const { return "a"; }
    std::string operator()(AxisB b) const { return "b(" + std::to_string(b.index) + ")"; }
    std::string operator()(StableLetter) const { return "t"; }
    std::string operator()(const NamedLetter& n) const { return n.name; }
  };
  return std::visit(Visitor{}, s.storage());
}

inline std::string to_string(const SymbolLetter& l) { return to_string(l.gen) + (l.inverted ? "^-1" : ""); }

inline std::string to_string(const SymbolWord& w) {
  if (w.empty()) return "e";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += to_string(w[i]);
  }
  return out;
}

inline std::string to_string(const CyclicWord<Symbol>& w) { return to_string(w.word()); }

// ---------------------------------------------------------------------------
// Parsing
//
//   word    := 'e' | letter (WS letter)*
//   letter  := token ('^-1')?
//   token   := 'v(' INT ',' '[' (INT (',' INT)*)? '])' | 'a' | 'b(' INT ')' | 't' | IDENT

namespace detail {

class WordScanner {
 public:
  WordScanner(std::string_view text, std::size_t line, std::size_t column_offset)
      : text_(text), line_(line), offset_(column_offset) {}

  bool at_end() const { return pos_ >= text_.size(); }
  std::size_t pos() const { return pos_; }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, offset_ + pos_ + 1); }

  bool consume(std::string_view s) {
    if (text_.substr(pos_, s.size()) == s) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view s) {
    if (!consume(s)) fail("expected '" + std::string(s) + "'");
  }

  std::int64_t integer() {
    const std::size_t start = pos_;
    bool negative = false;
    if (!at_end() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    if (at_end() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) fail("expected integer");
    // Accumulate as a negative number so INT64_MIN is representable.
    std::int64_t value = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      const int d = text_[pos_] - '0';
      if (value < (std::numeric_limits<std::int64_t>::min() + d) / 10) {
        pos_ = start;
        fail("integer out of range");
      }
      value = value * 10 - d;
      ++pos_;
    }
    if (!negative) {
      if (value == std::numeric_limits<std::int64_t>::min()) {
        pos_ = start;
        fail("integer out of range");
      }
      value = -value;
    }
    return value;
  }

  std::string identifier() {
    const std::size_t start = pos_;
    if (at_end() || !(std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      fail("expected generator");
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void rewind(std::size_t p) { pos_ = p; }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

inline Symbol parse_symbol(WordScanner& in) {
  const std::size_t start = in.pos();
  const std::string ident = in.identifier();
  if (ident == "v" && in.peek() == '(') {
    in.expect("(");
    const std::int64_t level = in.integer();
    if (level < 0) {
      in.rewind(start);
      in.fail("vertex level must be non-negative");
    }
    in.expect(",");
    in.expect("[");
    std::vector<std::int64_t> address;
    if (in.peek() != ']') {
      address.push_back(in.integer());
      while (in.consume(",")) address.push_back(in.integer());
    }
    in.expect("])");
    return Symbol::vertex(level, std::move(address));
  }
  if (ident == "b" && in.peek() == '(') {
    in.expect("(");
    const std::int64_t i = in.integer();
    in.expect(")");
    return Symbol::b(i);
  }
  if (ident == "a") return Symbol::a();
  if (ident == "t") return Symbol::t();
  if (ident == "e") {
    in.rewind(start);
    in.fail("'e' denotes the empty word and cannot be used as a letter");
  }
  return Symbol::named(ident);
}

inline SymbolLetter parse_letter(WordScanner& in) {
  Symbol s = parse_symbol(in);
  const bool inv = in.consume("^-1");
  if (in.peek() == '^') in.fail("only '^-1' exponents are allowed");
  return SymbolLetter{std::move(s), inv};
}

}  // namespace detail

/// Parses the word grammar. Errors carry the 1-based column (plus the given
/// offset) and line.
inline SymbolWord parse_word(std::string_view text, std::size_t line = 0, std::size_t column_offset = 0) {
  detail::WordScanner in(text, line, column_offset);
  in.skip_space();
  if (in.at_end()) in.fail("empty input; write 'e' for the empty word");
  {
    const std::size_t p = in.pos();
    if (in.consume("e")) {
      const char c = in.peek();
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '(' || c == '^')) {
        in.skip_space();
        if (!in.at_end()) in.fail("'e' must stand alone");
        return {};
      }
      in.rewind(p);
    }
  }
  SymbolWord w;
  while (true) {
    w.push_back(detail::parse_letter(in));
    const std::size_t before = in.pos();
    in.skip_space();
    if (in.at_end()) break;
    if (in.pos() == before) in.fail("letters must be separated by whitespace");
  }
  return w;
}

inline Symbol parse_symbol(std::string_view text, std::size_t line = 0, std::size_t column_offset = 0) {
  detail::WordScanner in(text, line, column_offset);
  in.skip_space();
  Symbol s = detail::parse_symbol(in);
  in.skip_space();
  if (!in.at_end()) in.fail("trailing characters after generator");
  return s;
}

}  // namespace scottgroup

#endif  // SCOTTGROUP_SYMBOL_HPP

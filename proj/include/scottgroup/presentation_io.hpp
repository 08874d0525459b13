#ifndef SCOTTGROUP_PRESENTATION_IO_HPP
#define SCOTTGROUP_PRESENTATION_IO_HPP

#include <algorithm>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "scottgroup/presentation.hpp"
#include "scottgroup/symbol.hpp"

namespace scottgroup {

/// Contents of a presentation file:
///
///   # comment
///   gen <generator>
///   rel <word>
///   lambda <p>/<q>
///
/// Relators must use declared generators. Relators that are not cyclically
/// reduced are replaced by their cyclically reduced core.
struct FinitePresentation {
  std::vector<Symbol> generators;
  std::vector<CyclicWord<Symbol>> relators;
  std::optional<Rational> lambda;

  Presentation<Symbol> presentation() const { return make_finite_presentation(generators, relators, lambda); }
};

inline Rational parse_rational(std::string_view text, std::size_t line = 0, std::size_t column_offset = 0) {
  detail::WordScanner in(text, line, column_offset);
  in.skip_space();
  const std::int64_t num = in.integer();
  std::int64_t den = 1;
  if (in.consume("/")) {
    den = in.integer();
    if (den == 0) in.fail("zero denominator");
  }
  in.skip_space();
  if (!in.at_end()) in.fail("trailing characters after rational");
  return Rational(num, den);
}

inline FinitePresentation parse_presentation(std::istream& input) {
  FinitePresentation out;
  std::set<Symbol> declared;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(input, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t p = 0;
    while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p]))) ++p;
    if (p == line.size()) continue;
    std::size_t q = p;
    while (q < line.size() && !std::isspace(static_cast<unsigned char>(line[q]))) ++q;
    const std::string_view keyword = line.substr(p, q - p);
    const std::string_view rest = line.substr(q);
    if (keyword == "gen") {
      Symbol s = parse_symbol(rest, line_no, q);
      if (!declared.insert(s).second) throw ParseError("duplicate generator " + to_string(s), line_no, p + 1);
      out.generators.push_back(std::move(s));
    } else if (keyword == "rel") {
      const SymbolWord w = parse_word(rest, line_no, q);
      for (std::size_t i = 0; i < w.size(); ++i)
        if (!declared.count(w[i].gen))
          throw ParseError("undeclared generator " + to_string(w[i].gen), line_no, q + 1);
      out.relators.push_back(cyclic_reduce(w).core);
    } else if (keyword == "lambda") {
      out.lambda = parse_rational(rest, line_no, q);
    } else {
      throw ParseError("unknown directive '" + std::string(keyword) + "'", line_no, p + 1);
    }
  }
  return out;
}

inline FinitePresentation parse_presentation(const std::string& text) {
  std::istringstream in(text);
  return parse_presentation(in);
}

}  // namespace scottgroup

#endif  // SCOTTGROUP_PRESENTATION_IO_HPP

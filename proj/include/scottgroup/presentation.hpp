#ifndef SCOTTGROUP_PRESENTATION_HPP
#define SCOTTGROUP_PRESENTATION_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include <boost/rational.hpp>

#include "scottgroup/errors.hpp"
#include "scottgroup/words.hpp"

namespace scottgroup {

using Rational = boost::rational<std::int64_t>;

/// All rotations of a family of cyclic words and of their inverses, sorted
/// lexicographically with duplicates removed.
///
/// Letters are interned to integer codes whose order agrees with the order of
/// Letter, so the sorted order here is the lexicographic order of words.
template <Generator Gen>
class RotationTable {
 public:
  static constexpr std::uint32_t kForeign = std::numeric_limits<std::uint32_t>::max();

  struct Entry {
    std::uint32_t source;  // index into strings_
    std::uint32_t offset;
    std::uint32_t length;
  };

  explicit RotationTable(std::span<const CyclicWord<Gen>> relators) {
    std::set<Gen> gens;
    for (const auto& r : relators)
      for (const auto& l : r.word()) gens.insert(l.gen);
    alphabet_.assign(gens.begin(), gens.end());

    for (const auto& r : relators) {
      if (r.empty()) continue;
      for (const auto& w : {r.word(), invert(r.word())}) {
        std::vector<std::uint32_t> codes;
        codes.reserve(2 * w.size());
        for (const auto& l : w) codes.push_back(code_of(l));
        codes.insert(codes.end(), codes.begin(), codes.end());
        const auto source = static_cast<std::uint32_t>(strings_.size());
        strings_.push_back(std::move(codes));
        for (std::size_t k = 0; k < w.size(); ++k)
          entries_.push_back({source, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(w.size())});
      }
    }
    std::sort(entries_.begin(), entries_.end(),
              [this](const Entry& x, const Entry& y) { return compare(x, y) < 0; });
    entries_.erase(std::unique(entries_.begin(), entries_.end(),
                               [this](const Entry& x, const Entry& y) { return compare(x, y) == 0; }),
                   entries_.end());
  }

  std::size_t size() const { return entries_.size(); }
  std::size_t length(std::size_t i) const { return entries_[i].length; }

  Word<Gen> word(std::size_t i) const {
    const Entry& e = entries_[i];
    std::vector<Letter<Gen>> out;
    out.reserve(e.length);
    for (std::size_t k = 0; k < e.length; ++k) out.push_back(letter_of(at(e, k)));
    return Word<Gen>(std::move(out));
  }

  /// Longest common prefix of two sorted entries.
  std::size_t lcp(std::size_t i, std::size_t j) const {
    const Entry& x = entries_[i];
    const Entry& y = entries_[j];
    const std::size_t n = std::min(x.length, y.length);
    std::size_t k = 0;
    while (k < n && at(x, k) == at(y, k)) ++k;
    return k;
  }

  /// Letter codes of w; generators outside the table's alphabet map to kForeign.
  std::vector<std::uint32_t> encode(const Word<Gen>& w) const {
    std::vector<std::uint32_t> out;
    out.reserve(w.size());
    for (const auto& l : w) {
      auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), l.gen);
      if (it == alphabet_.end() || !(*it == l.gen))
        out.push_back(kForeign);
      else
        out.push_back(2 * static_cast<std::uint32_t>(it - alphabet_.begin()) + (l.inverted ? 1 : 0));
    }
    return out;
  }

  struct PrefixMatch {
    std::size_t entry;
    std::size_t length;
  };

  /// The entry sharing the longest prefix with text; among those, the
  /// lexicographically least. Empty when no entry shares even one letter.
  std::optional<PrefixMatch> best_prefix_match(std::span<const std::uint32_t> text) const {
    if (entries_.empty() || text.empty()) return std::nullopt;
    auto cmp_text = [&](const Entry& e) {
      const std::size_t n = std::min<std::size_t>(e.length, text.size());
      for (std::size_t k = 0; k < n; ++k) {
        const auto c = at(e, k);
        if (c != text[k]) return c < text[k] ? -1 : 1;
      }
      if (e.length == text.size()) return 0;
      return e.length < text.size() ? -1 : 1;
    };
    auto lcp_text = [&](const Entry& e) {
      const std::size_t n = std::min<std::size_t>(e.length, text.size());
      std::size_t k = 0;
      while (k < n && at(e, k) == text[k]) ++k;
      return k;
    };
    std::size_t lo = 0, hi = entries_.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cmp_text(entries_[mid]) < 0)
        lo = mid + 1;
      else
        hi = mid;
    }
    std::size_t best_len = 0;
    std::size_t best = 0;
    if (lo < entries_.size()) {
      best_len = lcp_text(entries_[lo]);
      best = lo;
    }
    if (lo > 0) {
      const std::size_t l = lcp_text(entries_[lo - 1]);
      if (l >= best_len) {
        best_len = l;
        best = lo - 1;
      }
    }
    if (best_len == 0) return std::nullopt;
    while (best > 0 && lcp_text(entries_[best - 1]) >= best_len) --best;
    return PrefixMatch{best, best_len};
  }

 private:
  std::uint32_t at(const Entry& e, std::size_t k) const { return strings_[e.source][e.offset + k]; }

  int compare(const Entry& x, const Entry& y) const {
    const std::size_t n = std::min(x.length, y.length);
    const auto* px = strings_[x.source].data() + x.offset;
    const auto* py = strings_[y.source].data() + y.offset;
    for (std::size_t k = 0; k < n; ++k)
      if (px[k] != py[k]) return px[k] < py[k] ? -1 : 1;
    if (x.length == y.length) return 0;
    return x.length < y.length ? -1 : 1;
  }

  std::uint32_t code_of(const Letter<Gen>& l) const {
    auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), l.gen);
    return 2 * static_cast<std::uint32_t>(it - alphabet_.begin()) + (l.inverted ? 1 : 0);
  }
  Letter<Gen> letter_of(std::uint32_t c) const { return Letter<Gen>{alphabet_[c / 2], (c & 1) != 0}; }

  std::vector<Gen> alphabet_;
  std::vector<std::vector<std::uint32_t>> strings_;
  std::vector<Entry> entries_;
};

namespace detail {

/// Per-relator rotation tables shared by all copies of a presentation.
template <Generator Gen>
class RelatorTableCache {
 public:
  std::shared_ptr<const RotationTable<Gen>> get(const CyclicWord<Gen>& r) {
    {
      std::lock_guard lock(mu_);
      auto it = tables_.find(r);
      if (it != tables_.end()) return it->second;
    }
    auto table = std::make_shared<const RotationTable<Gen>>(std::span<const CyclicWord<Gen>>(&r, 1));
    std::lock_guard lock(mu_);
    return tables_.emplace(r, std::move(table)).first->second;
  }

 private:
  std::mutex mu_;
  std::map<CyclicWord<Gen>, std::shared_ptr<const RotationTable<Gen>>> tables_;
};

}  // namespace detail

/// A presentation <S | R> over a possibly infinite alphabet.
///
/// relators_for(L) must return every relator r that has a cyclic subword of
/// length > |r|/2 spelled with generators from L (it may return more). All
/// returned relators must be cyclically reduced.
template <Generator Gen>
struct Presentation {
  using RelatorSource = std::function<std::vector<CyclicWord<Gen>>(const std::set<Gen>&)>;

  std::vector<Gen> generators;  // listing for finite alphabets; may be empty
  RelatorSource relators_for;
  std::optional<Rational> lambda_claim;
  /// Lower bound on relator length; 0 when unknown. Lets Dehn search skip
  /// words too short to contain more than half of any relator.
  std::size_t min_relator_length = 0;
  std::shared_ptr<detail::RelatorTableCache<Gen>> tables = std::make_shared<detail::RelatorTableCache<Gen>>();
};

template <Generator Gen>
Presentation<Gen> make_finite_presentation(std::vector<Gen> generators, std::vector<CyclicWord<Gen>> relators,
                                           std::optional<Rational> lambda_claim = std::nullopt) {
  Presentation<Gen> p;
  p.generators = std::move(generators);
  p.lambda_claim = lambda_claim;
  std::size_t shortest = 0;
  for (const auto& r : relators)
    if (!r.empty() && (shortest == 0 || r.size() < shortest)) shortest = r.size();
  p.min_relator_length = shortest;
  p.relators_for = [rels = std::move(relators)](const std::set<Gen>&) { return rels; };
  return p;
}

template <Generator Gen>
struct PieceReport {
  Word<Gen> r1;
  Word<Gen> r2;
  std::size_t piece_length = 0;
  Rational ratio;
};

template <Generator Gen>
struct MaxPiece {
  std::size_t length = 0;
  std::optional<PieceReport<Gen>> witness;
};

namespace detail {

template <Generator Gen>
std::vector<CyclicWord<Gen>> nonempty_relators(const Presentation<Gen>& p, const std::set<Gen>& letters) {
  std::vector<CyclicWord<Gen>> rels = p.relators_for(letters);
  std::sort(rels.begin(), rels.end());
  rels.erase(std::unique(rels.begin(), rels.end()), rels.end());
  std::erase_if(rels, [](const CyclicWord<Gen>& r) { return r.empty(); });
  return rels;
}

/// For each sorted entry, the longest prefix it shares with a different entry.
template <Generator Gen>
std::vector<std::size_t> longest_pieces(const RotationTable<Gen>& table) {
  std::vector<std::size_t> best(table.size(), 0);
  for (std::size_t i = 0; i + 1 < table.size(); ++i) {
    const std::size_t l = table.lcp(i, i + 1);
    best[i] = std::max(best[i], l);
    best[i + 1] = std::max(best[i + 1], l);
  }
  return best;
}

}  // namespace detail

/// Longest piece among the symmetrized closure of relators_for(letters).
/// The witness is the pair realizing it, preferring the larger ratio.
template <Generator Gen>
MaxPiece<Gen> max_piece(const Presentation<Gen>& p, const std::set<Gen>& letters) {
  const auto rels = detail::nonempty_relators(p, letters);
  const RotationTable<Gen> table{std::span<const CyclicWord<Gen>>(rels)};
  MaxPiece<Gen> out;
  std::optional<std::pair<std::size_t, std::size_t>> pair;
  Rational best_ratio(0);
  for (std::size_t i = 0; i + 1 < table.size(); ++i) {
    const std::size_t l = table.lcp(i, i + 1);
    if (l == 0) continue;
    // Report the pair from the viewpoint of the shorter relator.
    std::size_t r1 = i, r2 = i + 1;
    if (table.length(r2) < table.length(r1)) std::swap(r1, r2);
    const Rational ratio(static_cast<std::int64_t>(l), static_cast<std::int64_t>(table.length(r1)));
    if (l > out.length || (l == out.length && ratio > best_ratio)) {
      out.length = l;
      best_ratio = ratio;
      pair = {r1, r2};
    }
  }
  if (pair) out.witness = PieceReport<Gen>{table.word(pair->first), table.word(pair->second), out.length, best_ratio};
  return out;
}

/// True iff every piece u of every symmetrized relator r satisfies
/// |u| < lambda |r|, in exact arithmetic.
template <Generator Gen>
bool is_c_prime(const Presentation<Gen>& p, Rational lambda, const std::set<Gen>& letters) {
  if (lambda <= 0) throw PreconditionError("C'(lambda) requires lambda > 0");
  const auto rels = detail::nonempty_relators(p, letters);
  const RotationTable<Gen> table{std::span<const CyclicWord<Gen>>(rels)};
  const auto pieces = detail::longest_pieces(table);
  for (std::size_t i = 0; i < table.size(); ++i) {
    // pieces[i] < lambda * len  <=>  pieces[i] * den < num * len
    const auto lhs = static_cast<std::int64_t>(pieces[i]) * lambda.denominator();
    const auto rhs = lambda.numerator() * static_cast<std::int64_t>(table.length(i));
    if (lhs >= rhs) return false;
  }
  return true;
}

/// A subword v of w, starting at `start`, that is a prefix of the
/// symmetrized relator r = v * complement with |v| > |r|/2.
template <Generator Gen>
struct DehnMatch {
  std::size_t start = 0;
  Word<Gen> v;
  Word<Gen> relator;
  Word<Gen> complement;
};

/// Leftmost start, then longest v, then lexicographically least relator.
template <Generator Gen>
std::optional<DehnMatch<Gen>> greendlinger_find(const Word<Gen>& w, const Presentation<Gen>& p) {
  if (w.empty()) return std::nullopt;
  if (p.min_relator_length > 0 && 2 * w.size() <= p.min_relator_length) return std::nullopt;
  const auto rels = detail::nonempty_relators(p, generators_of(w));
  if (rels.empty()) return std::nullopt;

  struct Source {
    std::shared_ptr<const RotationTable<Gen>> table;
    std::vector<std::uint32_t> text;
  };
  std::vector<Source> sources;
  sources.reserve(rels.size());
  for (const auto& r : rels) {
    if (2 * w.size() <= r.size()) continue;
    auto table = p.tables->get(r);
    auto text = table->encode(w);
    sources.push_back({std::move(table), std::move(text)});
  }

  for (std::size_t start = 0; start < w.size(); ++start) {
    const RotationTable<Gen>* best_table = nullptr;
    std::size_t best_entry = 0;
    std::size_t best_len = 0;
    Word<Gen> best_word;
    for (const auto& s : sources) {
      const std::size_t rel_len = s.table->length(0);
      if (2 * (w.size() - start) <= rel_len) continue;
      const auto m = s.table->best_prefix_match(std::span<const std::uint32_t>(s.text).subspan(start));
      if (!m || 2 * m->length <= rel_len) continue;
      if (m->length < best_len) continue;
      Word<Gen> candidate = s.table->word(m->entry);
      if (m->length > best_len || candidate < best_word) {
        best_table = s.table.get();
        best_entry = m->entry;
        best_len = m->length;
        best_word = std::move(candidate);
      }
    }
    if (best_table) {
      (void)best_entry;
      DehnMatch<Gen> match;
      match.start = start;
      match.v = w.subword(start, best_len);
      match.complement = best_word.subword(best_len, best_word.size() - best_len);
      match.relator = std::move(best_word);
      return match;
    }
  }
  return std::nullopt;
}

/// One Dehn step: v is replaced by complement^-1 and the result freely reduced.
template <Generator Gen>
Word<Gen> apply_dehn_step(const Word<Gen>& w, const DehnMatch<Gen>& m) {
  Word<Gen> out = w.subword(0, m.start);
  out.append(invert(m.complement));
  out.append(w.subword(m.start + m.v.size(), w.size() - m.start - m.v.size()));
  return free_reduce(out);
}

template <Generator Gen>
Word<Gen> dehn_reduce(const Word<Gen>& input, const Presentation<Gen>& p) {
  Word<Gen> w = free_reduce(input);
  while (auto m = greendlinger_find(w, p)) w = apply_dehn_step(w, *m);
  return w;
}

namespace detail {

template <Generator Gen>
bool trusts_greendlinger(const Presentation<Gen>& p) {
  return p.lambda_claim && *p.lambda_claim > 0 && *p.lambda_claim <= Rational(1, 6);
}

}  // namespace detail

/// Small-cancellation word problem. Unless the presentation carries a claim
/// lambda <= 1/6, C'(1/6) is verified over the letters of w first and a
/// PreconditionError is thrown when it fails.
template <Generator Gen>
bool word_problem(const Word<Gen>& w, const Presentation<Gen>& p) {
  if (!detail::trusts_greendlinger(p) && !is_c_prime(p, Rational(1, 6), generators_of(w)))
    throw PreconditionError("presentation is not C'(1/6) over the letters of the word");
  return dehn_reduce(free_reduce(w), p).empty();
}

}  // namespace scottgroup

#endif  // SCOTTGROUP_PRESENTATION_HPP

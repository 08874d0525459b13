#ifndef SCOTTGROUP_WORDS_HPP
#define SCOTTGROUP_WORDS_HPP

#include <algorithm>
#include <compare>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "scottgroup/errors.hpp"

namespace scottgroup {

template <class G>
concept Generator = std::totally_ordered<G> && std::copyable<G>;

/// A generator together with an exponent of +1 or -1.
///
/// Ordering is by generator first, then the positive letter before its
/// inverse. Every lexicographic comparison of words in this library uses it.
template <Generator Gen>
struct Letter {
  Gen gen;
  bool inverted = false;

  int sign() const { return inverted ? -1 : 1; }
  Letter inverse() const { return Letter{gen, !inverted}; }
  bool cancels(const Letter& other) const { return inverted != other.inverted && gen == other.gen; }

  friend bool operator==(const Letter&, const Letter&) = default;
  friend bool operator<(const Letter& x, const Letter& y) {
    if (x.gen < y.gen) return true;
    if (y.gen < x.gen) return false;
    return !x.inverted && y.inverted;
  }
  friend bool operator>(const Letter& x, const Letter& y) { return y < x; }
  friend bool operator<=(const Letter& x, const Letter& y) { return !(y < x); }
  friend bool operator>=(const Letter& x, const Letter& y) { return !(x < y); }
};

template <Generator Gen>
class Word {
 public:
  using letter_type = Letter<Gen>;
  using const_iterator = typename std::vector<letter_type>::const_iterator;

  Word() = default;
  Word(std::initializer_list<letter_type> letters) : letters_(letters) {}
  explicit Word(std::vector<letter_type> letters) : letters_(std::move(letters)) {}
  template <class It>
  Word(It first, It last) : letters_(first, last) {}

  static Word of(const Gen& g, int exponent = 1) {
    Word w;
    const bool inv = exponent < 0;
    for (int i = 0; i < (inv ? -exponent : exponent); ++i) w.letters_.push_back({g, inv});
    return w;
  }

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  const letter_type& operator[](std::size_t i) const { return letters_[i]; }
  const letter_type& front() const { return letters_.front(); }
  const letter_type& back() const { return letters_.back(); }
  const_iterator begin() const { return letters_.begin(); }
  const_iterator end() const { return letters_.end(); }
  const std::vector<letter_type>& letters() const { return letters_; }
  std::span<const letter_type> view() const { return letters_; }

  void push_back(const letter_type& l) { letters_.push_back(l); }
  void append(const Word& w) { letters_.insert(letters_.end(), w.letters_.begin(), w.letters_.end()); }
  void reserve(std::size_t n) { letters_.reserve(n); }

  Word subword(std::size_t pos, std::size_t len) const {
    return Word(letters_.begin() + static_cast<std::ptrdiff_t>(pos),
                letters_.begin() + static_cast<std::ptrdiff_t>(pos + len));
  }

  /// Plain concatenation; no cancellation.
  friend Word operator*(const Word& x, const Word& y) {
    Word r;
    r.letters_.reserve(x.size() + y.size());
    r.append(x);
    r.append(y);
    return r;
  }

  friend bool operator==(const Word&, const Word&) = default;
  friend bool operator<(const Word& x, const Word& y) {
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
  }
  friend bool operator>(const Word& x, const Word& y) { return y < x; }
  friend bool operator<=(const Word& x, const Word& y) { return !(y < x); }
  friend bool operator>=(const Word& x, const Word& y) { return !(x < y); }

 private:
  std::vector<letter_type> letters_;
};

template <Generator Gen>
bool is_freely_reduced(const Word<Gen>& w) {
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (w[i].cancels(w[i + 1])) return false;
  return true;
}

template <Generator Gen>
bool is_cyclically_reduced(const Word<Gen>& w) {
  return is_freely_reduced(w) && (w.size() < 2 || !w.front().cancels(w.back()));
}

template <Generator Gen>
Word<Gen> free_reduce(const Word<Gen>& w) {
  std::vector<Letter<Gen>> stack;
  stack.reserve(w.size());
  for (const auto& l : w) {
    if (!stack.empty() && stack.back().cancels(l))
      stack.pop_back();
    else
      stack.push_back(l);
  }
  return Word<Gen>(std::move(stack));
}

template <Generator Gen>
Word<Gen> invert(const Word<Gen>& w) {
  std::vector<Letter<Gen>> out;
  out.reserve(w.size());
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) out.push_back(it->inverse());
  return Word<Gen>(std::move(out));
}

/// The set of generators occurring in w, regardless of sign.
template <Generator Gen>
std::set<Gen> generators_of(const Word<Gen>& w) {
  std::set<Gen> out;
  for (const auto& l : w) out.insert(l.gen);
  return out;
}

/// A freely and cyclically reduced word, considered up to nothing: the
/// letter sequence is stored as given. Rotations are produced explicitly.
template <Generator Gen>
class CyclicWord {
 public:
  CyclicWord() = default;
  explicit CyclicWord(Word<Gen> w) : word_(std::move(w)) {
    if (!is_cyclically_reduced(word_)) throw PreconditionError("word is not cyclically reduced");
  }

  const Word<Gen>& word() const { return word_; }
  std::size_t size() const { return word_.size(); }
  bool empty() const { return word_.empty(); }

  CyclicWord rotate(std::size_t k) const {
    if (word_.empty()) return *this;
    k %= word_.size();
    std::vector<Letter<Gen>> out;
    out.reserve(word_.size());
    out.insert(out.end(), word_.begin() + static_cast<std::ptrdiff_t>(k), word_.end());
    out.insert(out.end(), word_.begin(), word_.begin() + static_cast<std::ptrdiff_t>(k));
    CyclicWord r;
    r.word_ = Word<Gen>(std::move(out));
    return r;
  }

  CyclicWord inverse() const {
    CyclicWord r;
    r.word_ = invert(word_);
    return r;
  }

  friend bool operator==(const CyclicWord&, const CyclicWord&) = default;
  friend bool operator<(const CyclicWord& x, const CyclicWord& y) { return x.word_ < y.word_; }

 private:
  Word<Gen> word_;
};

template <Generator Gen>
struct CyclicDecomposition {
  Word<Gen> conjugator;
  CyclicWord<Gen> core;
};

/// Splits w as conjugator * core * conjugator^-1 with a cyclically reduced
/// core. The input is freely reduced first. An empty core always comes with
/// an empty conjugator.
template <Generator Gen>
CyclicDecomposition<Gen> cyclic_reduce(const Word<Gen>& input) {
  const Word<Gen> w = free_reduce(input);
  if (w.empty()) return {};
  std::size_t i = 0;
  std::size_t j = w.size() - 1;
  while (i < j && w[i].cancels(w[j])) {
    ++i;
    --j;
  }
  // A freely reduced word cannot collapse completely from both ends.
  return {w.subword(0, i), CyclicWord<Gen>(w.subword(i, j - i + 1))};
}

/// Smallest superset closed under inversion and cyclic permutation.
template <Generator Gen>
std::set<CyclicWord<Gen>> symmetrize(const std::set<CyclicWord<Gen>>& relators) {
  std::set<CyclicWord<Gen>> out;
  for (const auto& r : relators) {
    const CyclicWord<Gen> inv = r.inverse();
    for (std::size_t k = 0; k < std::max<std::size_t>(r.size(), 1); ++k) {
      out.insert(r.rotate(k));
      out.insert(inv.rotate(k));
    }
  }
  return out;
}

}  // namespace scottgroup

#endif  // SCOTTGROUP_WORDS_HPP

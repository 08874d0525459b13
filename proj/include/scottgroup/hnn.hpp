#ifndef SCOTTGROUP_HNN_HPP
#define SCOTTGROUP_HNN_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "scottgroup/errors.hpp"
#include "scottgroup/words.hpp"

namespace scottgroup {

enum class Membership { member, nonmember, inconclusive };

/// Answer of a subgroup-membership oracle. When `status` is member, `image`
/// is the rewritten word (alpha(g) for H, alpha^-1(g) for K).
template <Generator Gen>
struct MembershipAnswer {
  Membership status = Membership::nonmember;
  Word<Gen> image;

  static MembershipAnswer member(Word<Gen> image) { return {Membership::member, std::move(image)}; }
  static MembershipAnswer nonmember() { return {}; }
  static MembershipAnswer inconclusive() { return {Membership::inconclusive, {}}; }
};

/// HNN extension G*_alpha = <S, t | R, t h t^-1 = alpha(h)> described by
/// oracles on the base group.
template <Generator Gen>
struct HnnData {
  std::function<bool(const Word<Gen>&)> base_word_problem;
  Gen stable;
  std::function<MembershipAnswer<Gen>(const Word<Gen>&)> dom_membership;    // g in H ? alpha(g)
  std::function<MembershipAnswer<Gen>(const Word<Gen>&)> codom_membership;  // g in K ? alpha^-1(g)
};

/// t^sign * inner * t^-sign occupying [start, start + inner.size() + 2).
template <Generator Gen>
struct Pinch {
  std::size_t start = 0;
  int sign = 1;
  Word<Gen> inner;
  Word<Gen> rewrite;

  std::size_t end() const { return start + inner.size() + 2; }
};

template <Generator Gen>
int stable_exponent_sum(const Word<Gen>& w, const Gen& stable) {
  int sum = 0;
  for (const auto& l : w)
    if (l.gen == stable) sum += l.sign();
  return sum;
}

template <Generator Gen>
std::size_t stable_letter_count(const Word<Gen>& w, const Gen& stable) {
  std::size_t n = 0;
  for (const auto& l : w)
    if (l.gen == stable) ++n;
  return n;
}

/// Leftmost innermost pinch: consecutive stable letters of opposite sign
/// whose interior lies in H (sign +1) or K (sign -1).
template <Generator Gen>
std::optional<Pinch<Gen>> find_pinch(const Word<Gen>& w, const HnnData<Gen>& d) {
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i].gen == d.stable)) continue;
    if (prev && w[*prev].inverted != w[i].inverted) {
      const std::size_t p = *prev;
      const int sign = w[p].sign();
      Word<Gen> inner = w.subword(p + 1, i - p - 1);
      const auto answer = sign > 0 ? d.dom_membership(inner) : d.codom_membership(inner);
      if (answer.status == Membership::inconclusive)
        throw OracleInconclusive("membership oracle inconclusive for a stable-letter interior");
      if (answer.status == Membership::member) return Pinch<Gen>{p, sign, std::move(inner), answer.image};
    }
    prev = i;
  }
  return std::nullopt;
}

/// Removes pinches until none remain. The result equals w in G*_alpha.
template <Generator Gen>
Word<Gen> britton_reduce(const Word<Gen>& input, const HnnData<Gen>& d, std::size_t* steps = nullptr) {
  Word<Gen> w = free_reduce(input);
  std::size_t n = 0;
  while (auto pinch = find_pinch(w, d)) {
    Word<Gen> next = w.subword(0, pinch->start);
    next.append(pinch->rewrite);
    next.append(w.subword(pinch->end(), w.size() - pinch->end()));
    w = free_reduce(next);
    ++n;
  }
  if (steps) *steps = n;
  return w;
}

/// Britton's lemma: a pinch-free word containing the stable letter is
/// nontrivial; a stable-letter-free word is decided by the base group.
template <Generator Gen>
bool hnn_word_problem(const Word<Gen>& w, const HnnData<Gen>& d) {
  if (stable_exponent_sum(w, d.stable) != 0) return false;
  const Word<Gen> reduced = britton_reduce(w, d);
  if (stable_letter_count(reduced, d.stable) > 0) return false;
  return d.base_word_problem(reduced);
}

}  // namespace scottgroup

#endif  // SCOTTGROUP_HNN_HPP

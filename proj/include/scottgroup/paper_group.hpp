#ifndef SCOTTGROUP_PAPER_GROUP_HPP
#define SCOTTGROUP_PAPER_GROUP_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scottgroup/errors.hpp"
#include "scottgroup/hnn.hpp"
#include "scottgroup/presentation.hpp"
#include "scottgroup/symbol.hpp"
#include "scottgroup/words.hpp"

namespace scottgroup {

/// Exponent cap of the defining word u(x, y) = x y x^2 y ... x^m y.
inline constexpr int kDefaultCap = 100;

/// Smallest cap for which the presentation is C'(1/6): the longest piece
/// has length 2m - 2 against relators of length m(m+1)/2 + m + 1.
inline constexpr int kMinimumCap = 20;

inline std::size_t relator_length(int m) {
  const auto mm = static_cast<std::size_t>(m);
  return mm * (mm + 1) / 2 + mm + 1;
}

inline TreeVertex parent(const TreeVertex& v) {
  if (v.address.empty()) return TreeVertex{v.level + 1, {}};
  TreeVertex p = v;
  p.address.pop_back();
  return p;
}

inline TreeVertex child(const TreeVertex& v, std::int64_t i) {
  TreeVertex c = v;
  c.address.push_back(i);
  return c;
}

/// x y x^2 y ... x^m y, freely reduced.
inline SymbolWord u_word(const SymbolWord& x, const SymbolWord& y, int m) {
  if (m < 1) throw PreconditionError("u-word requires m >= 1");
  SymbolWord out;
  for (int i = 1; i <= m; ++i) {
    for (int k = 0; k < i; ++k) out.append(x);
    out.append(y);
  }
  return free_reduce(out);
}

namespace detail {

inline CyclicWord<Symbol> u_relator(const TreeVertex& v, const Symbol& axis, const TreeVertex& rhs, int m) {
  SymbolWord w = u_word(SymbolWord{letter(v)}, SymbolWord{letter(axis)}, m);
  w.push_back(letter(rhs, -1));
  return CyclicWord<Symbol>(std::move(w));
}

}  // namespace detail

/// u(v, a) * parent(v)^-1
inline CyclicWord<Symbol> relator_a(const TreeVertex& v, int m) {
  return detail::u_relator(v, Symbol::a(), parent(v), m);
}

/// u(v, b_i) * (v with i appended)^-1
inline CyclicWord<Symbol> relator_b(const TreeVertex& v, std::int64_t i, int m) {
  return detail::u_relator(v, Symbol::b(i), child(v, i), m);
}

/// Relators that can contribute a Dehn step to a word over `letters`.
///
/// For m >= 2 every cyclic subword longer than half of u(v, x) * w^-1
/// contains both v and the axis letter x, so pairing each vertex in the
/// alphabet with each axis letter in it is complete.
inline std::vector<std::pair<TreeVertex, Symbol>> relator_keys_for(const std::set<Symbol>& letters) {
  std::vector<TreeVertex> vertices;
  std::vector<Symbol> axes;
  for (const auto& s : letters) {
    if (s.is_vertex())
      vertices.push_back(s.vertex());
    else if (s.is_a() || s.is_b())
      axes.push_back(s);
  }
  std::vector<std::pair<TreeVertex, Symbol>> keys;
  for (const auto& v : vertices)
    for (const auto& x : axes) keys.emplace_back(v, x);
  return keys;
}

inline std::vector<CyclicWord<Symbol>> relators_for(const std::set<Symbol>& letters, int m) {
  std::vector<CyclicWord<Symbol>> out;
  for (const auto& [v, x] : relator_keys_for(letters))
    out.push_back(x.is_a() ? relator_a(v, m) : relator_b(v, x.b_index(), m));
  return out;
}

/// Letterwise (n, tau) -> (n + 1, tau); a, b_i, t and named letters fixed.
inline SymbolWord iota(const SymbolWord& w, std::int64_t times = 1) {
  std::vector<SymbolLetter> out;
  out.reserve(w.size());
  for (const auto& l : w) {
    if (l.gen.is_vertex())
      out.push_back(letter(Symbol::vertex(l.gen.vertex().level + times, l.gen.vertex().address), l.sign()));
    else
      out.push_back(l);
  }
  return SymbolWord(std::move(out));
}

/// Letterwise inverse of iota; every vertex letter must have level >= times.
inline SymbolWord iota_inverse(const SymbolWord& w, std::int64_t times = 1) {
  std::vector<SymbolLetter> out;
  out.reserve(w.size());
  for (const auto& l : w) {
    if (l.gen.is_vertex()) {
      if (l.gen.vertex().level < times) throw PreconditionError("word is not in the image of iota");
      out.push_back(letter(Symbol::vertex(l.gen.vertex().level - times, l.gen.vertex().address), l.sign()));
    } else {
      out.push_back(l);
    }
  }
  return SymbolWord(std::move(out));
}

/// Letterwise (0, tau) -> (1, <n> ^ tau); every other letter fixed.
inline SymbolWord kappa(const SymbolWord& w, std::int64_t n) {
  std::vector<SymbolLetter> out;
  out.reserve(w.size());
  for (const auto& l : w) {
    if (l.gen.is_vertex() && l.gen.vertex().level == 0) {
      std::vector<std::int64_t> address{n};
      const auto& tau = l.gen.vertex().address;
      address.insert(address.end(), tau.begin(), tau.end());
      out.push_back(letter(Symbol::vertex(1, std::move(address)), l.sign()));
    } else {
      out.push_back(l);
    }
  }
  return SymbolWord(std::move(out));
}

inline bool is_b_word(const SymbolWord& w) {
  return std::all_of(w.begin(), w.end(), [](const SymbolLetter& l) { return l.gen.is_b(); });
}

/// b_i -> b_{i + delta} on a word over B.
inline SymbolWord shift_b(const SymbolWord& w, std::int64_t delta) {
  std::vector<SymbolLetter> out;
  out.reserve(w.size());
  for (const auto& l : w) out.push_back(letter(Symbol::b(l.gen.b_index() + delta), l.sign()));
  return SymbolWord(std::move(out));
}

/// The generators of H = iota(G): (1, <>), a, b_0, t.
inline std::vector<Symbol> h_generators() { return {Symbol::vertex(1), Symbol::a(), Symbol::b(0), Symbol::t()}; }

/// The generators of G: (0, <>), a, b_0, t.
inline std::vector<Symbol> g_generators() { return {Symbol::vertex(0), Symbol::a(), Symbol::b(0), Symbol::t()}; }

struct RewriteStep {
  enum class Rule { pinch_up, pinch_down, dehn };
  Rule rule;
  std::size_t start;
  std::size_t removed;
  std::size_t inserted;
};

inline std::string to_string(const RewriteStep& s) {
  const char* name = s.rule == RewriteStep::Rule::pinch_up     ? "pinch t.t^-1"
                     : s.rule == RewriteStep::Rule::pinch_down ? "pinch t^-1.t"
                                                               : "dehn";
  return std::string(name) + " at " + std::to_string(s.start) + ": " + std::to_string(s.removed) + " -> " +
         std::to_string(s.inserted);
}

struct Reduction {
  SymbolWord terminal;
  std::vector<RewriteStep> trace;
};

/// The HNN extension G of the small-cancellation group K by t b_i t^-1 = b_{i+1}.
///
/// Copies share state (relator caches and the small-cancellation check), so
/// passing a PaperGroup by value is cheap.
class PaperGroup {
 public:
  explicit PaperGroup(int cap = kDefaultCap) : state_(std::make_shared<State>(cap)) {
    if (cap < 2) throw PreconditionError("exponent cap must be at least 2");
  }

  int cap() const { return state_->cap; }
  std::size_t relator_length() const { return scottgroup::relator_length(state_->cap); }

  /// K as a presentation whose relators_for enumerates u-relators.
  const Presentation<Symbol>& base_presentation() const {
    ensure_small_cancellation();
    return state_->presentation;
  }

  /// C'(1/6) check of the cap on a letter family exhibiting every way two
  /// relators can overlap: shared base vertex with a/b and b/b' axes, and
  /// parent/child links through both axes. Thrown as PreconditionError.
  void ensure_small_cancellation() const {
    std::call_once(state_->checked, [this] {
      std::set<Symbol> family{Symbol::vertex(0), Symbol::vertex(1), Symbol::vertex(0, {0}),
                              Symbol::a(),       Symbol::b(0),      Symbol::b(1)};
      Presentation<Symbol> p = state_->presentation;
      p.lambda_claim.reset();
      if (!is_c_prime(p, Rational(1, 6), family))
        throw PreconditionError("exponent cap " + std::to_string(state_->cap) +
                                " does not give a C'(1/6) presentation (need cap >= " +
                                std::to_string(kMinimumCap) + ")");
      state_->presentation.lambda_claim = Rational(1, 6);
    });
  }

  /// Runs the three rewrite rules to a terminal word: pinches t v t^-1 and
  /// t^-1 v t with v over B (shifting indices up and down respectively), and
  /// Dehn steps against u-relators.
  Reduction reduce(const SymbolWord& input, bool record_trace = false) const {
    const auto& k = base_presentation();
    Reduction out;
    SymbolWord w = free_reduce(input);
    while (true) {
      if (auto p = find_b_pinch(w)) {
        const auto& [start, end, sign] = *p;
        SymbolWord next = w.subword(0, start);
        next.append(shift_b(w.subword(start + 1, end - start - 2), sign));
        next.append(w.subword(end, w.size() - end));
        if (record_trace)
          out.trace.push_back({sign > 0 ? RewriteStep::Rule::pinch_up : RewriteStep::Rule::pinch_down, start,
                               end - start, end - start - 2});
        w = free_reduce(next);
        continue;
      }
      if (auto m = greendlinger_find(w, k)) {
        if (record_trace) out.trace.push_back({RewriteStep::Rule::dehn, m->start, m->v.size(), m->complement.size()});
        w = apply_dehn_step(w, *m);
        continue;
      }
      break;
    }
    out.terminal = std::move(w);
    return out;
  }

  bool is_trivial(const SymbolWord& w) const { return reduce(w).terminal.empty(); }

  bool equal(const SymbolWord& x, const SymbolWord& y) const { return is_trivial(x * invert(y)); }

  /// F(B) membership of a stable-letter-free word: Dehn-reduce and check
  /// that only b letters remain.
  std::optional<SymbolWord> in_fb(const SymbolWord& w) const {
    for (const auto& l : w)
      if (l.gen.is_t()) throw PreconditionError("F(B) membership is defined for words without t");
    SymbolWord r = dehn_reduce(w, base_presentation());
    if (!is_b_word(r)) return std::nullopt;
    return r;
  }

  /// Oracles presenting G as an HNN extension of K with H = K = F(B).
  HnnData<Symbol> hnn_data() const {
    const PaperGroup self = *this;
    HnnData<Symbol> d;
    d.stable = Symbol::t();
    d.base_word_problem = [self](const SymbolWord& w) { return dehn_reduce(w, self.base_presentation()).empty(); };
    d.dom_membership = [self](const SymbolWord& w) {
      auto r = self.in_fb(w);
      return r ? MembershipAnswer<Symbol>::member(shift_b(*r, 1)) : MembershipAnswer<Symbol>::nonmember();
    };
    d.codom_membership = [self](const SymbolWord& w) {
      auto r = self.in_fb(w);
      return r ? MembershipAnswer<Symbol>::member(shift_b(*r, -1)) : MembershipAnswer<Symbol>::nonmember();
    };
    return d;
  }

  /// An index n such that kappa(s, n) stays nontrivial for every s in S.
  /// Starts from one more than the largest length, b subscript, address
  /// entry, or address length in S, and doubles until verified.
  std::int64_t choose_retraction_index(std::span<const SymbolWord> nontrivial) const {
    std::int64_t bound = 0;
    for (const auto& s : nontrivial) {
      if (is_trivial(s)) throw PreconditionError("retraction set contains a trivial word: " + to_string(s));
      bound = std::max<std::int64_t>(bound, static_cast<std::int64_t>(s.size()));
      for (const auto& l : s) {
        if (l.gen.is_b()) bound = std::max(bound, std::abs(l.gen.b_index()));
        if (l.gen.is_vertex()) {
          const auto& addr = l.gen.vertex().address;
          bound = std::max<std::int64_t>(bound, static_cast<std::int64_t>(addr.size()));
          for (auto x : addr) bound = std::max(bound, std::abs(x));
        }
      }
    }
    std::int64_t n = bound + 1;
    for (int attempt = 0; attempt < 32; ++attempt, n *= 2) {
      const bool ok = std::all_of(nontrivial.begin(), nontrivial.end(),
                                  [&](const SymbolWord& s) { return !is_trivial(kappa(s, n)); });
      if (ok) return n;
    }
    throw InvariantViolation("no retraction index found");
  }

 private:
  struct State {
    explicit State(int m) : cap(m) {
      presentation.min_relator_length = scottgroup::relator_length(m);
      presentation.relators_for = [this](const std::set<Symbol>& letters) {
        std::vector<CyclicWord<Symbol>> out;
        for (auto& key : relator_keys_for(letters)) out.push_back(cached_relator(key));
        return out;
      };
    }

    CyclicWord<Symbol> cached_relator(const std::pair<TreeVertex, Symbol>& key) {
      std::lock_guard lock(mu);
      auto it = relators.find(key);
      if (it == relators.end()) {
        auto r = key.second.is_a() ? relator_a(key.first, cap) : relator_b(key.first, key.second.b_index(), cap);
        it = relators.emplace(key, std::move(r)).first;
      }
      return it->second;
    }

    int cap;
    Presentation<Symbol> presentation;
    std::once_flag checked;
    std::mutex mu;
    std::map<std::pair<TreeVertex, Symbol>, CyclicWord<Symbol>> relators;
  };

  struct BPinch {
    std::size_t start;
    std::size_t end;
    int sign;
  };

  static std::optional<BPinch> find_b_pinch(const SymbolWord& w) {
    std::optional<std::size_t> prev;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!w[i].gen.is_t()) continue;
      if (prev && w[*prev].inverted != w[i].inverted) {
        bool only_b = true;
        for (std::size_t k = *prev + 1; k < i && only_b; ++k) only_b = w[k].gen.is_b();
        if (only_b) return BPinch{*prev, i + 1, w[*prev].sign()};
      }
      prev = i;
    }
    return std::nullopt;
  }

  std::shared_ptr<State> state_;
};

}  // namespace scottgroup

#endif  // SCOTTGROUP_PAPER_GROUP_HPP

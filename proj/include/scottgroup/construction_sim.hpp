#ifndef SCOTTGROUP_CONSTRUCTION_SIM_HPP
#define SCOTTGROUP_CONSTRUCTION_SIM_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scottgroup/errors.hpp"
#include "scottgroup/paper_group.hpp"
#include "scottgroup/symbol.hpp"

namespace scottgroup {

/// An element of the direct limit of A_0 -> A_1 -> ..., each A_n a copy of
/// G and each arrow iota. (k, w) and (k + 1, iota(w)) are the same element.
struct LimitElement {
  std::int64_t level = 0;
  SymbolWord word;

  friend bool operator==(const LimitElement&, const LimitElement&) = default;
};

inline std::string to_string(const LimitElement& x) {
  return "(" + std::to_string(x.level) + ", " + to_string(x.word) + ")";
}

/// The word of x in the coordinates of A_level, level >= x.level.
inline SymbolWord lift(const LimitElement& x, std::int64_t level) {
  if (level < x.level) throw PreconditionError("cannot lift to a lower level");
  return iota(x.word, level - x.level);
}

/// Length-lexicographic enumeration of G over (0, <>), a, b_0, t and their
/// inverses, skipping words equal in G to an earlier one.
class ElementEnumeration {
 public:
  explicit ElementEnumeration(PaperGroup group) : group_(std::move(group)) {
    for (const auto& g : g_generators()) {
      letters_.push_back(letter(g, 1));
      letters_.push_back(letter(g, -1));
    }
    layer_.push_back(SymbolWord{});
  }

  const SymbolWord& at(std::size_t i) {
    while (elements_.size() <= i) advance();
    return elements_[i];
  }

 private:
  void advance() {
    while (true) {
      if (cursor_ == layer_.size()) {
        std::vector<SymbolWord> next;
        for (const auto& w : layer_)
          for (const auto& l : letters_) {
            if (!w.empty() && w.back().cancels(l)) continue;
            SymbolWord x = w;
            x.push_back(l);
            next.push_back(std::move(x));
          }
        layer_ = std::move(next);
        cursor_ = 0;
      }
      const SymbolWord& candidate = layer_[cursor_++];
      const bool seen = std::any_of(elements_.begin(), elements_.end(),
                                    [&](const SymbolWord& e) { return group_.equal(candidate, e); });
      if (!seen) {
        elements_.push_back(candidate);
        return;
      }
    }
  }

  PaperGroup group_;
  std::vector<SymbolLetter> letters_;
  std::vector<SymbolWord> layer_;
  std::size_t cursor_ = 0;
  std::vector<SymbolWord> elements_;
};

/// Atomic facts of B in the relational language of groups. Only the true
/// facts are stored; every other tuple over the first `frozen_over` ids is a
/// frozen negative fact. Inequalities between distinct ids are implicit.
struct FrozenFacts {
  std::size_t frozen_over = 0;
  std::set<std::size_t> identity;
  std::set<std::pair<std::size_t, std::size_t>> inverse;
  std::set<std::array<std::size_t, 3>> product;

  std::size_t count() const {
    const std::size_t d = frozen_over;
    return d + d * d + d * d * d + d * (d - 1) / 2;
  }

  friend bool operator==(const FrozenFacts&, const FrozenFacts&) = default;
};

enum class StageAction { start, grow, new_level, collapse, idle };

inline std::string to_string(StageAction a) {
  switch (a) {
    case StageAction::start: return "start";
    case StageAction::grow: return "grow";
    case StageAction::new_level: return "new-level";
    case StageAction::collapse: return "collapse";
    case StageAction::idle: return "idle";
  }
  return "?";
}

/// B[s]: domain ids are indices into j.
struct StageState {
  std::size_t stage = 0;
  StageAction action = StageAction::start;
  std::int64_t k = 0;
  std::vector<LimitElement> j;
  std::vector<std::set<std::size_t>> R{1};
  FrozenFacts facts;
  std::optional<std::int64_t> collapse_level;
  std::vector<std::int64_t> retraction_indices;

  std::size_t domain_size() const { return j.size(); }

  /// Highest level whose copy holds the label of some element; -1 if empty.
  std::int64_t live_level() const {
    std::int64_t out = -1;
    for (const auto& x : j) out = std::max(out, x.level);
    return out;
  }
};

/// Stage t -> level e: an element enters W_{f(e)} at stage t.
using Schedule = std::map<std::int64_t, std::int64_t>;

/// Lines `<stage> <level>`; `#` starts a comment. A stage may appear once.
inline Schedule parse_schedule(std::istream& in) {
  Schedule out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    detail::WordScanner scan(line, line_no, 0);
    scan.skip_space();
    if (scan.at_end()) continue;
    const std::int64_t t = scan.integer();
    const std::size_t gap = scan.pos();
    scan.skip_space();
    if (scan.pos() == gap) scan.fail("expected whitespace between stage and level");
    const std::int64_t e = scan.integer();
    scan.skip_space();
    if (!scan.at_end()) scan.fail("trailing characters");
    if (t < 0 || e < 0) throw ParseError("stage and level must be non-negative", line_no, 1);
    if (!out.emplace(t, e).second) throw ParseError("stage " + std::to_string(t) + " listed twice", line_no, 1);
  }
  return out;
}

inline Schedule parse_schedule(const std::string& text) {
  std::istringstream in(text);
  return parse_schedule(in);
}

class Simulator {
 public:
  explicit Simulator(PaperGroup group) : group_(group), enumeration_(std::move(group)) {}

  const PaperGroup& group() const { return group_; }

  /// The i-th element of A_n.
  LimitElement enumerated(std::int64_t n, std::size_t i) { return {n, enumeration_.at(i)}; }

  bool same(const LimitElement& x, const LimitElement& y) const {
    const std::int64_t top = std::max(x.level, y.level);
    return group_.equal(lift(x, top), lift(y, top));
  }

  StageState initial() const { return {}; }

  /// Stage 3t+1: adjoin the first element of each A_n missing from j(R_n),
  /// apply the enumeration-prefix rule, and freeze the new facts.
  StageState grow_step(const StageState& state) {
    StageState next = advance(state, StageAction::grow);
    const std::size_t old_domain = next.j.size();
    for (std::int64_t n = 0; n <= next.k; ++n) {
      auto& rn = next.R[static_cast<std::size_t>(n)];
      LimitElement a;
      for (std::size_t i = 0;; ++i) {
        a = enumerated(n, i);
        const bool present =
            std::any_of(rn.begin(), rn.end(), [&](std::size_t x) { return same(next.j[x], a); });
        if (!present) break;
      }
      rn.insert(adjoin(next, a));
    }
    for (std::int64_t n = 0; n <= next.k; ++n) {
      for (std::size_t i = 0; i < state.stage; ++i) {
        const LimitElement a = enumerated(n, i);
        if (auto x = find(next, a)) {
          relabel(next, *x, a);
          next.R[static_cast<std::size_t>(n)].insert(*x);
        }
      }
    }
    for (std::size_t n = 1; n < next.R.size(); ++n) next.R[n].insert(next.R[n - 1].begin(), next.R[n - 1].end());
    freeze(next, old_domain);
    return next;
  }

  /// Stage 3t+2: a new, empty top level.
  StageState new_level_step(const StageState& state) const {
    StageState next = advance(state, StageAction::new_level);
    next.k += 1;
    next.R.emplace_back();
    return next;
  }

  /// Stage 3t+3 with an enumeration at level e < k: retract every element
  /// outside R_e into A_e one level at a time, re-verify the diagram there,
  /// and let R_e absorb the whole domain.
  StageState collapse_step(const StageState& state, std::int64_t e) {
    if (e < 0 || e >= state.k) throw PreconditionError("collapse level must be below the top level");
    StageState next = advance(state, StageAction::collapse);
    next.collapse_level = e;
    const auto& re = state.R[static_cast<std::size_t>(e)];
    const std::size_t d = next.j.size();
    if (re.size() < d) {
      for (std::int64_t m = next.k; m > e; --m) {
        std::vector<SymbolWord> lifted;
        for (const auto& x : next.j) lifted.push_back(lift(x, m));
        const auto quotients = negative_fact_words(next.facts, lifted);
        const std::int64_t n = group_.choose_retraction_index(quotients);
        next.retraction_indices.push_back(n);
        for (std::size_t x = 0; x < d; ++x) {
          const SymbolWord image = kappa(lifted[x], n);
          if (next.j[x].level == m) {
            next.j[x] = {m - 1, iota_inverse(image)};
          } else if (!(image == lifted[x])) {
            throw InvariantViolation("retraction moved an element of a lower level: " + to_string(next.j[x]));
          }
        }
      }
      if (auto bad = first_failing_fact(next.facts, next.j, e))
        throw InvariantViolation("collapsed diagram fails in A_" + std::to_string(e) + ": " + *bad);
    }
    next.R.resize(static_cast<std::size_t>(e) + 1);
    for (std::size_t x = 0; x < d; ++x) next.R.back().insert(x);
    next.k = e;
    return next;
  }

  StageState step(const StageState& state, const Schedule& schedule) {
    const std::size_t s1 = state.stage + 1;
    switch (s1 % 3) {
      case 1: return grow_step(state);
      case 2: return new_level_step(state);
      default: {
        const auto t = static_cast<std::int64_t>(s1 / 3) - 1;
        auto it = schedule.find(t);
        if (it != schedule.end() && it->second < state.k) return collapse_step(state, it->second);
        return advance(state, StageAction::idle);
      }
    }
  }

  /// Stages 0 .. max_stage.
  std::vector<StageState> run(const Schedule& schedule, std::size_t max_stage) {
    std::vector<StageState> trace{initial()};
    while (trace.back().stage < max_stage) trace.push_back(step(trace.back(), schedule));
    return trace;
  }

  /// The fact among ids that fails for the given images, in A_level
  /// coordinates; checks only tuples touching `changed` when provided.
  std::optional<std::string> first_failing_fact(const FrozenFacts& facts, const std::vector<LimitElement>& j,
                                                std::int64_t level,
                                                const std::vector<bool>* changed = nullptr) const {
    const std::size_t d = std::min(facts.frozen_over, j.size());
    std::vector<SymbolWord> w;
    for (std::size_t x = 0; x < d; ++x) w.push_back(lift(j[x], level));
    auto touched = [&](std::initializer_list<std::size_t> ids) {
      if (!changed) return true;
      return std::any_of(ids.begin(), ids.end(), [&](std::size_t i) { return (*changed)[i]; });
    };
    for (std::size_t x = 0; x < d; ++x) {
      if (!touched({x})) continue;
      if (group_.is_trivial(w[x]) != (facts.identity.count(x) > 0)) return "id(" + std::to_string(x) + ")";
    }
    for (std::size_t x = 0; x < d; ++x)
      for (std::size_t y = 0; y < d; ++y) {
        if (!touched({x, y})) continue;
        if (x < y && group_.equal(w[x], w[y]))
          return std::to_string(x) + " != " + std::to_string(y);
        if (group_.is_trivial(w[x] * w[y]) != (facts.inverse.count({x, y}) > 0))
          return "inv(" + std::to_string(x) + "," + std::to_string(y) + ")";
        for (std::size_t z = 0; z < d; ++z) {
          if (!touched({x, y, z})) continue;
          if (group_.equal(w[x] * w[y], w[z]) != (facts.product.count({x, y, z}) > 0))
            return "mul(" + std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(z) + ")";
        }
      }
    return std::nullopt;
  }

 private:
  static StageState advance(const StageState& state, StageAction action) {
    StageState next = state;
    next.stage = state.stage + 1;
    next.action = action;
    next.collapse_level.reset();
    next.retraction_indices.clear();
    return next;
  }

  std::optional<std::size_t> find(const StageState& state, const LimitElement& a) const {
    for (std::size_t x = 0; x < state.j.size(); ++x)
      if (same(state.j[x], a)) return x;
    return std::nullopt;
  }

  /// Keeps the lowest-level spelling of an element.
  static void relabel(StageState& state, std::size_t x, const LimitElement& a) {
    if (a.level < state.j[x].level) state.j[x] = a;
  }

  std::size_t adjoin(StageState& state, const LimitElement& a) const {
    if (auto x = find(state, a)) {
      relabel(state, *x, a);
      return *x;
    }
    state.j.push_back(a);
    return state.j.size() - 1;
  }

  void freeze(StageState& state, std::size_t old_domain) const {
    const std::size_t d = state.j.size();
    std::int64_t top = 0;
    for (const auto& x : state.j) top = std::max(top, x.level);
    std::vector<SymbolWord> w;
    for (const auto& x : state.j) w.push_back(lift(x, top));
    auto& f = state.facts;
    for (std::size_t x = old_domain; x < d; ++x)
      if (group_.is_trivial(w[x])) f.identity.insert(x);
    for (std::size_t x = 0; x < d; ++x)
      for (std::size_t y = 0; y < d; ++y) {
        if (x < old_domain && y < old_domain) {
          for (std::size_t z = old_domain; z < d; ++z)
            if (group_.equal(w[x] * w[y], w[z])) f.product.insert({x, y, z});
          continue;
        }
        if (group_.is_trivial(w[x] * w[y])) f.inverse.insert({x, y});
        for (std::size_t z = 0; z < d; ++z)
          if (group_.equal(w[x] * w[y], w[z])) f.product.insert({x, y, z});
      }
    f.frozen_over = d;
  }

  /// Words that must stay nontrivial for every negative fact to survive.
  static std::vector<SymbolWord> negative_fact_words(const FrozenFacts& f, const std::vector<SymbolWord>& w) {
    std::set<SymbolWord> out;
    const std::size_t d = f.frozen_over;
    for (std::size_t x = 0; x < d; ++x) {
      if (!f.identity.count(x)) out.insert(free_reduce(w[x]));
      for (std::size_t y = 0; y < d; ++y) {
        if (x < y) out.insert(free_reduce(w[x] * invert(w[y])));
        if (!f.inverse.count({x, y})) out.insert(free_reduce(w[x] * w[y]));
        for (std::size_t z = 0; z < d; ++z)
          if (!f.product.count({x, y, z})) out.insert(free_reduce(w[x] * w[y] * invert(w[z])));
      }
    }
    return {out.begin(), out.end()};
  }

  PaperGroup group_;
  ElementEnumeration enumeration_;
};

// ---------------------------------------------------------------------------
// Invariants

struct InvariantReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

inline std::int64_t highest_nonempty(const StageState& s) {
  for (std::size_t n = s.R.size(); n-- > 0;)
    if (!s.R[n].empty()) return static_cast<std::int64_t>(n);
  return -1;
}

}  // namespace detail

/// Checks every stage of a trace: R is nested up to its highest nonempty
/// level and empty above it, the domain is the union of R, j(R_n) lies in
/// A_n, j is injective, every frozen fact holds of the images, frozen facts
/// are never changed, and R_n and j on R_n only grow between collapses.
///
/// Facts and injectivity are re-checked only for tuples touching an element
/// whose image changed since the previous stage.
inline InvariantReport check_invariants(const Simulator& sim, const std::vector<StageState>& trace) {
  InvariantReport report;
  auto fail = [&](const StageState& s, const std::string& what) {
    report.violations.push_back("stage " + std::to_string(s.stage) + ": " + what);
  };
  const StageState* prev = nullptr;
  for (const auto& s : trace) {
    const std::size_t d = s.j.size();
    if (s.R.size() != static_cast<std::size_t>(s.k) + 1) fail(s, "R has the wrong number of levels");
    const std::int64_t h = detail::highest_nonempty(s);
    for (std::int64_t n = 0; n < h; ++n) {
      const auto& lo = s.R[static_cast<std::size_t>(n)];
      const auto& hi = s.R[static_cast<std::size_t>(n) + 1];
      if (!std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()))
        fail(s, "R_" + std::to_string(n) + " is not contained in R_" + std::to_string(n + 1));
    }
    if (h >= 0 && s.R[static_cast<std::size_t>(h)].size() != d) fail(s, "domain is not the union of R");
    if (h < 0 && d != 0) fail(s, "elements outside every R_n");
    for (std::size_t n = 0; n < s.R.size(); ++n)
      for (auto x : s.R[n]) {
        if (x >= d) fail(s, "R_" + std::to_string(n) + " holds an unknown id");
        else if (s.j[x].level > static_cast<std::int64_t>(n))
          fail(s, "j(" + std::to_string(x) + ") is not in A_" + std::to_string(n));
      }
    if (s.facts.frozen_over != d) fail(s, "facts are not frozen over the whole domain");

    std::vector<bool> changed(d, true);
    if (prev)
      for (std::size_t x = 0; x < std::min(d, prev->j.size()); ++x) changed[x] = !(prev->j[x] == s.j[x]);

    for (std::size_t x = 0; x < d; ++x)
      for (std::size_t y = x + 1; y < d; ++y)
        if ((changed[x] || changed[y]) && sim.same(s.j[x], s.j[y]))
          fail(s, "j identifies " + std::to_string(x) + " and " + std::to_string(y));

    if (std::any_of(changed.begin(), changed.end(), [](bool c) { return c; })) {
      const std::int64_t top = std::max<std::int64_t>(s.live_level(), 0);
      if (auto bad = sim.first_failing_fact(s.facts, s.j, top, &changed)) fail(s, "fact fails: " + *bad);
    }

    if (prev) {
      const std::size_t old = prev->facts.frozen_over;
      auto restrict = [old](const FrozenFacts& f) {
        FrozenFacts r;
        r.frozen_over = old;
        for (auto x : f.identity)
          if (x < old) r.identity.insert(x);
        for (auto p : f.inverse)
          if (p.first < old && p.second < old) r.inverse.insert(p);
        for (auto t : f.product)
          if (t[0] < old && t[1] < old && t[2] < old) r.product.insert(t);
        return r;
      };
      if (d < prev->j.size() || !(restrict(s.facts) == restrict(prev->facts))) fail(s, "frozen facts changed");

      if (s.action != StageAction::collapse) {
        for (std::size_t n = 0; n < std::min(prev->R.size(), s.R.size()); ++n) {
          const auto& before = prev->R[n];
          const auto& after = s.R[n];
          if (!std::includes(after.begin(), after.end(), before.begin(), before.end()))
            fail(s, "R_" + std::to_string(n) + " shrank without a collapse");
          for (auto x : before)
            if (x < d && changed[x] && !sim.same(prev->j[x], s.j[x]))
              fail(s, "j(" + std::to_string(x) + ") moved without a collapse");
        }
      }
    }
    prev = &s;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Diagnosis

struct CollapseReport {
  std::size_t stage;
  std::int64_t level;
  bool domain_equals_r;
};

struct Diagnosis {
  std::vector<std::int64_t> k_sequence;
  std::int64_t liminf_proxy = 0;  // min k over the second half of the trace
  bool levels_strictly_grow = false;
  std::vector<CollapseReport> collapses;
  std::int64_t live_level = -1;
  std::vector<std::int64_t> covering_levels;  // n with R_n = domain at the last stage
  bool domain_escapes_lower_levels = false;   // no R_n with n < live_level holds the domain
};

inline Diagnosis diagnose(const std::vector<StageState>& trace) {
  if (trace.empty()) throw PreconditionError("diagnose requires a nonempty trace");
  Diagnosis out;
  for (const auto& s : trace) out.k_sequence.push_back(s.k);
  out.liminf_proxy = *std::min_element(out.k_sequence.begin() + static_cast<std::ptrdiff_t>(trace.size() / 2),
                                       out.k_sequence.end());

  bool grew = true;
  bool any_new_level = false;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].action == StageAction::new_level) any_new_level = true;
    if (trace[i].k < trace[i - 1].k) grew = false;
  }
  out.levels_strictly_grow = grew && any_new_level;

  for (const auto& s : trace)
    if (s.action == StageAction::collapse)
      out.collapses.push_back(
          {s.stage, *s.collapse_level, s.R[static_cast<std::size_t>(*s.collapse_level)].size() == s.j.size()});

  const StageState& last = trace.back();
  out.live_level = last.live_level();
  for (std::size_t n = 0; n < last.R.size(); ++n)
    if (last.R[n].size() == last.j.size() && !last.j.empty()) out.covering_levels.push_back(static_cast<std::int64_t>(n));
  out.domain_escapes_lower_levels = std::none_of(out.covering_levels.begin(), out.covering_levels.end(),
                                                 [&](std::int64_t n) { return n < out.live_level; });
  return out;
}

inline std::string to_string(const Diagnosis& d) {
  std::ostringstream out;
  out << "k:";
  for (auto k : d.k_sequence) out << ' ' << k;
  out << "\nliminf proxy: " << d.liminf_proxy << "\nlevels strictly grow: " << (d.levels_strictly_grow ? "yes" : "no")
      << "\ncollapses: " << d.collapses.size() << '\n';
  for (const auto& c : d.collapses)
    out << "  stage " << c.stage << " -> level " << c.level << ": domain = R_" << c.level << ' '
        << (c.domain_equals_r ? "yes" : "no") << '\n';
  out << "live level: " << d.live_level << "\nlevels holding the domain:";
  if (d.covering_levels.empty()) out << " none";
  for (auto n : d.covering_levels) out << ' ' << n;
  out << "\nlower levels holding the domain: " << (d.domain_escapes_lower_levels ? "none" : "some") << '\n';
  return out.str();
}

inline nlohmann::ordered_json trace_to_json(const std::vector<StageState>& trace) {
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (const auto& s : trace) {
    nlohmann::ordered_json st;
    st["stage"] = s.stage;
    st["action"] = to_string(s.action);
    st["k"] = s.k;
    st["domain_size"] = s.j.size();
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const auto& rn : s.R) r.push_back(std::vector<std::size_t>(rn.begin(), rn.end()));
    st["R"] = std::move(r);
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (std::size_t x = 0; x < s.j.size(); ++x)
      j.push_back({{"id", x}, {"level", s.j[x].level}, {"word", to_string(s.j[x].word)}});
    st["j"] = std::move(j);
    st["facts"] = s.facts.count();
    if (s.collapse_level) {
      st["collapse_level"] = *s.collapse_level;
      st["retraction_indices"] = s.retraction_indices;
    }
    stages.push_back(std::move(st));
  }
  return {{"stages", std::move(stages)}};
}

}  // namespace scottgroup

#endif  // SCOTTGROUP_CONSTRUCTION_SIM_HPP

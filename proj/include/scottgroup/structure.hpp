#ifndef SCOTTGROUP_STRUCTURE_HPP
#define SCOTTGROUP_STRUCTURE_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scottgroup/errors.hpp"

namespace scottgroup {

/// Row-major table over universe^arity; entry index is sum args[i] * n^(arity-1-i).
struct FunctionTable {
  std::size_t arity = 0;
  std::vector<std::size_t> values;

  friend bool operator==(const FunctionTable&, const FunctionTable&) = default;
};

struct RelationTable {
  std::size_t arity = 0;
  std::vector<char> holds;

  friend bool operator==(const RelationTable&, const RelationTable&) = default;
};

/// Symbol names with arities; constants have arity 0.
struct Signature {
  std::map<std::string, std::size_t> functions;
  std::set<std::string> constants;
  std::map<std::string, std::size_t> relations;

  friend bool operator==(const Signature&, const Signature&) = default;
};

inline std::size_t power(std::size_t base, std::size_t exponent) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exponent; ++i) out *= base;
  return out;
}

/// A finite structure on {0, ..., universe_size - 1}.
struct FiniteStructure {
  std::size_t universe_size = 1;
  std::map<std::string, FunctionTable> functions;
  std::map<std::string, std::size_t> constants;
  std::map<std::string, RelationTable> relations;

  std::size_t index(std::span<const std::size_t> args) const {
    std::size_t i = 0;
    for (auto a : args) i = i * universe_size + a;
    return i;
  }

  std::size_t apply(const FunctionTable& f, std::span<const std::size_t> args) const { return f.values[index(args)]; }
  bool holds(const RelationTable& r, std::span<const std::size_t> args) const { return r.holds[index(args)] != 0; }

  Signature signature() const {
    Signature s;
    for (const auto& [name, f] : functions) s.functions[name] = f.arity;
    for (const auto& [name, c] : constants) s.constants.insert(name);
    for (const auto& [name, r] : relations) s.relations[name] = r.arity;
    return s;
  }

  /// Throws PreconditionError unless every table is total and closed.
  void validate() const {
    if (universe_size == 0) throw PreconditionError("universe must be nonempty");
    for (const auto& [name, f] : functions) {
      if (f.values.size() != power(universe_size, f.arity))
        throw PreconditionError("function " + name + " has a table of the wrong size");
      for (auto v : f.values)
        if (v >= universe_size) throw PreconditionError("function " + name + " leaves the universe");
    }
    for (const auto& [name, c] : constants)
      if (c >= universe_size) throw PreconditionError("constant " + name + " is outside the universe");
    for (const auto& [name, r] : relations)
      if (r.holds.size() != power(universe_size, r.arity))
        throw PreconditionError("relation " + name + " has a table of the wrong size");
  }

  friend bool operator==(const FiniteStructure&, const FiniteStructure&) = default;
};

// ---------------------------------------------------------------------------
// JSON
//
//   {"universe_size": n,
//    "functions": {"f": <nested array>, "g": {"arity": a, "table": [flat]}},
//    "constants": {"c": 0},
//    "relations": {"R": <nested array of 0/1 or bools>}}
//
// A nested array's depth is the arity.

namespace detail {

inline void flatten(const nlohmann::json& j, std::size_t depth, std::size_t& arity, std::vector<nlohmann::json>& out) {
  if (!j.is_array()) {
    if (arity == SIZE_MAX) arity = depth;
    if (depth != arity) throw PreconditionError("table nesting is ragged");
    out.push_back(j);
    return;
  }
  for (const auto& x : j) flatten(x, depth + 1, arity, out);
  if (j.empty() && arity == SIZE_MAX) arity = depth + 1;
}

inline std::pair<std::size_t, std::vector<nlohmann::json>> read_table(const nlohmann::json& j) {
  std::size_t arity = SIZE_MAX;
  std::vector<nlohmann::json> flat;
  if (j.is_object()) {
    arity = j.at("arity").get<std::size_t>();
    for (const auto& x : j.at("table")) flat.push_back(x);
    return {arity, std::move(flat)};
  }
  if (!j.is_array()) {
    flat.push_back(j);
    return {0, std::move(flat)};
  }
  flatten(j, 0, arity, flat);
  return {arity, std::move(flat)};
}

}  // namespace detail

inline FiniteStructure structure_from_json(const nlohmann::json& j) {
  FiniteStructure s;
  try {
    s.universe_size = j.at("universe_size").get<std::size_t>();
    if (j.contains("functions"))
      for (const auto& [name, t] : j.at("functions").items()) {
        auto [arity, flat] = detail::read_table(t);
        FunctionTable f{arity, {}};
        for (const auto& v : flat) f.values.push_back(v.get<std::size_t>());
        s.functions.emplace(name, std::move(f));
      }
    if (j.contains("constants"))
      for (const auto& [name, v] : j.at("constants").items()) s.constants.emplace(name, v.get<std::size_t>());
    if (j.contains("relations"))
      for (const auto& [name, t] : j.at("relations").items()) {
        auto [arity, flat] = detail::read_table(t);
        RelationTable r{arity, {}};
        for (const auto& v : flat) r.holds.push_back(v.is_boolean() ? v.get<bool>() : v.get<int>() != 0);
        s.relations.emplace(name, std::move(r));
      }
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("malformed structure: ") + e.what());
  }
  s.validate();
  return s;
}

inline FiniteStructure parse_structure(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), 0, e.byte);
  }
  return structure_from_json(j);
}

inline nlohmann::ordered_json structure_to_json(const FiniteStructure& s) {
  nlohmann::ordered_json j;
  j["universe_size"] = s.universe_size;
  nlohmann::ordered_json fs = nlohmann::ordered_json::object();
  for (const auto& [name, f] : s.functions) fs[name] = {{"arity", f.arity}, {"table", f.values}};
  j["functions"] = std::move(fs);
  nlohmann::ordered_json cs = nlohmann::ordered_json::object();
  for (const auto& [name, c] : s.constants) cs[name] = c;
  j["constants"] = std::move(cs);
  nlohmann::ordered_json rs = nlohmann::ordered_json::object();
  for (const auto& [name, r] : s.relations) {
    std::vector<int> bits(r.holds.begin(), r.holds.end());
    rs[name] = {{"arity", r.arity}, {"table", bits}};
  }
  j["relations"] = std::move(rs);
  return j;
}

// ---------------------------------------------------------------------------

/// Calls visit(tuple) for every tuple in {0..n-1}^arity in lexicographic order;
/// stops early when visit returns true. Returns whether it stopped early.
template <class Visit>
bool for_each_tuple(std::size_t n, std::size_t arity, Visit&& visit) {
  std::vector<std::size_t> t(arity, 0);
  if (arity > 0 && n == 0) return false;
  while (true) {
    if (visit(std::span<const std::size_t>(t))) return true;
    std::size_t i = arity;
    while (i > 0 && ++t[i - 1] == n) t[--i] = 0;
    if (i == 0) return false;
  }
}

/// Least subset containing the tuple and the constants, closed under every
/// function. Sorted.
inline std::vector<std::size_t> generated_closure(const FiniteStructure& a, std::span<const std::size_t> tuple) {
  std::vector<char> in(a.universe_size, 0);
  std::vector<std::size_t> members;
  auto add = [&](std::size_t x) {
    if (x >= a.universe_size) throw PreconditionError("tuple element outside the universe");
    if (!in[x]) {
      in[x] = 1;
      members.push_back(x);
    }
  };
  for (auto x : tuple) add(x);
  for (const auto& [name, c] : a.constants) add(c);
  bool grew = true;
  while (grew) {
    grew = false;
    const std::vector<std::size_t> snapshot = members;
    for (const auto& [name, f] : a.functions) {
      std::vector<std::size_t> args(f.arity);
      for_each_tuple(snapshot.size(), f.arity, [&](std::span<const std::size_t> idx) {
        for (std::size_t i = 0; i < idx.size(); ++i) args[i] = snapshot[idx[i]];
        const std::size_t r = a.apply(f, args);
        if (!in[r]) {
          add(r);
          grew = true;
        }
        return false;
      });
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

inline bool generates(const FiniteStructure& a, std::span<const std::size_t> tuple) {
  return generated_closure(a, tuple).size() == a.universe_size;
}

/// Shortest generating tuple, lexicographically least among those.
inline std::vector<std::size_t> minimal_generators(const FiniteStructure& a) {
  for (std::size_t k = 0; k <= a.universe_size; ++k) {
    std::vector<std::size_t> found;
    if (for_each_tuple(a.universe_size, k, [&](std::span<const std::size_t> t) {
          if (!generates(a, t)) return false;
          found.assign(t.begin(), t.end());
          return true;
        }))
      return found;
  }
  throw InvariantViolation("the universe does not generate itself");
}

inline bool same_signature(const FiniteStructure& a, const FiniteStructure& m) {
  auto same_keys = [](const auto& x, const auto& y, auto&& eq) {
    return x.size() == y.size() && std::equal(x.begin(), x.end(), y.begin(), [&](const auto& p, const auto& q) {
             return p.first == q.first && eq(p.second, q.second);
           });
  };
  auto arity = [](const auto& t, const auto& u) { return t.arity == u.arity; };
  return same_keys(a.functions, m.functions, arity) && same_keys(a.relations, m.relations, arity) &&
         same_keys(a.constants, m.constants, [](auto, auto) { return true; });
}

inline constexpr std::size_t kDefaultIsoBound = 6;

/// Whether `perm` (A -> M) carries every table of A onto M's.
inline bool is_isomorphism(const FiniteStructure& a, const FiniteStructure& m, std::span<const std::size_t> perm) {
  for (const auto& [name, c] : a.constants)
    if (perm[c] != m.constants.at(name)) return false;
  for (const auto& [name, f] : a.functions) {
    const FunctionTable& g = m.functions.at(name);
    std::vector<std::size_t> image(f.arity);
    if (for_each_tuple(a.universe_size, f.arity, [&](std::span<const std::size_t> t) {
          for (std::size_t i = 0; i < t.size(); ++i) image[i] = perm[t[i]];
          return perm[a.apply(f, t)] != m.apply(g, image);
        }))
      return false;
  }
  for (const auto& [name, r] : a.relations) {
    const RelationTable& q = m.relations.at(name);
    std::vector<std::size_t> image(r.arity);
    if (for_each_tuple(a.universe_size, r.arity, [&](std::span<const std::size_t> t) {
          for (std::size_t i = 0; i < t.size(); ++i) image[i] = perm[t[i]];
          return a.holds(r, t) != m.holds(q, image);
        }))
      return false;
  }
  return true;
}

/// Exhaustive search over bijections.
inline bool brute_force_iso(const FiniteStructure& a, const FiniteStructure& m, std::size_t bound = kDefaultIsoBound) {
  if (a.universe_size > bound || m.universe_size > bound)
    throw PreconditionError("isomorphism search is limited to universes of size " + std::to_string(bound));
  if (!same_signature(a, m)) throw SignatureMismatch("structures have different signatures");
  if (a.universe_size != m.universe_size) return false;
  std::vector<std::size_t> perm(a.universe_size);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    if (is_isomorphism(a, m, perm)) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// ---------------------------------------------------------------------------
// Catalog

inline FiniteStructure magma(std::size_t n, std::vector<std::size_t> table, const std::string& name = "f") {
  FiniteStructure s;
  s.universe_size = n;
  s.functions[name] = FunctionTable{2, std::move(table)};
  s.validate();
  return s;
}

/// Z/k under addition.
inline FiniteStructure cyclic_group(std::size_t k) {
  std::vector<std::size_t> t;
  for (std::size_t x = 0; x < k; ++x)
    for (std::size_t y = 0; y < k; ++y) t.push_back((x + y) % k);
  return magma(k, std::move(t));
}

/// Z/2 x Z/2 under addition, elements encoded as two-bit masks.
inline FiniteStructure klein_four() {
  std::vector<std::size_t> t;
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 4; ++y) t.push_back(x ^ y);
  return magma(4, std::move(t));
}

/// One representative per isomorphism class of binary operations on an
/// n-element set: the lexicographically least relabelled table.
inline std::vector<FiniteStructure> magmas_up_to_iso(std::size_t n) {
  const std::size_t cells = n * n;
  std::vector<std::vector<std::size_t>> perms;
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));

  std::vector<FiniteStructure> out;
  std::vector<std::size_t> table(cells, 0), relabelled(cells);
  for_each_tuple(n, cells, [&](std::span<const std::size_t> t) {
    table.assign(t.begin(), t.end());
    bool least = true;
    for (const auto& q : perms) {
      // relabelled[q[x], q[y]] = q[table[x, y]]
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) relabelled[q[x] * n + q[y]] = q[table[x * n + y]];
      if (relabelled < table) {
        least = false;
        break;
      }
    }
    if (least) out.push_back(magma(n, table));
    return false;
  });
  return out;
}

struct CatalogEntry {
  std::string name;
  FiniteStructure structure;
};

/// All magmas of size 1..max_magma_size up to isomorphism, then Z/k for
/// k <= max_cyclic and the Klein four-group.
inline std::vector<CatalogEntry> structure_catalog(std::size_t max_magma_size = 3, std::size_t max_cyclic = 6) {
  std::vector<CatalogEntry> out;
  for (std::size_t n = 1; n <= max_magma_size; ++n) {
    auto ms = magmas_up_to_iso(n);
    for (std::size_t i = 0; i < ms.size(); ++i)
      out.push_back({"magma" + std::to_string(n) + "-" + std::to_string(i), std::move(ms[i])});
  }
  for (std::size_t k = 1; k <= max_cyclic; ++k) out.push_back({"Z/" + std::to_string(k), cyclic_group(k)});
  out.push_back({"Klein", klein_four()});
  return out;
}

}  // namespace scottgroup

#endif  // SCOTTGROUP_STRUCTURE_HPP

#pragma once

// Open sets and covers (cylinder unions / open arcs), the exact atom carrier of
// translated covers, refinement joins, minimal subcovers, topological sequence
// entropy profiles and hitting-time sets N(U, V).

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <tuple>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "seqent/enumeration.hpp"
#include "seqent/errors.hpp"
#include "seqent/group.hpp"
#include "seqent/partition.hpp"
#include "seqent/set_cover.hpp"
#include "seqent/systems.hpp"

namespace seqent {

struct CylinderUnion {
  std::vector<CylinderPattern> cylinders;
};

/// Union of open arcs (start, start + length).
struct ArcUnion {
  std::vector<Arc> arcs;
};

using OpenSet = std::variant<CylinderUnion, ArcUnion>;

struct Cover {
  std::vector<OpenSet> elements;

  bool standard() const { return elements.size() == 2; }
};

struct PlacedOpenSet {
  GroupElement g;
  std::reference_wrapper<const OpenSet> set;
};

struct PlacedCover {
  GroupElement g;
  std::reference_wrapper<const Cover> cover;
};

inline OpenSet cylinder_set(GroupElement at, std::uint32_t letter) {
  return CylinderUnion{{CylinderPattern::single(std::move(at), letter)}};
}

inline OpenSet arc_set(double start, double length) { return ArcUnion{{{start, length}}}; }

/// {[a at origin] : a in alphabet}, the cover by the cylinders at the origin.
inline Cover origin_cylinder_cover(const SymbolicSystem& sys) {
  Cover c;
  for (std::uint32_t a = 0; a < sys.alphabet_size(); ++a) c.elements.push_back(cylinder_set(GroupElement::zero(sys.dim()), a));
  return c;
}

inline void validate_open_set(const System& sys, const OpenSet& set) {
  if (const auto* cu = std::get_if<CylinderUnion>(&set)) {
    const auto* ss = std::get_if<SymbolicSystem>(&sys);
    if (!ss) throw ConfigError("cylinder set used with a rotation system");
    for (const auto& c : cu->cylinders) validate_pattern(*ss, c);
  } else {
    const auto* rs = std::get_if<RotationSystem>(&sys);
    if (!rs) throw ConfigError("arc set used with a symbolic system");
    for (const auto& a : std::get<ArcUnion>(set).arcs) {
      if (!(a.length > 0.0 && a.length <= 1.0)) throw ConfigError("arc length must be in (0,1]");
      if (!rs->on_grid(a.start) || !rs->on_grid(a.start + a.length))
        throw ConfigError("arc endpoint is off the rational grid of the rotation");
    }
  }
}

namespace detail {

// Translated cylinder as (domain position, letter) constraints.
using Constraint = std::vector<std::pair<std::size_t, std::uint32_t>>;

inline std::vector<Constraint> place_cylinders(const SymbolicSystem& sys, const Domain& dom, const GroupElement& g,
                                               const CylinderUnion& cu) {
  std::vector<Constraint> out;
  const auto m = sys.motion(g);
  for (const auto& c : cu.cylinders) {
    auto& k = out.emplace_back();
    for (std::size_t i = 0; i < c.domain.size(); ++i) k.emplace_back(dom.index_of(c.domain[i] + m), c.letters[i]);
  }
  return out;
}

inline bool matches_any(const std::vector<Constraint>& cs, const std::vector<std::uint32_t>& x) {
  return std::any_of(cs.begin(), cs.end(), [&](const Constraint& c) {
    return std::all_of(c.begin(), c.end(), [&](const auto& pl) { return x[pl.first] == pl.second; });
  });
}

inline void collect_coords(const SymbolicSystem& sys, const GroupElement& g, const CylinderUnion& cu, FiniteGroupSet& out) {
  const auto m = sys.motion(g);
  for (const auto& c : cu.cylinders)
    for (const auto& t : c.domain) out.push_back(t + m);
}

inline bool in_open_arcs(const ArcUnion& au, double y) {
  return std::any_of(au.arcs.begin(), au.arcs.end(), [&](const Arc& a) {
    const double t = frac(y - a.start);
    return t > 0.0 && t < a.length;
  });
}

// Linear intervals in grid units (exact) or in [0,1] (floating).
struct CircleIntervals {
  std::vector<std::pair<long double, long double>> parts;
};

inline long double circle_scale(const RotationSystem& sys) { return sys.exact() ? sys.grid() : 1.0L; }
inline long double circle_eps(const RotationSystem& sys) { return sys.exact() ? 0.5L : RotationSystem::kSnap; }

inline CircleIntervals to_intervals(const RotationSystem& sys, const GroupElement& g, const ArcUnion& au) {
  CircleIntervals out;
  const long double scale = circle_scale(sys);
  for (const auto& a : au.arcs) {
    const auto r = rotate_arc(sys, g, a);
    long double lo = sys.exact() ? static_cast<long double>(sys.to_ticks(r.start)) : static_cast<long double>(r.start);
    long double len = sys.exact() ? std::nearbyint(static_cast<long double>(a.length) * scale) : a.length;
    long double hi = lo + len;
    if (hi <= scale) {
      out.parts.emplace_back(lo, hi);
    } else {
      out.parts.emplace_back(lo, scale);
      out.parts.emplace_back(0.0L, hi - scale);
    }
  }
  std::sort(out.parts.begin(), out.parts.end());
  std::vector<std::pair<long double, long double>> merged;
  for (const auto& p : out.parts) {
    if (!merged.empty() && p.first < merged.back().second) merged.back().second = std::max(merged.back().second, p.second);
    else merged.push_back(p);
  }
  out.parts = std::move(merged);
  return out;
}

inline CircleIntervals intersect(const CircleIntervals& a, const CircleIntervals& b, long double eps) {
  CircleIntervals out;
  std::size_t i = 0, j = 0;
  while (i < a.parts.size() && j < b.parts.size()) {
    const auto lo = std::max(a.parts[i].first, b.parts[j].first);
    const auto hi = std::min(a.parts[i].second, b.parts[j].second);
    if (hi - lo > eps) out.parts.emplace_back(lo, hi);
    (a.parts[i].second < b.parts[j].second) ? ++i : ++j;
  }
  return out;
}

inline long double total_length(const CircleIntervals& c) {
  long double s = 0.0L;
  for (const auto& p : c.parts) s += p.second - p.first;
  return s;
}

inline CircleIntervals intersect_all(const RotationSystem& sys, std::span<const PlacedOpenSet> sets) {
  CircleIntervals cur{{{0.0L, circle_scale(sys)}}};
  for (const auto& p : sets) {
    cur = intersect(cur, to_intervals(sys, p.g, std::get<ArcUnion>(p.set.get())), circle_eps(sys));
    if (cur.parts.empty()) break;
  }
  return cur;
}

// Backtracking over one cylinder per set with a consistent letter assignment.
inline bool consistent_choice(const SymbolicSystem& sys, std::span<const PlacedOpenSet> sets) {
  std::vector<std::vector<std::vector<std::pair<GroupElement, std::uint32_t>>>> options;
  for (const auto& p : sets) {
    const auto& cu = std::get<CylinderUnion>(p.set.get());
    const auto m = sys.motion(p.g);
    auto& opts = options.emplace_back();
    for (const auto& c : cu.cylinders) {
      auto& o = opts.emplace_back();
      for (std::size_t i = 0; i < c.domain.size(); ++i) o.emplace_back(c.domain[i] + m, c.letters[i]);
    }
    if (opts.empty()) return false;
  }
  std::vector<std::size_t> order(options.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return options[a].size() < options[b].size(); });
  std::map<GroupElement, std::uint32_t> assigned;
  std::function<bool(std::size_t)> rec = [&](std::size_t depth) -> bool {
    if (depth == order.size()) return true;
    for (const auto& opt : options[order[depth]]) {
      std::vector<GroupElement> added;
      bool ok = true;
      for (const auto& [coord, letter] : opt) {
        auto [it, fresh] = assigned.emplace(coord, letter);
        if (fresh) added.push_back(coord);
        else if (it->second != letter) {
          ok = false;
          break;
        }
      }
      if (ok && rec(depth + 1)) return true;
      for (const auto& a : added) assigned.erase(a);
    }
    return false;
  };
  return rec(0);
}

}  // namespace detail

/// Whether ⋂ g^{-1} U_g is nonempty (exact: cylinder consistency or arc overlap).
inline bool intersection_nonempty(const System& sys, std::span<const PlacedOpenSet> sets) {
  if (sets.empty()) return true;
  if (const auto* ss = std::get_if<SymbolicSystem>(&sys)) return detail::consistent_choice(*ss, sets);
  return !detail::intersect_all(std::get<RotationSystem>(sys), sets).parts.empty();
}

/// μ(⋂ g^{-1} U_g), exact on the configuration or arc carrier.
inline double intersection_measure(const System& sys, std::span<const PlacedOpenSet> sets, const Budget& budget = {}) {
  if (const auto* rs = std::get_if<RotationSystem>(&sys)) {
    return static_cast<double>(detail::total_length(detail::intersect_all(*rs, sets)) / detail::circle_scale(*rs));
  }
  const auto& ss = std::get<SymbolicSystem>(sys);
  FiniteGroupSet coords;
  for (const auto& p : sets) detail::collect_coords(ss, p.g, std::get<CylinderUnion>(p.set.get()), coords);
  const Domain dom(std::move(coords));
  std::vector<std::vector<detail::Constraint>> placed;
  for (const auto& p : sets) placed.push_back(detail::place_cylinders(ss, dom, p.g, std::get<CylinderUnion>(p.set.get())));
  MassAccumulator acc;
  for_each_configuration(ss, dom.size(), budget, [&](const std::vector<std::uint32_t>& x, const ConfigurationWeight& w) {
    if (std::all_of(placed.begin(), placed.end(), [&](const auto& cs) { return detail::matches_any(cs, x); })) acc.add(w);
  });
  return acc.value(exact_denominator(ss, dom.size()));
}

/// Atom carrier of the translated covers; sets are listed cover by cover in element order.
inline AtomIncidence cover_atoms(const System& sys, std::span<const PlacedCover> covers, const Budget& budget = {}) {
  AtomIncidence inc;
  for (const auto& pc : covers)
    for (const auto& e : pc.cover.get().elements) validate_open_set(sys, e);
  if (const auto* ss = std::get_if<SymbolicSystem>(&sys)) {
    FiniteGroupSet coords;
    for (const auto& pc : covers)
      for (const auto& e : pc.cover.get().elements) detail::collect_coords(*ss, pc.g, std::get<CylinderUnion>(e), coords);
    const Domain dom(std::move(coords));
    inc.atom_count = state_count(*ss, dom.size(), budget);
    std::vector<std::vector<detail::Constraint>> placed;
    for (const auto& pc : covers)
      for (const auto& e : pc.cover.get().elements)
        placed.push_back(detail::place_cylinders(*ss, dom, pc.g, std::get<CylinderUnion>(e)));
    inc.sets.assign(placed.size(), Bitset(inc.atom_count));
    std::size_t atom = 0;
    for_each_configuration(*ss, dom.size(), budget, [&](const std::vector<std::uint32_t>& x, const ConfigurationWeight&) {
      for (std::size_t k = 0; k < placed.size(); ++k)
        if (detail::matches_any(placed[k], x)) inc.sets[k].set(atom);
      ++atom;
    });
    return inc;
  }
  const auto& rs = std::get<RotationSystem>(sys);
  std::vector<double> pts;
  std::vector<double> offsets;
  for (const auto& pc : covers) {
    const double off = rs.offset(pc.g);
    offsets.push_back(off);
    for (const auto& e : pc.cover.get().elements)
      for (const auto& a : std::get<ArcUnion>(e).arcs) {
        pts.push_back(a.start - off);
        pts.push_back(a.start + a.length - off);
      }
  }
  const auto cuts = detail::merge_breakpoints(rs, std::move(pts));
  std::vector<double> mids;
  detail::for_each_circle_atom(rs, cuts, [&](double mid, long double, std::int64_t) { mids.push_back(mid); });
  inc.atom_count = mids.size();
  for (std::size_t c = 0; c < covers.size(); ++c)
    for (const auto& e : covers[c].cover.get().elements) {
      auto& row = inc.sets.emplace_back(inc.atom_count);
      for (std::size_t a = 0; a < mids.size(); ++a)
        if (detail::in_open_arcs(std::get<ArcUnion>(e), detail::frac(mids[a] + offsets[c]))) row.set(a);
    }
  return inc;
}

inline AtomIncidence cover_atoms(const System& sys, const Cover& cover, const FiniteGroupSet& gens,
                                 const Budget& budget = {}) {
  std::vector<PlacedCover> placed;
  for (const auto& g : gens) placed.push_back({g, std::cref(cover)});
  return cover_atoms(sys, placed, budget);
}

struct CoverFlags {
  bool covers = false;
  bool standard = false;
  bool admissible = false;
  bool non_trivial = false;
};

/// Cover properties checked on the atom carrier of the untranslated cover.
inline CoverFlags analyze_cover(const System& sys, const Cover& cover, const Budget& budget = {}) {
  const auto inc = cover_atoms(sys, cover, {GroupElement::zero(dim(sys))}, budget);
  CoverFlags f;
  f.covers = inc.covers_all();
  f.standard = cover.standard();
  f.admissible = true;
  f.non_trivial = true;
  for (std::size_t i = 0; i < inc.sets.size(); ++i) {
    Bitset others(inc.atom_count);
    for (std::size_t j = 0; j < inc.sets.size(); ++j)
      if (j != i) others |= inc.sets[j];
    if ((inc.sets[i] - others).none()) f.admissible = false;
    if (inc.sets[i].all()) f.non_trivial = false;
  }
  return f;
}

/// Maximal elements of the join ⋁_k {sets of group k}, built incrementally.
/// Elements contained in another element are dropped at every stage; this never
/// changes the minimal subcover size.
inline std::vector<Bitset> join_elements(const AtomIncidence& inc, const std::vector<std::vector<std::size_t>>& groups,
                                         const Budget& budget = {}) {
  std::vector<Bitset> cur;
  cur.emplace_back(inc.atom_count).set();
  std::vector<std::vector<Bitset>> seen;
  for (const auto& grp : groups) {
    std::vector<Bitset> members;
    for (auto i : grp) members.push_back(inc.sets.at(i));
    std::sort(members.begin(), members.end());
    if (std::find(seen.begin(), seen.end(), members) != seen.end()) continue;
    seen.push_back(members);

    std::vector<Bitset> next;
    for (const auto& e : cur)
      for (const auto& m : members) {
        auto x = e & m;
        if (x.any()) next.push_back(std::move(x));
      }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    std::stable_sort(next.begin(), next.end(), [](const Bitset& a, const Bitset& b) { return a.count() > b.count(); });
    std::vector<Bitset> maximal;
    for (auto& x : next) {
      if (std::none_of(maximal.begin(), maximal.end(), [&](const Bitset& y) { return x.is_subset_of(y); }))
        maximal.push_back(std::move(x));
      if (static_cast<std::uint64_t>(maximal.size()) * inc.atom_count > budget.max_join_work)
        throw CapacityError("cover join exceeds the work budget (" + std::to_string(maximal.size()) +
                            " elements over " + std::to_string(inc.atom_count) + " atoms)");
    }
    cur = std::move(maximal);
  }
  return cur;
}

struct JoinCount {
  std::uint64_t cover_number = 0;
  SolverMode mode = SolverMode::none;
  std::size_t atoms = 0;
  std::size_t instance_size = 0;  // join elements, or colouring vertices for two-set covers
};

// Two-set covers: an atom x lies in the join element with labels s iff s(k) is an
// allowed label of x at every translate k, so the elements containing x form a
// subcube. Pairwise intersecting subcubes of {0,1}^k share a point, hence the
// minimal subcover size is the chromatic number of the graph joining atoms whose
// subcubes are disjoint. Only inclusion-minimal subcubes need colouring.
constexpr std::size_t kColoringVertexLimit = 4096;

inline std::optional<std::vector<Bitset>> standard_conflict_graph(const AtomIncidence& inc, std::size_t translates) {
  struct Cube {
    Bitset only0, only1;
  };
  std::vector<Cube> cubes;
  cubes.reserve(inc.atom_count);
  for (std::size_t a = 0; a < inc.atom_count; ++a) {
    Cube c{Bitset(translates), Bitset(translates)};
    for (std::size_t k = 0; k < translates; ++k) {
      const bool in0 = inc.sets[2 * k].test(a), in1 = inc.sets[2 * k + 1].test(a);
      if (in0 && !in1) c.only0.set(k);
      if (in1 && !in0) c.only1.set(k);
    }
    cubes.push_back(std::move(c));
  }
  std::sort(cubes.begin(), cubes.end(), [](const Cube& x, const Cube& y) {
    return std::tie(x.only0, x.only1) < std::tie(y.only0, y.only1);
  });
  cubes.erase(std::unique(cubes.begin(), cubes.end(),
                          [](const Cube& x, const Cube& y) { return x.only0 == y.only0 && x.only1 == y.only1; }),
              cubes.end());
  // keep minimal subcubes: more fixed coordinates first
  std::stable_sort(cubes.begin(), cubes.end(), [](const Cube& x, const Cube& y) {
    return x.only0.count() + x.only1.count() > y.only0.count() + y.only1.count();
  });
  std::vector<Cube> minimal;
  for (auto& c : cubes) {
    const bool contains_smaller = std::any_of(minimal.begin(), minimal.end(), [&](const Cube& m) {
      return c.only0.is_subset_of(m.only0) && c.only1.is_subset_of(m.only1);
    });
    if (!contains_smaller) minimal.push_back(std::move(c));
    if (minimal.size() > kColoringVertexLimit) return std::nullopt;
  }
  std::vector<Bitset> adj(minimal.size(), Bitset(minimal.size()));
  for (std::size_t i = 0; i < minimal.size(); ++i)
    for (std::size_t j = i + 1; j < minimal.size(); ++j)
      if ((minimal[i].only0 & minimal[j].only1).any() || (minimal[i].only1 & minimal[j].only0).any()) {
        adj[i].set(j);
        adj[j].set(i);
      }
  return adj;
}

/// N(⋁_{g ∈ gens} g^{-1} U).
inline JoinCount join_cover_number(const System& sys, const Cover& cover, const FiniteGroupSet& gens, SolverMode mode,
                                   const Budget& budget = {}) {
  const auto inc = cover_atoms(sys, cover, gens, budget);
  if (mode == SolverMode::exact && cover.standard()) {
    if (auto adj = standard_conflict_graph(inc, gens.size())) {
      const auto col = exact_coloring(*adj, budget.max_search_nodes);
      return {col.colors, SolverMode::exact, inc.atom_count, adj->size()};
    }
  }
  std::vector<std::vector<std::size_t>> groups(gens.size());
  const auto per = cover.elements.size();
  for (std::size_t k = 0; k < gens.size(); ++k)
    for (std::size_t i = 0; i < per; ++i) groups[k].push_back(k * per + i);
  AtomIncidence joined{inc.atom_count, join_elements(inc, groups, budget)};
  const auto r = min_subcover(joined, mode, budget.exact_elements);
  return {r.size, r.mode, joined.atom_count, joined.sets.size()};
}

/// Rows n ↦ (1/|S∩F_n|) log N(⋁_{g ∈ S∩F_n} g^{-1} U).
inline EntropyProfile top_seq_entropy_profile(const System& sys, const Cover& cover, const SubsetGenerator& s,
                                              const FolnerSequence& f, const std::vector<std::int64_t>& ns,
                                              SolverMode mode = SolverMode::exact, const ProfileOptions& opt = {}) {
  if (f.dim() != dim(sys)) throw ConfigError("system and Følner dimensions differ");
  if (cover.elements.empty()) throw ConfigError("cover has no elements");
  for (const auto& e : cover.elements) validate_open_set(sys, e);
  if (!analyze_cover(sys, cover, opt.budget).covers) throw ConfigError("open sets do not cover the space");
  return detail::run_profile(s, f, ns, opt, [&](const FiniteGroupSet& gens) {
    const auto jc = join_cover_number(sys, cover, gens, mode, opt.budget);
    ProfileRow r;
    r.cover_number = jc.cover_number;
    r.solver = jc.mode;
    r.joint = std::log(static_cast<double>(jc.cover_number));
    return r;
  });
}

/// {g ∈ F_n : U ∩ g^{-1} V ≠ ∅}.
inline FiniteGroupSet hitting_times(const System& sys, const OpenSet& u, const OpenSet& v, const FolnerSequence& f,
                                    std::int64_t n) {
  validate_open_set(sys, u);
  validate_open_set(sys, v);
  if (f.dim() != dim(sys)) throw ConfigError("system and Følner dimensions differ");
  FiniteGroupSet out;
  const auto zero = GroupElement::zero(dim(sys));
  for (const auto& g : f.set(n)) {
    const std::vector<PlacedOpenSet> pair{{zero, std::cref(u)}, {g, std::cref(v)}};
    if (intersection_nonempty(sys, pair)) out.push_back(g);
  }
  return out;
}

}  // namespace seqent

#pragma once

// Constructive searches: greedy independence sequences (plain and IP-restricted),
// greedy conditional-entropy sequences, correlation profiles and localization of
// sequence entropy pair candidates. Every result is finite-scale evidence.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "seqent/cover.hpp"
#include "seqent/enumeration.hpp"
#include "seqent/errors.hpp"
#include "seqent/group.hpp"
#include "seqent/partition.hpp"
#include "seqent/systems.hpp"

namespace seqent {

constexpr std::size_t kDefaultPoolSize = 64;

struct IndependenceWitness {
  FiniteGroupSet S;
  std::size_t target = 0;
  bool verified = false;  // every label pattern along S has a nonempty intersection
  bool complete = false;  // S reached the target length
  std::size_t pool_size = 0;

  std::size_t depth() const { return S.size(); }
};

namespace detail {

inline bool all_patterns_nonempty(const System& sys, const std::vector<OpenSet>& w, const FiniteGroupSet& s) {
  std::vector<PlacedOpenSet> placed;
  placed.reserve(s.size());
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == s.size()) return intersection_nonempty(sys, placed);
    for (const auto& wj : w) {
      placed.push_back({s[i], std::cref(wj)});
      const bool ok = rec(i + 1);
      placed.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  return rec(0);
}

inline void validate_family(const System& sys, const std::vector<OpenSet>& w) {
  if (w.size() < 2) throw ConfigError("independence needs at least two sets");
  const auto zero = GroupElement::zero(dim(sys));
  for (const auto& x : w) {
    validate_open_set(sys, x);
    const std::vector<PlacedOpenSet> one{{zero, std::cref(x)}};
    if (!intersection_nonempty(sys, one)) throw ConfigError("independence sets must be nonempty");
  }
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      const std::vector<PlacedOpenSet> pair{{zero, std::cref(w[i])}, {zero, std::cref(w[j])}};
      if (intersection_nonempty(sys, pair)) throw ConfigError("independence sets must be pairwise disjoint");
    }
}

}  // namespace detail

/// Extends S greedily by the first pool element keeping all l^{|S|} patterns nonempty.
inline IndependenceWitness greedy_independence(const System& sys, const std::vector<OpenSet>& w, std::size_t k,
                                               const FiniteGroupSet& pool) {
  if (k < 1) throw ConfigError("target length must be >= 1");
  detail::validate_family(sys, w);
  IndependenceWitness out;
  out.target = k;
  out.pool_size = pool.size();
  for (const auto& g : pool) {
    if (out.S.size() == k) break;
    if (g.dim() != dim(sys)) throw ConfigError("pool element " + g.to_string() + " has wrong dimension");
    if (std::find(out.S.begin(), out.S.end(), g) != out.S.end()) continue;
    out.S.push_back(g);
    if (!detail::all_patterns_nonempty(sys, w, out.S)) out.S.pop_back();
  }
  out.verified = true;
  out.complete = out.S.size() == k;
  return out;
}

/// IP-restricted search, rebuilt at each level m = 1..k over the pool FP(p_1..p_m).
struct IpIndependenceReport {
  std::vector<IndependenceWitness> levels;
  bool complete = false;
};

inline IpIndependenceReport greedy_independence_ip(const System& sys, const std::vector<OpenSet>& w, std::size_t k,
                                                   const std::vector<GroupElement>& generators) {
  if (generators.size() < k) throw ConfigError("IP search needs at least k generators");
  IpIndependenceReport out;
  for (std::size_t m = 1; m <= k; ++m) {
    out.levels.push_back(greedy_independence(sys, w, m, ip_initial_segment(generators, m)));
    if (!out.levels.back().complete) return out;
  }
  out.complete = true;
  return out;
}

struct EntropySequence {
  FiniteGroupSet S;
  std::vector<double> gains;  // H(s_i^{-1} α | ⋁_{j<i} s_j^{-1} α)
  std::vector<double> joint;  // H(⋁_{j<=i} s_j^{-1} α)
  bool complete = false;
};

/// At each step picks the unused pool element with the largest conditional gain;
/// ties go to the earlier pool element.
inline EntropySequence greedy_entropy_sequence(const System& sys, const Partition& alpha, std::size_t k,
                                               const FiniteGroupSet& pool, const ProfileOptions& opt = {}) {
  if (k < 1) throw ConfigError("sequence length must be >= 1");
  validate_partition(sys, alpha);
  EntropySequence out;
  double prev = 0.0;
  for (std::size_t step = 0; step < k; ++step) {
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (std::find(out.S.begin(), out.S.end(), pool[i]) == out.S.end()) cand.push_back(i);
    if (cand.empty()) return out;
    auto values = parallel_map<double>(cand.size(), opt.jobs, [&](std::size_t c) {
      auto gens = out.S;
      gens.push_back(pool[cand[c]]);
      return entropy(join_cells(sys, alpha, gens, opt.budget));
    });
    std::size_t best = 0;
    for (std::size_t c = 0; c < cand.size(); ++c) {
      if (values[c].second) std::rethrow_exception(values[c].second);
      if (*values[c].first > *values[best].first + 1e-12) best = c;
    }
    const double h = *values[best].first;
    out.S.push_back(pool[cand[best]]);
    out.gains.push_back(std::max(0.0, h - prev));
    out.joint.push_back(h);
    prev = h;
  }
  out.complete = true;
  return out;
}

struct CorrelationRow {
  std::int64_t n = 0;
  double average = 0.0;
};

/// n ↦ (1/|F_n|) Σ_{g ∈ F_n} |μ(A ∩ g^{-1}B) - μ(A)μ(B)|.
inline std::vector<CorrelationRow> correlation_profile(const System& sys, const OpenSet& a, const OpenSet& b,
                                                       const std::vector<std::int64_t>& ns, const Budget& budget = {}) {
  if (ns.empty()) throw ConfigError("n_range is empty");
  validate_open_set(sys, a);
  validate_open_set(sys, b);
  const FolnerSequence f(dim(sys));
  const auto zero = GroupElement::zero(dim(sys));
  const std::vector<PlacedOpenSet> pa{{zero, std::cref(a)}}, pb{{zero, std::cref(b)}};
  const double prod = intersection_measure(sys, pa, budget) * intersection_measure(sys, pb, budget);
  std::unordered_map<GroupElement, double, GroupElementHash> dev;
  std::vector<CorrelationRow> out;
  for (auto n : ns) {
    if (n < 1) throw ConfigError("n must be >= 1");
    const auto box = f.set(n);
    long double sum = 0.0L;
    for (const auto& g : box) {
      auto it = dev.find(g);
      if (it == dev.end()) {
        const std::vector<PlacedOpenSet> both{{zero, std::cref(a)}, {g, std::cref(b)}};
        it = dev.emplace(g, std::abs(intersection_measure(sys, both, budget) - prod)).first;
      }
      sum += it->second;
    }
    out.push_back({n, static_cast<double>(sum / static_cast<long double>(box.size()))});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sequence entropy pair localization.
//
// Closed sets are stored as OpenSet values: symbolic ones are clopen cylinder
// unions, circle ones list closed arcs whose interiors are used for intersections.

struct SELevel {
  std::size_t level = 0;
  OpenSet a, b;
  double diam_a = 0.0, diam_b = 0.0;
  double evidence = 0.0;
  bool positive = false;
  FiniteGroupSet witness;
  std::size_t pairs_tried = 0;
};

struct SEPairCandidate {
  std::vector<SELevel> levels;
  bool precondition_met = false;  // level-0 evidence above threshold
  bool success = false;
  std::optional<std::size_t> failed_level;
  std::optional<CylinderPattern> point_a, point_b;  // symbolic: truncated configurations
  std::optional<double> circle_a, circle_b;         // rotation: circle points
};

struct SEOptions {
  std::size_t target = 4;
  double threshold = 0.1;
  FiniteGroupSet pool;  // empty: first 64 elements of the orthant
  std::size_t max_pairs = 4096;
  Budget budget;
};

namespace detail {

// Members of a cylinder union on its own domain, in odometer order.
inline std::pair<Domain, std::vector<std::vector<std::uint32_t>>> members_on(const SymbolicSystem& sys,
                                                                              const CylinderUnion& k,
                                                                              FiniteGroupSet extra,
                                                                              const Budget& budget) {
  for (const auto& c : k.cylinders) extra.insert(extra.end(), c.domain.begin(), c.domain.end());
  Domain dom(std::move(extra));
  const auto cs = place_cylinders(sys, dom, GroupElement::zero(sys.dim()), k);
  std::vector<std::vector<std::uint32_t>> out;
  for_each_configuration(sys, dom.size(), budget, [&](const std::vector<std::uint32_t>& x, const ConfigurationWeight&) {
    if (matches_any(cs, x)) out.push_back(x);
  });
  return {std::move(dom), std::move(out)};
}

inline CylinderUnion symbolic_complement(const SymbolicSystem& sys, const CylinderUnion& u, const Budget& budget) {
  FiniteGroupSet coords;
  for (const auto& c : u.cylinders) coords.insert(coords.end(), c.domain.begin(), c.domain.end());
  const Domain dom(std::move(coords));
  const auto cs = place_cylinders(sys, dom, GroupElement::zero(sys.dim()), u);
  CylinderUnion out;
  for_each_configuration(sys, dom.size(), budget, [&](const std::vector<std::uint32_t>& x, const ConfigurationWeight&) {
    if (!matches_any(cs, x)) out.cylinders.push_back({dom.coords(), x});
  });
  return out;
}

inline FiniteGroupSet max_norm_ball(std::size_t d, std::int64_t r) {
  FiniteGroupSet out;
  GroupElement g = GroupElement::zero(d);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == d) {
      out.push_back(g);
      return;
    }
    for (std::int64_t v = -r; v <= r; ++v) {
      g[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

// Smallest radius at which two points of K disagree; diam(K) = 2^{-r}.
inline std::int64_t symbolic_radius(const SymbolicSystem& sys, const CylinderUnion& k, const Budget& budget) {
  auto [dom, members] = members_on(sys, k, {}, budget);
  if (members.empty()) throw ConfigError("closed set is empty");
  for (std::int64_t r = 0;; ++r) {
    std::vector<std::size_t> idx;
    for (const auto& t : max_norm_ball(sys.dim(), r)) {
      const auto& c = dom.coords();
      auto it = std::lower_bound(c.begin(), c.end(), t);
      if (it == c.end() || *it != t) return r;  // free coordinate
      idx.push_back(static_cast<std::size_t>(it - c.begin()));
    }
    for (const auto& m : members)
      for (auto i : idx)
        if (m[i] != members.front()[i]) return r;
  }
}

// Pieces of K agreeing on B_{r+1}: each has diameter at most 2^{-(r+2)}.
inline std::vector<CylinderUnion> symbolic_pieces(const SymbolicSystem& sys, const CylinderUnion& k, std::int64_t r,
                                                  const Budget& budget) {
  auto [dom, members] = members_on(sys, k, max_norm_ball(sys.dim(), r + 1), budget);
  std::vector<CylinderUnion> out;
  for (auto& m : members) out.push_back(CylinderUnion{{{dom.coords(), std::move(m)}}});
  return out;
}

inline double circle_distance(double x, double y) {
  const double t = frac(x - y);
  return std::min(t, 1.0 - t);
}

inline double circle_diameter(const ArcUnion& k) {
  for (const auto& a : k.arcs)
    for (const auto& b : k.arcs) {
      const double t = frac(b.start - (a.start + 0.5));
      if (t <= a.length || t + b.length >= 1.0) return 0.5;  // antipodal pair inside K
    }
  double best = 0.0;
  for (const auto& a : k.arcs)
    for (const auto& b : k.arcs)
      for (double x : {a.start, a.start + a.length})
        for (double y : {b.start, b.start + b.length}) best = std::max(best, circle_distance(x, y));
  return best;
}

inline ArcUnion circle_complement(const RotationSystem& sys, const ArcUnion& u) {
  std::vector<double> pts;
  for (const auto& a : u.arcs) {
    pts.push_back(a.start);
    pts.push_back(a.start + a.length);
  }
  const auto cuts = merge_breakpoints(sys, std::move(pts));
  std::vector<Arc> gaps;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = (i + 1 < cuts.size()) ? cuts[i + 1] : cuts.front() + 1.0;
    if (in_open_arcs(u, frac(0.5 * (lo + hi)))) continue;
    if (!gaps.empty() && std::abs(gaps.back().start + gaps.back().length - lo) < RotationSystem::kSnap)
      gaps.back().length = hi - gaps.back().start;
    else
      gaps.push_back({lo, hi - lo});
  }
  if (gaps.size() > 1 && std::abs(frac(gaps.back().start + gaps.back().length) - gaps.front().start) < RotationSystem::kSnap) {
    gaps.front().start = gaps.back().start;
    gaps.front().length += gaps.back().length;
    gaps.pop_back();
  }
  for (auto& g : gaps) g.start = sys.wrap(g.start);
  return {gaps};
}

inline std::vector<ArcUnion> circle_pieces(RotationSystem& sys, const ArcUnion& k) {
  std::vector<ArcUnion> out;
  for (const auto& a : k.arcs) {
    const auto parts = static_cast<std::int64_t>(std::max(3.0, std::ceil(6.0 * a.length - 1e-9)));
    if (sys.exact()) sys.refine_grid(sys.grid() * parts);
    for (std::int64_t i = 0; i < parts; ++i) {
      const double len = a.length / static_cast<double>(parts);
      out.push_back(ArcUnion{{{sys.wrap(a.start + static_cast<double>(i) * len), len}}});
    }
  }
  return out;
}

inline double se_evidence(const System& sys, const OpenSet& a, const OpenSet& b, const SEOptions& opt,
                          FiniteGroupSet* witness) {
  const auto w = greedy_independence(sys, {a, b}, opt.target, opt.pool);
  if (witness) *witness = w.S;
  return w.complete ? std::log(2.0) : 0.0;
}

}  // namespace detail

/// Halving search from the complements of a standard cover toward a pair of points.
inline SEPairCandidate se_pair_localize(const System& system, const Cover& u, std::size_t depth, SEOptions opt = {}) {
  if (!u.standard()) throw ConfigError("entropy pair localization needs a standard (two-set) cover");
  if (!analyze_cover(system, u, opt.budget).covers) throw ConfigError("open sets do not cover the space");
  if (opt.pool.empty()) opt.pool = SubsetGenerator::everything(dim(system)).first(kDefaultPoolSize);
  System sys = system;  // the circle grid may be refined
  SEPairCandidate out;
  SELevel lvl;
  if (auto* ss = std::get_if<SymbolicSystem>(&sys)) {
    lvl.a = detail::symbolic_complement(*ss, std::get<CylinderUnion>(u.elements[0]), opt.budget);
    lvl.b = detail::symbolic_complement(*ss, std::get<CylinderUnion>(u.elements[1]), opt.budget);
    if (std::get<CylinderUnion>(lvl.a).cylinders.empty() || std::get<CylinderUnion>(lvl.b).cylinders.empty())
      throw ConfigError("a cover element is the whole space");
  } else {
    auto& rs = std::get<RotationSystem>(sys);
    lvl.a = detail::circle_complement(rs, std::get<ArcUnion>(u.elements[0]));
    lvl.b = detail::circle_complement(rs, std::get<ArcUnion>(u.elements[1]));
    if (std::get<ArcUnion>(lvl.a).arcs.empty() || std::get<ArcUnion>(lvl.b).arcs.empty())
      throw ConfigError("a cover element is the whole space");
  }
  auto diam = [&](const OpenSet& k) {
    if (const auto* ss = std::get_if<SymbolicSystem>(&sys))
      return std::ldexp(1.0, -static_cast<int>(detail::symbolic_radius(*ss, std::get<CylinderUnion>(k), opt.budget)));
    return detail::circle_diameter(std::get<ArcUnion>(k));
  };
  lvl.diam_a = diam(lvl.a);
  lvl.diam_b = diam(lvl.b);
  lvl.evidence = detail::se_evidence(sys, lvl.a, lvl.b, opt, &lvl.witness);
  lvl.positive = lvl.evidence >= opt.threshold;
  lvl.pairs_tried = 1;
  out.precondition_met = lvl.positive;
  out.levels.push_back(std::move(lvl));

  for (std::size_t level = 1; level <= depth; ++level) {
    const auto& prev = out.levels.back();
    std::vector<OpenSet> pa, pb;
    if (auto* ss = std::get_if<SymbolicSystem>(&sys)) {
      const auto& ka = std::get<CylinderUnion>(prev.a);
      const auto& kb = std::get<CylinderUnion>(prev.b);
      for (auto& p : detail::symbolic_pieces(*ss, ka, detail::symbolic_radius(*ss, ka, opt.budget), opt.budget))
        pa.emplace_back(std::move(p));
      for (auto& p : detail::symbolic_pieces(*ss, kb, detail::symbolic_radius(*ss, kb, opt.budget), opt.budget))
        pb.emplace_back(std::move(p));
    } else {
      auto& rs = std::get<RotationSystem>(sys);
      for (auto& p : detail::circle_pieces(rs, std::get<ArcUnion>(prev.a))) pa.emplace_back(std::move(p));
      for (auto& p : detail::circle_pieces(rs, std::get<ArcUnion>(prev.b))) pb.emplace_back(std::move(p));
    }
    SELevel next;
    next.level = level;
    bool found = false;
    for (std::size_t i = 0; i < pa.size() && !found; ++i)
      for (std::size_t j = 0; j < pb.size() && !found; ++j) {
        if (next.pairs_tried++ >= opt.max_pairs) break;
        FiniteGroupSet wit;
        const double ev = detail::se_evidence(sys, pa[i], pb[j], opt, &wit);
        if (ev >= opt.threshold) {
          found = true;
          next.a = pa[i];
          next.b = pb[j];
          next.evidence = ev;
          next.witness = std::move(wit);
        }
      }
    if (!found) {
      out.failed_level = level;
      return out;
    }
    next.positive = true;
    next.diam_a = diam(next.a);
    next.diam_b = diam(next.b);
    if (!(next.diam_a < 0.5 * prev.diam_a) || !(next.diam_b < 0.5 * prev.diam_b))
      throw std::logic_error("refinement did not halve the diameter");
    out.levels.push_back(std::move(next));
  }
  out.success = true;
  const auto& last = out.levels.back();
  if (std::holds_alternative<SymbolicSystem>(sys)) {
    out.point_a = std::get<CylinderUnion>(last.a).cylinders.front();
    out.point_b = std::get<CylinderUnion>(last.b).cylinders.front();
  } else {
    const auto& a = std::get<ArcUnion>(last.a).arcs.front();
    const auto& b = std::get<ArcUnion>(last.b).arcs.front();
    out.circle_a = detail::frac(a.start + 0.5 * a.length);
    out.circle_b = detail::frac(b.start + 0.5 * b.length);
  }
  return out;
}

}  // namespace seqent

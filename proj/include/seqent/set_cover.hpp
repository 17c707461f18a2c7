#pragma once

// Minimal subcover on a finite atom carrier.
//
// Exact mode works on the dual hitting-set form: each atom is replaced by its
// signature (the set of elements containing it). Signatures are deduplicated,
// supersets dropped, forced elements taken and dominated elements removed until
// stable; the residue is solved by branch and bound.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "seqent/errors.hpp"
#include "seqent/partition.hpp"

namespace seqent {

using Bitset = boost::dynamic_bitset<std::uint64_t>;

/// Containment of atoms in cover elements: sets[i] is the atom set of element i.
struct AtomIncidence {
  std::size_t atom_count = 0;
  std::vector<Bitset> sets;

  bool covers_all() const {
    Bitset u(atom_count);
    for (const auto& s : sets) u |= s;
    return u.all();
  }
};

struct SubcoverResult {
  std::size_t size = 0;
  std::vector<std::size_t> chosen;  // indices into AtomIncidence::sets
  SolverMode mode = SolverMode::none;
};

/// Standard greedy: repeatedly take the element covering most uncovered atoms,
/// smallest index on ties.
inline SubcoverResult greedy_subcover(const AtomIncidence& inc) {
  if (!inc.covers_all()) throw ConfigError("elements do not cover every atom");
  SubcoverResult r;
  r.mode = SolverMode::greedy;
  Bitset uncovered(inc.atom_count);
  uncovered.set();
  while (uncovered.any()) {
    std::size_t best = 0, best_gain = 0;
    for (std::size_t i = 0; i < inc.sets.size(); ++i) {
      const auto gain = (inc.sets[i] & uncovered).count();
      if (gain > best_gain) best = i, best_gain = gain;
    }
    r.chosen.push_back(best);
    uncovered -= inc.sets[best];
  }
  r.size = r.chosen.size();
  return r;
}

namespace detail {

class HittingSetSolver {
 public:
  HittingSetSolver(std::vector<Bitset> sigs, std::size_t elements, std::size_t limit)
      : sigs_(std::move(sigs)), elements_(elements), limit_(limit) {}

  SubcoverResult solve() {
    reduce();
    std::vector<std::size_t> active;
    for (std::size_t e = 0; e < elements_; ++e)
      if (alive_[e]) active.push_back(e);
    if (active.size() > limit_)
      throw ExactBudgetError("exact subcover: " + std::to_string(active.size()) +
                             " elements remain after reduction, budget is " + std::to_string(limit_) +
                             "; use greedy mode");
    // residual set cover: universe = signatures, sets = active elements
    const std::size_t u = sigs_.size();
    residual_.assign(active.size(), Bitset(u));
    for (std::size_t j = 0; j < u; ++j)
      for (std::size_t a = 0; a < active.size(); ++a)
        if (sigs_[j].test(active[a])) residual_[a].set(j);
    covering_.assign(u, {});
    for (std::size_t j = 0; j < u; ++j)
      for (std::size_t a = 0; a < active.size(); ++a)
        if (residual_[a].test(j)) covering_[j].push_back(a);

    best_ = greedy_residual();
    Bitset uncovered(u);
    uncovered.set();
    std::vector<std::size_t> picked;
    search(uncovered, picked);

    SubcoverResult r;
    r.mode = SolverMode::exact;
    r.chosen = forced_;
    for (auto a : best_pick_) r.chosen.push_back(active[a]);
    std::sort(r.chosen.begin(), r.chosen.end());
    r.size = r.chosen.size();
    return r;
  }

 private:
  void reduce() {
    alive_.assign(elements_, true);
    for (bool changed = true; changed;) {
      changed = false;
      minimize_signatures();
      // forced elements
      std::vector<std::size_t> forced;
      for (const auto& s : sigs_)
        if (s.count() == 1) forced.push_back(s.find_first());
      if (!forced.empty()) {
        std::sort(forced.begin(), forced.end());
        forced.erase(std::unique(forced.begin(), forced.end()), forced.end());
        for (auto e : forced) forced_.push_back(e);
        std::erase_if(sigs_, [&](const Bitset& s) {
          return std::any_of(forced.begin(), forced.end(), [&](std::size_t e) { return s.test(e); });
        });
        for (auto e : forced) alive_[e] = false;
        changed = true;
      }
      // liveness follows occurrence
      std::vector<Bitset> occ(elements_, Bitset(sigs_.size()));
      for (std::size_t j = 0; j < sigs_.size(); ++j)
        for (auto e = sigs_[j].find_first(); e != Bitset::npos; e = sigs_[j].find_next(e)) occ[e].set(j);
      for (std::size_t e = 0; e < elements_; ++e)
        if (alive_[e] && occ[e].none()) alive_[e] = false;
      // dominated elements: occ(e) ⊆ occ(f), equal occurrence keeps the smaller index
      for (std::size_t e = 0; e < elements_; ++e) {
        if (!alive_[e]) continue;
        for (std::size_t f = 0; f < elements_; ++f) {
          if (f == e || !alive_[f]) continue;
          if (occ[e].is_subset_of(occ[f]) && (occ[e] != occ[f] || f < e)) {
            alive_[e] = false;
            for (auto& s : sigs_) s.reset(e);
            changed = true;
            break;
          }
        }
      }
    }
  }

  void minimize_signatures() {
    std::sort(sigs_.begin(), sigs_.end());
    sigs_.erase(std::unique(sigs_.begin(), sigs_.end()), sigs_.end());
    std::stable_sort(sigs_.begin(), sigs_.end(), [](const Bitset& a, const Bitset& b) { return a.count() < b.count(); });
    std::vector<Bitset> kept;
    for (auto& s : sigs_) {
      const bool superset = std::any_of(kept.begin(), kept.end(), [&](const Bitset& k) { return k.is_subset_of(s); });
      if (!superset) kept.push_back(std::move(s));
    }
    sigs_ = std::move(kept);
  }

  std::size_t greedy_residual() {
    Bitset uncovered(sigs_.size());
    uncovered.set();
    best_pick_.clear();
    while (uncovered.any()) {
      std::size_t best = 0, gain = 0;
      for (std::size_t a = 0; a < residual_.size(); ++a) {
        const auto g = (residual_[a] & uncovered).count();
        if (g > gain) best = a, gain = g;
      }
      best_pick_.push_back(best);
      uncovered -= residual_[best];
    }
    return best_pick_.size();
  }

  // Pairwise disjoint covering lists force distinct elements.
  std::size_t lower_bound(const Bitset& uncovered) const {
    std::vector<std::size_t> order;
    for (auto j = uncovered.find_first(); j != Bitset::npos; j = uncovered.find_next(j)) order.push_back(j);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return covering_[a].size() < covering_[b].size(); });
    std::vector<bool> used(residual_.size(), false);
    std::size_t lb = 0;
    for (auto j : order) {
      const auto& c = covering_[j];
      if (std::none_of(c.begin(), c.end(), [&](std::size_t a) { return used[a]; })) {
        ++lb;
        for (auto a : c) used[a] = true;
      }
    }
    return lb;
  }

  void search(const Bitset& uncovered, std::vector<std::size_t>& picked) {
    if (uncovered.none()) {
      if (picked.size() < best_) best_ = picked.size(), best_pick_ = picked;
      return;
    }
    if (picked.size() + lower_bound(uncovered) >= best_) return;
    std::size_t pivot = Bitset::npos;
    for (auto j = uncovered.find_first(); j != Bitset::npos; j = uncovered.find_next(j))
      if (pivot == Bitset::npos || covering_[j].size() < covering_[pivot].size()) pivot = j;
    auto options = covering_[pivot];
    std::stable_sort(options.begin(), options.end(), [&](std::size_t a, std::size_t b) {
      return (residual_[a] & uncovered).count() > (residual_[b] & uncovered).count();
    });
    for (auto a : options) {
      picked.push_back(a);
      search(uncovered - residual_[a], picked);
      picked.pop_back();
    }
  }

  std::vector<Bitset> sigs_;
  std::size_t elements_;
  std::size_t limit_;
  std::vector<bool> alive_;
  std::vector<std::size_t> forced_;
  std::vector<Bitset> residual_;
  std::vector<std::vector<std::size_t>> covering_;
  std::size_t best_ = 0;
  std::vector<std::size_t> best_pick_;
};

}  // namespace detail

/// Optimal subcover size by reduction plus branch and bound.
inline SubcoverResult exact_subcover(const AtomIncidence& inc, std::size_t element_limit = Budget{}.exact_elements) {
  std::vector<Bitset> sigs(inc.atom_count, Bitset(inc.sets.size()));
  for (std::size_t e = 0; e < inc.sets.size(); ++e) {
    if (inc.sets[e].size() != inc.atom_count) throw ConfigError("incidence row has wrong width");
    for (auto a = inc.sets[e].find_first(); a != Bitset::npos; a = inc.sets[e].find_next(a)) sigs[a].set(e);
  }
  for (const auto& s : sigs)
    if (s.none()) throw ConfigError("elements do not cover every atom");
  return detail::HittingSetSolver(std::move(sigs), inc.sets.size(), element_limit).solve();
}

struct ColoringResult {
  std::size_t colors = 0;
  std::vector<std::size_t> color;
};

/// Chromatic number by DSATUR branch and bound; adj[v] is the neighbourhood of v.
/// Throws ExactBudgetError after node_limit search nodes.
inline ColoringResult exact_coloring(const std::vector<Bitset>& adj, std::uint64_t node_limit) {
  const std::size_t n = adj.size();
  ColoringResult best;
  if (n == 0) return best;
  std::vector<std::size_t> degree(n);
  for (std::size_t v = 0; v < n; ++v) degree[v] = adj[v].count();

  // greedy clique lower bound
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return degree[a] > degree[b]; });
  std::size_t lb = 0;
  for (auto start : order) {
    Bitset cand = adj[start];
    std::size_t size = 1;
    for (auto v : order)
      if (cand.test(v)) {
        ++size;
        cand &= adj[v];
      }
    lb = std::max(lb, size);
    if (lb == n) break;
  }

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> color(n, kNone);
  std::vector<std::vector<std::uint32_t>> seen(n);  // seen[v][c]: neighbours of v with colour c
  std::vector<std::size_t> sat(n, 0);
  best.colors = n + 1;
  std::uint64_t nodes = 0;

  auto assign = [&](std::size_t v, std::size_t c, int delta) {
    for (auto u = adj[v].find_first(); u != Bitset::npos; u = adj[v].find_next(u)) {
      auto& s = seen[u];
      if (s.size() <= c) s.resize(c + 1, 0);
      if (delta > 0 && s[c]++ == 0) ++sat[u];
      if (delta < 0 && --s[c] == 0) --sat[u];
    }
  };

  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t colored, std::size_t used) {
    if (best.colors == lb) return;
    if (++nodes > node_limit)
      throw ExactBudgetError("exact colouring exceeded " + std::to_string(node_limit) + " search nodes; use greedy mode");
    if (colored == n) {
      best.colors = used;
      best.color = color;
      return;
    }
    std::size_t v = kNone;
    for (std::size_t u = 0; u < n; ++u) {
      if (color[u] != kNone) continue;
      if (v == kNone || sat[u] > sat[v] || (sat[u] == sat[v] && degree[u] > degree[v])) v = u;
    }
    for (std::size_t c = 0; c <= used && c + 1 < best.colors; ++c) {
      if (c < seen[v].size() && seen[v][c] > 0) continue;
      color[v] = c;
      assign(v, c, +1);
      rec(colored + 1, std::max(used, c + 1));
      assign(v, c, -1);
      color[v] = kNone;
      if (best.colors == lb) return;
    }
  };
  rec(0, 0);
  return best;
}

inline SubcoverResult min_subcover(const AtomIncidence& inc, SolverMode mode,
                                   std::size_t element_limit = Budget{}.exact_elements) {
  if (mode == SolverMode::greedy) return greedy_subcover(inc);
  return exact_subcover(inc, element_limit);
}

}  // namespace seqent

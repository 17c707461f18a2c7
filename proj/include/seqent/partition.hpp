#pragma once

// Finite measurable partitions, exact joins of translated partitions, Shannon
// and conditional entropy, and finite-scale sequence entropy profiles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "seqent/enumeration.hpp"
#include "seqent/errors.hpp"
#include "seqent/group.hpp"
#include "seqent/systems.hpp"

namespace seqent {

/// Partition of a full shift by a labeling of the letters seen through a window.
/// labels is indexed by the window letters in mixed radix, first coordinate most significant.
struct SymbolicPartition {
  FiniteGroupSet window;
  std::vector<std::uint32_t> labels;

  static SymbolicPartition generating(std::size_t d, std::size_t alphabet) {
    SymbolicPartition p{{GroupElement::zero(d)}, {}};
    for (std::uint32_t a = 0; a < alphabet; ++a) p.labels.push_back(a);
    return p;
  }
  static SymbolicPartition trivial() { return {{}, {0}}; }

  template <class F>
  static SymbolicPartition from_function(FiniteGroupSet window, std::size_t alphabet, F&& label_of) {
    SymbolicPartition p{std::move(window), {}};
    std::size_t states = 1;
    for (std::size_t i = 0; i < p.window.size(); ++i) states *= alphabet;
    std::vector<std::uint32_t> letters(p.window.size(), 0);
    for (std::size_t k = 0; k < states; ++k) {
      std::size_t rest = k;
      for (std::size_t i = letters.size(); i-- > 0;) {
        letters[i] = static_cast<std::uint32_t>(rest % alphabet);
        rest /= alphabet;
      }
      p.labels.push_back(label_of(static_cast<const std::vector<std::uint32_t>&>(letters)));
    }
    return p;
  }
};

/// Partition of the circle into arcs [b_i, b_{i+1}); the last arc wraps to b_0.
struct ArcPartition {
  std::vector<double> breakpoints;
  std::vector<std::uint32_t> labels;

  static ArcPartition halves() { return {{0.0, 0.5}, {0, 1}}; }
  static ArcPartition trivial() { return {{0.0}, {0}}; }

  std::uint32_t label_at(double y) const {
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), y);
    if (it == breakpoints.begin()) return labels.back();
    return labels[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
  }
};

using Partition = std::variant<SymbolicPartition, ArcPartition>;

inline std::size_t label_count(const Partition& p) {
  return std::visit(
      [](const auto& q) -> std::size_t {
        std::uint32_t m = 0;
        for (auto l : q.labels) m = std::max(m, l);
        return static_cast<std::size_t>(m) + 1;
      },
      p);
}

inline void validate_partition(const System& sys, const Partition& part) {
  if (const auto* sp = std::get_if<SymbolicPartition>(&part)) {
    const auto* ss = std::get_if<SymbolicSystem>(&sys);
    if (!ss) throw ConfigError("symbolic partition used with a rotation system");
    std::size_t states = 1;
    for (const auto& w : sp->window) {
      if (w.dim() != ss->dim()) throw ConfigError("partition window coordinate has wrong dimension");
      states *= ss->alphabet_size();
    }
    if (sp->labels.size() != states) throw ConfigError("partition labeling size must be alphabet^|window|");
    if (Domain(sp->window).size() != sp->window.size()) throw ConfigError("partition window repeats a coordinate");
  } else {
    const auto& ap = std::get<ArcPartition>(part);
    const auto* rs = std::get_if<RotationSystem>(&sys);
    if (!rs) throw ConfigError("arc partition used with a symbolic system");
    if (ap.breakpoints.empty() || ap.breakpoints.size() != ap.labels.size())
      throw ConfigError("arc partition needs one label per breakpoint");
    for (std::size_t i = 0; i < ap.breakpoints.size(); ++i) {
      const double b = ap.breakpoints[i];
      if (!(b >= 0.0 && b < 1.0)) throw ConfigError("arc breakpoints must lie in [0,1)");
      if (i > 0 && !(ap.breakpoints[i - 1] < b)) throw ConfigError("arc breakpoints must be strictly increasing");
      if (!rs->on_grid(b)) throw ConfigError("arc breakpoint is off the rational grid of the rotation");
    }
  }
}

/// g^{-1} applied to a partition.
struct PlacedPartition {
  GroupElement g;
  std::reference_wrapper<const Partition> partition;
};

struct Cell {
  std::vector<std::uint32_t> labels;  // one label per placed partition
  double mass = 0.0;
};

/// Atoms of a join with their masses, sorted by label vector.
struct CellDistribution {
  std::vector<Cell> cells;

  std::vector<double> masses() const {
    std::vector<double> m;
    m.reserve(cells.size());
    for (const auto& c : cells) m.push_back(c.mass);
    return m;
  }
};

/// Σ -w log w in nats, with 0 log 0 = 0.
inline double shannon_entropy(std::span<const double> weights) {
  long double sum = 0.0L, h = 0.0L;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("negative weight in entropy");
    sum += w;
    if (w > 0.0) h -= static_cast<long double>(w) * std::log(static_cast<long double>(w));
  }
  if (std::abs(sum - 1.0L) > 1e-9L) throw ConfigError("weights must sum to 1 within 1e-9");
  return std::max(0.0, static_cast<double>(h));
}

inline double entropy(const CellDistribution& d) {
  const auto m = d.masses();
  return shannon_entropy(m);
}

namespace detail {

inline CellDistribution collect_cells(
    std::unordered_map<std::vector<std::uint32_t>, MassAccumulator, VectorHash>& acc, long double denominator) {
  CellDistribution out;
  out.cells.reserve(acc.size());
  for (auto& [labels, mass] : acc) {
    const double m = mass.value(denominator);
    if (m > 0.0) out.cells.push_back({labels, m});
  }
  std::sort(out.cells.begin(), out.cells.end(), [](const Cell& a, const Cell& b) { return a.labels < b.labels; });
  return out;
}

inline CellDistribution join_symbolic(const SymbolicSystem& sys, std::span<const PlacedPartition> placed,
                                      const Budget& budget) {
  FiniteGroupSet all;
  for (const auto& p : placed) {
    const auto& sp = std::get<SymbolicPartition>(p.partition.get());
    const auto m = sys.motion(p.g);
    for (const auto& w : sp.window) all.push_back(w + m);
  }
  const Domain domain(std::move(all));
  state_count(sys, domain.size(), budget);

  std::vector<std::vector<std::size_t>> positions;
  for (const auto& p : placed) {
    const auto& sp = std::get<SymbolicPartition>(p.partition.get());
    const auto m = sys.motion(p.g);
    auto& pos = positions.emplace_back();
    for (const auto& w : sp.window) pos.push_back(domain.index_of(w + m));
  }

  const auto alphabet = sys.alphabet_size();
  std::unordered_map<std::vector<std::uint32_t>, MassAccumulator, VectorHash> acc;
  std::vector<std::uint32_t> key(placed.size());
  for_each_configuration(sys, domain.size(), budget, [&](const std::vector<std::uint32_t>& x, const ConfigurationWeight& w) {
    for (std::size_t j = 0; j < placed.size(); ++j) {
      std::size_t idx = 0;
      for (auto pos : positions[j]) idx = idx * alphabet + x[pos];
      key[j] = std::get<SymbolicPartition>(placed[j].partition.get()).labels[idx];
    }
    acc[key].add(w);
  });
  return collect_cells(acc, exact_denominator(sys, domain.size()));
}

// Sorted distinct breakpoints in [0,1), merged on the grid or within kSnap.
inline std::vector<double> merge_breakpoints(const RotationSystem& sys, std::vector<double> pts) {
  for (auto& p : pts) p = sys.wrap(p);
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double p : pts)
    if (out.empty() || p - out.back() > (sys.exact() ? 0.0 : RotationSystem::kSnap)) out.push_back(p);
  if (!sys.exact() && out.size() > 1 && out.front() + 1.0 - out.back() <= RotationSystem::kSnap) out.pop_back();
  return out;
}

inline double frac(double x) { return x - std::floor(x); }

/// Calls f(midpoint, length, ticks) for each open arc between consecutive breakpoints.
template <class F>
void for_each_circle_atom(const RotationSystem& sys, const std::vector<double>& cuts, F&& f) {
  if (cuts.empty()) {
    f(0.5, 1.0L, sys.exact() ? sys.grid() : std::int64_t{0});
    return;
  }
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = (i + 1 < cuts.size()) ? cuts[i + 1] : cuts.front() + 1.0;
    std::int64_t ticks = 0;
    if (sys.exact()) {
      const auto ta = sys.to_ticks(a);
      const auto tb = (i + 1 < cuts.size()) ? sys.to_ticks(b) : sys.to_ticks(cuts.front()) + sys.grid();
      ticks = tb - ta;
    }
    f(frac(0.5 * (a + b)), static_cast<long double>(b) - a, ticks);
  }
}

inline CellDistribution join_rotation(const RotationSystem& sys, std::span<const PlacedPartition> placed) {
  std::vector<double> pts;
  std::vector<double> offsets;
  for (const auto& p : placed) {
    const auto& ap = std::get<ArcPartition>(p.partition.get());
    const double off = sys.offset(p.g);
    offsets.push_back(off);
    for (double b : ap.breakpoints) pts.push_back(b - off);
  }
  const auto cuts = merge_breakpoints(sys, std::move(pts));
  std::unordered_map<std::vector<std::uint32_t>, MassAccumulator, VectorHash> acc;
  std::vector<std::uint32_t> key(placed.size());
  for_each_circle_atom(sys, cuts, [&](double mid, long double length, std::int64_t ticks) {
    for (std::size_t j = 0; j < placed.size(); ++j)
      key[j] = std::get<ArcPartition>(placed[j].partition.get()).label_at(frac(mid + offsets[j]));
    acc[key].add_ticks(ticks, length);
  });
  return collect_cells(acc, sys.exact() ? static_cast<long double>(sys.grid()) : 0.0L);
}

}  // namespace detail

/// Atoms of ⋁ g^{-1} α_g over the placed partitions, with exact masses.
inline CellDistribution join_cells(const System& sys, std::span<const PlacedPartition> placed,
                                   const Budget& budget = {}) {
  if (placed.empty()) throw ConfigError("join needs at least one partition");
  for (const auto& p : placed) validate_partition(sys, p.partition.get());
  if (const auto* ss = std::get_if<SymbolicSystem>(&sys)) return detail::join_symbolic(*ss, placed, budget);
  return detail::join_rotation(std::get<RotationSystem>(sys), placed);
}

inline CellDistribution join_cells(const System& sys, const Partition& alpha, const FiniteGroupSet& gens,
                                   const Budget& budget = {}) {
  if (gens.empty()) throw ConfigError("join needs a nonempty set of group elements");
  std::vector<PlacedPartition> placed;
  placed.reserve(gens.size());
  for (const auto& g : gens) placed.push_back({g, std::cref(alpha)});
  return join_cells(sys, placed, budget);
}

inline double partition_entropy(const System& sys, const Partition& alpha, const Budget& budget = {}) {
  return entropy(join_cells(sys, alpha, {GroupElement::zero(dim(sys))}, budget));
}

/// H(α | β) = H(α ∨ β) - H(β).
inline double conditional_entropy(const System& sys, const Partition& alpha, const Partition& beta,
                                  const Budget& budget = {}) {
  const auto zero = GroupElement::zero(dim(sys));
  const std::vector<PlacedPartition> both{{zero, std::cref(alpha)}, {zero, std::cref(beta)}};
  const std::vector<PlacedPartition> only{{zero, std::cref(beta)}};
  const double h = entropy(join_cells(sys, both, budget)) - entropy(join_cells(sys, only, budget));
  return h < 0.0 && h > -1e-12 ? 0.0 : h;
}

enum class SolverMode { none, exact, greedy };

inline const char* to_string(SolverMode m) {
  switch (m) {
    case SolverMode::exact:
      return "exact";
    case SolverMode::greedy:
      return "greedy";
    default:
      return "none";
  }
}

struct ProfileRow {
  std::int64_t n = 0;
  std::uint64_t count = 0;  // |S ∩ F_n|
  double joint = 0.0;       // H(join) or log N(join), nats
  double normalized = 0.0;  // joint / count
  double tail_max = 0.0;    // max normalized over the last half of rows so far
  std::optional<std::uint64_t> cover_number;  // N(join), covers only
  SolverMode solver = SolverMode::none;
};

/// Finite-scale approximants of a sequence entropy along S and F.
struct EntropyProfile {
  std::vector<ProfileRow> rows;
  double tail_max = 0.0;
  bool truncated = false;
  std::string truncation_reason;
};

struct ProfileOptions {
  Budget budget;
  unsigned jobs = 1;
};

inline std::size_t tail_start(std::size_t rows) { return rows / 2; }

namespace detail {

// Shared row driver: computes rows in parallel, truncates at the first failure.
template <class RowFn>
EntropyProfile run_profile(const SubsetGenerator& s, const FolnerSequence& f, const std::vector<std::int64_t>& ns,
                           const ProfileOptions& opt, RowFn&& row_fn) {
  if (ns.empty()) throw ConfigError("n_range is empty");
  if (s.dim() != f.dim()) throw ConfigError("subset and Følner dimensions differ");
  std::vector<std::pair<std::int64_t, FiniteGroupSet>> work;
  for (auto n : ns) {
    if (n < 1) throw ConfigError("n must be >= 1");
    auto gens = s.intersect_box(n);
    if (!gens.empty()) work.emplace_back(n, std::move(gens));
  }
  auto results = parallel_map<ProfileRow>(work.size(), opt.jobs, [&](std::size_t i) {
    ProfileRow r = row_fn(work[i].second);
    r.n = work[i].first;
    r.count = work[i].second.size();
    r.normalized = r.joint / static_cast<double>(r.count);
    return r;
  });
  EntropyProfile prof;
  for (auto& [row, err] : results) {
    if (err) {
      try {
        std::rethrow_exception(err);
      } catch (const CapacityError& e) {
        prof.truncated = true;
        prof.truncation_reason = e.what();
        break;
      }
    }
    prof.rows.push_back(*row);
    double tm = 0.0;
    for (std::size_t j = tail_start(prof.rows.size()); j < prof.rows.size(); ++j)
      tm = std::max(tm, prof.rows[j].normalized);
    prof.rows.back().tail_max = tm;
    prof.tail_max = tm;
  }
  return prof;
}

}  // namespace detail

/// Rows n ↦ (1/|S∩F_n|) H(⋁_{g ∈ S∩F_n} g^{-1} α); empty rows are skipped.
inline EntropyProfile seq_entropy_profile(const System& sys, const Partition& alpha, const SubsetGenerator& s,
                                          const FolnerSequence& f, const std::vector<std::int64_t>& ns,
                                          const ProfileOptions& opt = {}) {
  if (f.dim() != dim(sys)) throw ConfigError("system and Følner dimensions differ");
  validate_partition(sys, alpha);
  return detail::run_profile(s, f, ns, opt, [&](const FiniteGroupSet& gens) {
    ProfileRow r;
    r.joint = entropy(join_cells(sys, alpha, gens, opt.budget));
    return r;
  });
}

inline std::vector<std::int64_t> n_range(std::int64_t from, std::int64_t to) {
  std::vector<std::int64_t> ns;
  for (auto n = from; n <= to; ++n) ns.push_back(n);
  return ns;
}

}  // namespace seqent

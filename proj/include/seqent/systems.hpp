#pragma once

// Concrete Z^d-systems with invariant measures: symbolic full shifts with a
// product measure and circle rotations with Lebesgue measure.
//
// Shift convention: (g x)_t = x_{t + m(g)}, where m(g) zeroes the coordinates
// of identity generators. Hence the preimage g^{-1}[a at c] is [a at c + m(g)],
// matching the left shift T_2 (x_n) = (x_{n+1}).

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "seqent/errors.hpp"
#include "seqent/group.hpp"
#include "seqent/rational.hpp"

namespace seqent {

enum class AxisAction { shift, identity };

// Letter weights as integers over a common denominator, when they are rational.
struct ExactWeights {
  std::vector<std::uint64_t> numerators;
  std::uint64_t denominator = 1;
};

class SymbolicSystem {
 public:
  SymbolicSystem(std::vector<AxisAction> axes, std::vector<double> weights)
      : axes_(std::move(axes)), weights_(std::move(weights)) {
    validate();
  }

  SymbolicSystem(std::vector<AxisAction> axes, const std::vector<Rational>& weights) : axes_(std::move(axes)) {
    std::int64_t den = 1;
    for (const auto& w : weights) {
      if (w.num < 0) throw ConfigError("letter weights must be nonnegative");
      den = std::lcm(den, w.den);
    }
    ExactWeights ex;
    ex.denominator = static_cast<std::uint64_t>(den);
    std::uint64_t total = 0;
    for (const auto& w : weights) {
      ex.numerators.push_back(static_cast<std::uint64_t>(w.num * (den / w.den)));
      total += ex.numerators.back();
      weights_.push_back(w.value());
    }
    if (total != ex.denominator) throw ConfigError("letter weights must sum to exactly 1");
    exact_ = std::move(ex);
    validate();
  }

  /// Uniform Bernoulli measure on a full shift.
  static SymbolicSystem uniform(std::vector<AxisAction> axes, std::size_t alphabet) {
    return SymbolicSystem(std::move(axes), std::vector<Rational>(alphabet, Rational::make(1, static_cast<std::int64_t>(alphabet))));
  }

  std::size_t dim() const { return axes_.size(); }
  std::size_t alphabet_size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<AxisAction>& axes() const { return axes_; }
  const std::optional<ExactWeights>& exact_weights() const { return exact_; }

  /// g with identity generators zeroed.
  GroupElement motion(const GroupElement& g) const {
    if (g.dim() != dim()) throw ConfigError("group element " + g.to_string() + " has wrong dimension");
    GroupElement m = g;
    for (std::size_t i = 0; i < axes_.size(); ++i)
      if (axes_[i] == AxisAction::identity) m[i] = 0;
    return m;
  }

 private:
  void validate() const {
    if (axes_.empty()) throw ConfigError("symbolic system needs at least one axis");
    if (weights_.size() < 2) throw ConfigError("alphabet must have at least two letters");
    double sum = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0)) throw ConfigError("letter weights must be nonnegative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("letter weights must sum to 1");
  }

  std::vector<AxisAction> axes_;
  std::vector<double> weights_;
  std::optional<ExactWeights> exact_;
};

/// Half-open arc [start, start + length) on the circle R/Z.
struct Arc {
  double start = 0.0;
  double length = 0.0;
  friend bool operator==(const Arc&, const Arc&) = default;
};

class RotationSystem {
 public:
  // Breakpoints closer than this are identified in floating mode.
  static constexpr double kSnap = 1e-12;

  explicit RotationSystem(std::vector<double> angles) : angles_(std::move(angles)) {
    if (angles_.empty()) throw ConfigError("rotation needs at least one angle");
    for (auto& a : angles_) a = a - std::floor(a);
  }

  // Exact mode: all points live on the grid (1/grid) Z / Z.
  explicit RotationSystem(const std::vector<Rational>& angles) {
    if (angles.empty()) throw ConfigError("rotation needs at least one angle");
    grid_ = 1;
    for (const auto& a : angles) grid_ = std::lcm(grid_, a.den);
    rational_ = angles;
    rebuild_ticks();
  }

  std::size_t dim() const { return angles_.size(); }
  const std::vector<double>& angles() const { return angles_; }
  bool exact() const { return grid_ > 0; }
  std::int64_t grid() const { return grid_; }

  /// Refines the exact grid so that multiples of 1/den are representable.
  void refine_grid(std::int64_t den) {
    if (!exact()) return;
    const auto g = std::lcm(grid_, den);
    if (g > (std::int64_t{1} << 40)) throw CapacityError("rational grid denominator too large");
    grid_ = g;
    rebuild_ticks();
  }

  bool on_grid(double x) const {
    if (!exact()) return true;
    const long double scaled = static_cast<long double>(x) * grid_;
    return std::abs(scaled - std::nearbyint(scaled)) < 1e-6;
  }

  std::int64_t to_ticks(double x) const {
    const auto t = static_cast<std::int64_t>(std::llround(static_cast<long double>(x) * grid_));
    return ((t % grid_) + grid_) % grid_;
  }
  double from_ticks(std::int64_t t) const {
    return static_cast<double>(static_cast<long double>(t) / static_cast<long double>(grid_));
  }

  /// Reduces a point into [0,1), snapping to the grid (exact) or to 0 near 1 (floating).
  double wrap(double x) const {
    if (exact()) return from_ticks(to_ticks(x));
    const double r = x - std::floor(x);
    return (r < kSnap || r > 1.0 - kSnap) ? 0.0 : r;
  }

  /// Σ g_i · angle_i mod 1.
  double offset(const GroupElement& g) const {
    if (g.dim() != dim()) throw ConfigError("group element " + g.to_string() + " has wrong dimension");
    if (exact()) return from_ticks(offset_ticks(g));
    long double s = 0.0L;
    for (std::size_t i = 0; i < dim(); ++i) {
      s += static_cast<long double>(g[i]) * angles_[i];
      s -= std::floor(s);
    }
    return wrap(static_cast<double>(s));
  }

  std::int64_t offset_ticks(const GroupElement& g) const {
    __int128 s = 0;
    for (std::size_t i = 0; i < dim(); ++i) s += static_cast<__int128>(g[i]) * angle_ticks_[i];
    s %= grid_;
    if (s < 0) s += grid_;
    return static_cast<std::int64_t>(s);
  }

 private:
  void rebuild_ticks() {
    angles_.clear();
    angle_ticks_.clear();
    for (const auto& a : rational_) {
      auto t = static_cast<std::int64_t>((static_cast<__int128>(a.num) * (grid_ / a.den)) % grid_);
      if (t < 0) t += grid_;
      angle_ticks_.push_back(t);
      angles_.push_back(from_ticks(t));
    }
  }

  std::vector<double> angles_;
  std::vector<Rational> rational_;
  std::vector<std::int64_t> angle_ticks_;
  std::int64_t grid_ = 0;
};

using System = std::variant<SymbolicSystem, RotationSystem>;

inline std::size_t dim(const System& s) {
  return std::visit([](const auto& x) { return x.dim(); }, s);
}

/// Cylinder [letters at domain]: every listed coordinate fixed to its letter.
struct CylinderPattern {
  FiniteGroupSet domain;
  std::vector<std::uint32_t> letters;

  static CylinderPattern single(GroupElement at, std::uint32_t letter) { return {{std::move(at)}, {letter}}; }

  friend bool operator==(const CylinderPattern&, const CylinderPattern&) = default;
};

inline void validate_pattern(const SymbolicSystem& sys, const CylinderPattern& pat) {
  if (pat.domain.size() != pat.letters.size()) throw ConfigError("pattern domain and letters differ in length");
  std::set<GroupElement> seen;
  for (std::size_t i = 0; i < pat.domain.size(); ++i) {
    if (pat.domain[i].dim() != sys.dim()) throw ConfigError("pattern coordinate has wrong dimension");
    if (!seen.insert(pat.domain[i]).second)
      throw ConfigError("pattern coordinate " + pat.domain[i].to_string() + " repeated");
    if (pat.letters[i] >= sys.alphabet_size()) throw ConfigError("pattern letter out of alphabet range");
  }
}

/// Product-measure mass of a cylinder.
inline double cylinder_measure(const SymbolicSystem& sys, const CylinderPattern& pat) {
  validate_pattern(sys, pat);
  if (const auto& ex = sys.exact_weights()) {
    long double p = 1.0L;
    for (auto l : pat.letters) p *= static_cast<long double>(ex->numerators[l]) / ex->denominator;
    return static_cast<double>(p);
  }
  double p = 1.0;
  for (auto l : pat.letters) p *= sys.weights()[l];
  return p;
}

/// Pattern whose cylinder is g^{-1} of the input cylinder.
inline CylinderPattern act_on_pattern(const SymbolicSystem& sys, const GroupElement& g, const CylinderPattern& pat) {
  const auto m = sys.motion(g);
  CylinderPattern out = pat;
  for (auto& c : out.domain) c += m;
  return out;
}

/// g^{-1}(arc): the arc translated by -offset(g).
inline Arc rotate_arc(const RotationSystem& sys, const GroupElement& g, const Arc& arc) {
  if (!(arc.length > 0.0 && arc.length <= 1.0)) throw ConfigError("arc length must be in (0,1]");
  return {sys.wrap(arc.start - sys.offset(g)), arc.length};
}

}  // namespace seqent

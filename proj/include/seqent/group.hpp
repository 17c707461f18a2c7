#pragma once

// The acting group Z^d: lattice points, Følner boxes, infinite subsets given
// by generators, densities and finite IP-set segments.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "seqent/errors.hpp"

namespace seqent {

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw CapacityError("coordinate overflow in Z^d arithmetic");
  return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw CapacityError("coordinate overflow in Z^d arithmetic");
  return r;
}

}  // namespace detail

/// A point of Z^d. Addition is the group operation, negation the inverse.
class GroupElement {
 public:
  GroupElement() = default;
  explicit GroupElement(std::size_t d) : coords_(d, 0) {}
  GroupElement(std::initializer_list<std::int64_t> c) : coords_(c) {}
  explicit GroupElement(std::vector<std::int64_t> c) : coords_(std::move(c)) {}

  static GroupElement zero(std::size_t d) { return GroupElement(d); }
  static GroupElement unit(std::size_t d, std::size_t axis, std::int64_t scale = 1) {
    GroupElement e(d);
    e.coords_.at(axis) = scale;
    return e;
  }

  std::size_t dim() const { return coords_.size(); }
  std::int64_t operator[](std::size_t i) const { return coords_[i]; }
  std::int64_t& operator[](std::size_t i) { return coords_[i]; }
  const std::vector<std::int64_t>& coords() const { return coords_; }

  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](std::int64_t c) { return c == 0; });
  }
  bool in_orthant() const {
    return std::all_of(coords_.begin(), coords_.end(), [](std::int64_t c) { return c >= 0; });
  }

  // Smallest n with this point in [0,n-1]^d; only meaningful in the orthant.
  std::int64_t level() const {
    std::int64_t m = 0;
    for (auto c : coords_) m = std::max(m, c);
    return m + 1;
  }

  // Max-norm, used by the configuration metric.
  std::int64_t radius() const {
    std::int64_t m = 0;
    for (auto c : coords_) m = std::max(m, c < 0 ? -c : c);
    return m;
  }

  GroupElement& operator+=(const GroupElement& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] = detail::checked_add(coords_[i], o.coords_[i]);
    return *this;
  }
  GroupElement& operator-=(const GroupElement& o) { return *this += -o; }
  friend GroupElement operator+(GroupElement a, const GroupElement& b) { return a += b; }
  friend GroupElement operator-(GroupElement a, const GroupElement& b) { return a -= b; }
  GroupElement operator-() const {
    GroupElement r = *this;
    for (auto& c : r.coords_) c = detail::checked_mul(c, -1);
    return r;
  }
  GroupElement scaled(std::int64_t k) const {
    GroupElement r = *this;
    for (auto& c : r.coords_) c = detail::checked_mul(c, k);
    return r;
  }

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend auto operator<=>(const GroupElement& a, const GroupElement& b) { return a.coords_ <=> b.coords_; }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(coords_[i]);
    }
    return s + ")";
  }

 private:
  void require_same_dim(const GroupElement& o) const {
    if (o.dim() != dim()) throw ConfigError("dimension mismatch: " + to_string() + " vs " + o.to_string());
  }

  std::vector<std::int64_t> coords_;
};

struct GroupElementHash {
  std::size_t operator()(const GroupElement& g) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (auto c : g.coords()) h ^= std::hash<std::int64_t>{}(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

/// Ordered finite set of distinct group elements.
using FiniteGroupSet = std::vector<GroupElement>;

// Canonical order: first-hit level in the box sequence, then lexicographic.
inline bool canonical_less(const GroupElement& a, const GroupElement& b) {
  auto la = a.level(), lb = b.level();
  if (la != lb) return la < lb;
  return a < b;
}

inline void canonicalize(FiniteGroupSet& s) {
  std::sort(s.begin(), s.end(), canonical_less);
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

/// Følner boxes F_n = [0, n-1]^d anchored at the origin.
class FolnerSequence {
 public:
  // Largest box this library will materialize.
  static constexpr std::uint64_t kMaxBoxSize = std::uint64_t{1} << 26;

  explicit FolnerSequence(std::size_t d) : d_(d) {
    if (d == 0) throw ConfigError("Følner dimension must be positive");
  }

  std::size_t dim() const { return d_; }

  std::uint64_t size(std::int64_t n) const {
    if (n < 1) throw ConfigError("Følner index must be >= 1");
    std::uint64_t s = 1;
    for (std::size_t i = 0; i < d_; ++i) {
      if (__builtin_mul_overflow(s, static_cast<std::uint64_t>(n), &s) || s > kMaxBoxSize)
        throw CapacityError("box [0," + std::to_string(n - 1) + "]^" + std::to_string(d_) + " too large");
    }
    return s;
  }

  bool contains(std::int64_t n, const GroupElement& g) const {
    if (g.dim() != d_) return false;
    return std::all_of(g.coords().begin(), g.coords().end(), [n](std::int64_t c) { return c >= 0 && c < n; });
  }

  /// All lattice points of [0,n-1]^d in lexicographic order.
  FiniteGroupSet set(std::int64_t n) const {
    const auto total = size(n);
    FiniteGroupSet out;
    out.reserve(total);
    GroupElement g(d_);
    for (std::uint64_t k = 0; k < total; ++k) {
      out.push_back(g);
      for (std::size_t i = d_; i-- > 0;) {
        if (++g[i] < n) break;
        g[i] = 0;
      }
    }
    return out;
  }

 private:
  std::size_t d_;
};

/// All nonempty subset sums p_{i_1}+...+p_{i_j}, i_1<...<i_j <= k, deduplicated,
/// in canonical order.
inline FiniteGroupSet ip_initial_segment(const std::vector<GroupElement>& p, std::size_t k) {
  if (k < 1 || k > p.size()) throw ConfigError("IP segment length must satisfy 1 <= k <= |p|");
  if (k > 24) throw CapacityError("IP segment of " + std::to_string(k) + " generators exceeds 2^24 sums");
  const std::size_t d = p.front().dim();
  FiniteGroupSet sums;
  sums.reserve((std::size_t{1} << k) - 1);
  // sums[mask] built from sums[mask without lowest bit]
  std::vector<GroupElement> by_mask(std::size_t{1} << k, GroupElement(d));
  for (std::size_t mask = 1; mask < by_mask.size(); ++mask) {
    const auto low = static_cast<std::size_t>(__builtin_ctzll(mask));
    by_mask[mask] = by_mask[mask & (mask - 1)] + p[low];
    sums.push_back(by_mask[mask]);
  }
  canonicalize(sums);
  return sums;
}

namespace subset {

struct ExplicitList {
  FiniteGroupSet elements;
};
// base + k * step, k >= 0
struct Arithmetic {
  GroupElement base;
  GroupElement step;
};
// (start + k) * e_axis
struct AxisRay {
  std::size_t d = 1;
  std::size_t axis = 0;
  std::int64_t start = 0;
};
// p(k) * direction with p(k) = sum_j coeffs[j] k^j
struct Polynomial {
  std::vector<std::int64_t> coeffs;
  GroupElement direction;
};
// FP(generators), finite
struct IpSegment {
  std::vector<GroupElement> generators;
};
// orthant minus a finite excluded set
struct DensityOneComplement {
  std::size_t d = 1;
  FiniteGroupSet excluded;
};

}  // namespace subset

/// Deterministic enumeration of a subset S of the orthant of Z^d.
class SubsetGenerator {
 public:
  using Kind = std::variant<subset::ExplicitList, subset::Arithmetic, subset::AxisRay, subset::Polynomial,
                            subset::IpSegment, subset::DensityOneComplement>;

  explicit SubsetGenerator(Kind k) : kind_(std::move(k)) { validate(); }

  static SubsetGenerator explicit_list(FiniteGroupSet e) { return SubsetGenerator(subset::ExplicitList{std::move(e)}); }
  static SubsetGenerator arithmetic(GroupElement base, GroupElement step) {
    return SubsetGenerator(subset::Arithmetic{std::move(base), std::move(step)});
  }
  static SubsetGenerator axis_ray(std::size_t d, std::size_t axis, std::int64_t start = 0) {
    return SubsetGenerator(subset::AxisRay{d, axis, start});
  }
  static SubsetGenerator polynomial(std::vector<std::int64_t> coeffs, GroupElement direction) {
    return SubsetGenerator(subset::Polynomial{std::move(coeffs), std::move(direction)});
  }
  static SubsetGenerator ip_segment(std::vector<GroupElement> generators) {
    return SubsetGenerator(subset::IpSegment{std::move(generators)});
  }
  static SubsetGenerator complement_of(std::size_t d, FiniteGroupSet excluded = {}) {
    return SubsetGenerator(subset::DensityOneComplement{d, std::move(excluded)});
  }
  static SubsetGenerator everything(std::size_t d) { return complement_of(d); }

  const Kind& kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  bool finite() const { return finite_.has_value(); }

  /// S ∩ F_n in canonical order.
  FiniteGroupSet intersect_box(std::int64_t n) const {
    FiniteGroupSet out;
    if (finite_) {
      for (const auto& g : *finite_)
        if (g.level() <= n) out.push_back(g);
      return out;
    }
    if (const auto* c = std::get_if<subset::DensityOneComplement>(&kind_)) {
      for (auto& g : FolnerSequence(c->d).set(n))
        if (!std::binary_search(c->excluded.begin(), c->excluded.end(), g)) out.push_back(std::move(g));
      canonicalize(out);
      return out;
    }
    for (std::int64_t k = 0;; ++k) {
      auto g = kth(k);
      if (g.level() > n) break;
      out.push_back(std::move(g));
    }
    return out;
  }

  /// The first m elements of S in canonical order (fewer if S is finite).
  FiniteGroupSet first(std::size_t m) const {
    FiniteGroupSet out;
    if (finite_) {
      out.assign(finite_->begin(), finite_->begin() + static_cast<std::ptrdiff_t>(std::min(m, finite_->size())));
      return out;
    }
    if (std::holds_alternative<subset::DensityOneComplement>(kind_)) {
      for (std::int64_t n = 1; out.size() < m; ++n) out = intersect_box(n);
      out.resize(m);
      return out;
    }
    for (std::size_t k = 0; k < m; ++k) out.push_back(kth(static_cast<std::int64_t>(k)));
    return out;
  }

 private:
  // k-th element for the monotone parametrized kinds.
  GroupElement kth(std::int64_t k) const {
    if (const auto* a = std::get_if<subset::Arithmetic>(&kind_)) return a->base + a->step.scaled(k);
    if (const auto* r = std::get_if<subset::AxisRay>(&kind_))
      return GroupElement::unit(r->d, r->axis, detail::checked_add(r->start, k));
    const auto& p = std::get<subset::Polynomial>(kind_);
    std::int64_t v = 0;
    for (std::size_t j = p.coeffs.size(); j-- > 0;) v = detail::checked_add(detail::checked_mul(v, k), p.coeffs[j]);
    return p.direction.scaled(v);
  }

  void require_orthant(const GroupElement& g) const {
    if (g.dim() != dim_) throw ConfigError("subset element " + g.to_string() + " has wrong dimension");
    if (!g.in_orthant()) throw ConfigError("subset element " + g.to_string() + " lies outside the orthant");
  }

  void validate() {
    std::visit(
        [this](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, subset::ExplicitList>) {
            if (k.elements.empty()) throw ConfigError("explicit subset list is empty");
            dim_ = k.elements.front().dim();
            for (const auto& g : k.elements) require_orthant(g);
            FiniteGroupSet s = k.elements;
            canonicalize(s);
            finite_ = std::move(s);
          } else if constexpr (std::is_same_v<T, subset::Arithmetic>) {
            dim_ = k.base.dim();
            require_orthant(k.base);
            require_orthant(k.step);
            if (k.step.is_zero()) throw ConfigError("arithmetic subset needs a nonzero step");
          } else if constexpr (std::is_same_v<T, subset::AxisRay>) {
            dim_ = k.d;
            if (k.d == 0 || k.axis >= k.d) throw ConfigError("axis-ray axis out of range");
            if (k.start < 0) throw ConfigError("axis-ray start must be nonnegative");
          } else if constexpr (std::is_same_v<T, subset::Polynomial>) {
            dim_ = k.direction.dim();
            require_orthant(k.direction);
            if (k.direction.is_zero()) throw ConfigError("polynomial subset needs a nonzero direction");
            bool increasing = false;
            for (std::size_t j = 0; j < k.coeffs.size(); ++j) {
              if (k.coeffs[j] < 0) throw ConfigError("polynomial subset coefficients must be nonnegative");
              if (j > 0 && k.coeffs[j] > 0) increasing = true;
            }
            if (!increasing) throw ConfigError("polynomial subset must be strictly increasing");
          } else if constexpr (std::is_same_v<T, subset::IpSegment>) {
            if (k.generators.empty()) throw ConfigError("IP segment needs generators");
            dim_ = k.generators.front().dim();
            for (const auto& g : k.generators) require_orthant(g);
            finite_ = ip_initial_segment(k.generators, k.generators.size());
          } else {
            dim_ = k.d;
            if (k.d == 0) throw ConfigError("complement subset needs d >= 1");
            for (const auto& g : k.excluded) require_orthant(g);
            auto& ex = std::get<subset::DensityOneComplement>(kind_).excluded;
            std::sort(ex.begin(), ex.end());
            ex.erase(std::unique(ex.begin(), ex.end()), ex.end());
          }
        },
        kind_);
  }

  Kind kind_;
  std::size_t dim_ = 0;
  std::optional<FiniteGroupSet> finite_;
};

struct DensityReport {
  std::vector<std::uint64_t> counts;  // |S ∩ F_n|, index n-1
  std::vector<double> per_n;          // |S ∩ F_n| / |F_n|
  std::int64_t window_from = 1;       // first n of the tail window
  double lower = 0.0;
  double upper = 0.0;
};

/// Densities of S along the boxes; lower/upper are min/max over the last half of rows.
inline DensityReport density(const SubsetGenerator& s, const FolnerSequence& f, std::int64_t n_max) {
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  if (s.dim() != f.dim()) throw ConfigError("subset and Følner dimensions differ");
  DensityReport r;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const auto count = s.intersect_box(n).size();
    r.counts.push_back(count);
    r.per_n.push_back(static_cast<double>(count) / static_cast<double>(f.size(n)));
  }
  r.window_from = n_max / 2 + 1;
  auto first = r.per_n.begin() + (r.window_from - 1);
  r.lower = *std::min_element(first, r.per_n.end());
  r.upper = *std::max_element(first, r.per_n.end());
  return r;
}

}  // namespace seqent

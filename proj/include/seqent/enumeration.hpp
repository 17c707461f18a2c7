#pragma once

// Exact enumeration of symbolic configurations on a finite coordinate domain,
// with product-measure masses, plus the shared budget and row-parallel helper.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "seqent/errors.hpp"
#include "seqent/group.hpp"
#include "seqent/systems.hpp"

namespace seqent {

struct Budget {
  // alphabet^|D| configurations per exact enumeration
  std::uint64_t max_states = std::uint64_t{1} << 24;
  // sets left after reductions that branch-and-bound may still branch on
  std::size_t exact_elements = 30;
  // elements x atoms held while joining covers
  std::uint64_t max_join_work = std::uint64_t{1} << 28;
  // nodes of the exact colouring search used for two-set covers
  std::uint64_t max_search_nodes = std::uint64_t{1} << 24;
};

/// Sorted coordinate domain with position lookup.
class Domain {
 public:
  Domain() = default;
  explicit Domain(FiniteGroupSet coords) : coords_(std::move(coords)) {
    std::sort(coords_.begin(), coords_.end());
    coords_.erase(std::unique(coords_.begin(), coords_.end()), coords_.end());
  }

  std::size_t size() const { return coords_.size(); }
  const FiniteGroupSet& coords() const { return coords_; }

  std::size_t index_of(const GroupElement& g) const {
    auto it = std::lower_bound(coords_.begin(), coords_.end(), g);
    if (it == coords_.end() || *it != g) throw std::out_of_range("coordinate " + g.to_string() + " not in domain");
    return static_cast<std::size_t>(it - coords_.begin());
  }

 private:
  FiniteGroupSet coords_;
};

inline std::uint64_t state_count(const SymbolicSystem& sys, std::size_t coords, const Budget& budget) {
  std::uint64_t states = 1;
  for (std::size_t i = 0; i < coords; ++i) {
    if (__builtin_mul_overflow(states, static_cast<std::uint64_t>(sys.alphabet_size()), &states) ||
        states > budget.max_states)
      throw CapacityError("enumeration over |D| = " + std::to_string(coords) + " coordinates exceeds the budget of " +
                          std::to_string(budget.max_states) + " states");
  }
  return states;
}

// Mass of one configuration: exact numerator (over denominator^|D|) when the
// weights are rational and the denominator power fits, else a float product.
struct ConfigurationWeight {
  unsigned __int128 numerator = 1;
  long double value = 1.0L;
};

/// Accumulates masses exactly when possible, otherwise with Neumaier summation.
class MassAccumulator {
 public:
  void add(const ConfigurationWeight& w) {
    numerator_ += w.numerator;
    add_value(w.value);
  }
  void add_ticks(std::int64_t ticks, long double length) {
    numerator_ += static_cast<unsigned __int128>(ticks);
    add_value(length);
  }

  // denominator > 0 selects the exact numerator.
  double value(long double denominator) const {
    if (denominator > 0) return static_cast<double>(static_cast<long double>(numerator_) / denominator);
    return static_cast<double>(sum_ + comp_);
  }

 private:
  void add_value(long double v) {
    const long double t = sum_ + v;
    comp_ += (std::abs(sum_) >= std::abs(v)) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }

  unsigned __int128 numerator_ = 0;
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

/// Exact denominator q^n for rational weights, or 0 when it would not fit.
inline long double exact_denominator(const SymbolicSystem& sys, std::size_t coords) {
  const auto& ex = sys.exact_weights();
  if (!ex) return 0.0L;
  unsigned __int128 den = 1;
  const unsigned __int128 limit = static_cast<unsigned __int128>(1) << 120;
  for (std::size_t i = 0; i < coords; ++i) {
    den *= ex->denominator;
    if (den > limit) return 0.0L;
  }
  return static_cast<long double>(den);
}

/// Calls f(letters, weight) for every configuration on `coords` positions,
/// in odometer order with the last position fastest.
template <class F>
void for_each_configuration(const SymbolicSystem& sys, std::size_t coords, const Budget& budget, F&& f) {
  const auto states = state_count(sys, coords, budget);
  const auto alphabet = sys.alphabet_size();
  const auto& ex = sys.exact_weights();
  std::vector<std::uint32_t> letters(coords, 0);
  std::vector<unsigned __int128> num_prefix(coords + 1, 1);
  std::vector<long double> val_prefix(coords + 1, 1.0L);
  auto refresh = [&](std::size_t from) {
    for (std::size_t i = from; i < coords; ++i) {
      const auto l = letters[i];
      num_prefix[i + 1] = ex ? num_prefix[i] * ex->numerators[l] : 0;
      val_prefix[i + 1] =
          val_prefix[i] * (ex ? static_cast<long double>(ex->numerators[l]) / ex->denominator : sys.weights()[l]);
    }
  };
  refresh(0);
  for (std::uint64_t k = 0; k < states; ++k) {
    f(static_cast<const std::vector<std::uint32_t>&>(letters), ConfigurationWeight{num_prefix[coords], val_prefix[coords]});
    std::size_t i = coords;
    bool wrapped = true;
    while (i > 0) {
      --i;
      if (++letters[i] < alphabet) {
        wrapped = false;
        break;
      }
      letters[i] = 0;
    }
    if (wrapped) break;
    refresh(i);
  }
}

struct VectorHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::size_t h = v.size();
    for (auto x : v) h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

/// Runs f(i) for i in [0, count) on up to `jobs` threads; results keep index order.
/// Exceptions are captured per index.
template <class R, class F>
std::vector<std::pair<std::optional<R>, std::exception_ptr>> parallel_map(std::size_t count, unsigned jobs, F&& f) {
  std::vector<std::pair<std::optional<R>, std::exception_ptr>> out(count);
  auto run = [&](std::size_t i) {
    try {
      out[i].first.emplace(f(i));
    } catch (...) {
      out[i].second = std::current_exception();
    }
  };
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) run(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const auto workers = std::min<std::size_t>(jobs, count);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) run(i);
    });
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace seqent

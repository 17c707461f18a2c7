#include <gtest/gtest.h>

#include <set>

#include "seqent/group.hpp"

using namespace seqent;

TEST(GroupElement, ArithmeticAndOrder) {
  const GroupElement a{1, -2}, b{3, 4};
  EXPECT_EQ(a + b, (GroupElement{4, 2}));
  EXPECT_EQ(a - a, GroupElement::zero(2));
  EXPECT_EQ(-a, (GroupElement{-1, 2}));
  EXPECT_TRUE(a < b);
  EXPECT_EQ(b.level(), 5);
  EXPECT_THROW(a + GroupElement{1}, ConfigError);
}

TEST(GroupElement, OverflowIsCapacityError) {
  const GroupElement big{std::numeric_limits<std::int64_t>::max()};
  EXPECT_THROW(big + GroupElement{1}, CapacityError);
  EXPECT_THROW(big.scaled(2), CapacityError);
}

TEST(Folner, BoxesInLexicographicOrder) {
  const FolnerSequence f1(1), f2(2);
  EXPECT_EQ(f1.set(3), (FiniteGroupSet{GroupElement{0}, GroupElement{1}, GroupElement{2}}));
  EXPECT_EQ(f2.set(2), (FiniteGroupSet{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
  EXPECT_EQ(f2.set(10).size(), 100u);
  EXPECT_EQ(f2.size(10), 100u);
  EXPECT_THROW(f1.set(0), ConfigError);
}

TEST(Folner, Nested) {
  const FolnerSequence f(3);
  for (std::int64_t n = 1; n < 5; ++n)
    for (const auto& g : f.set(n)) EXPECT_TRUE(f.contains(n + 1, g));
  EXPECT_TRUE(f.contains(1, GroupElement::zero(3)));
}

TEST(Density, Examples) {
  const FolnerSequence f1(1), f2(2);
  const auto evens = SubsetGenerator::arithmetic(GroupElement{0}, GroupElement{2});
  EXPECT_DOUBLE_EQ(density(evens, f1, 100).per_n[99], 0.5);
  const auto column = SubsetGenerator::axis_ray(2, 1);
  EXPECT_DOUBLE_EQ(density(column, f2, 10).per_n[9], 0.1);
  EXPECT_DOUBLE_EQ(density(SubsetGenerator::everything(1), f1, 5).per_n[4], 1.0);
}

TEST(Density, ArithmeticConvergesToInverseStep) {
  const FolnerSequence f(1);
  for (std::int64_t step : {2, 3, 7}) {
    const auto s = SubsetGenerator::arithmetic(GroupElement{1}, GroupElement{step});
    const auto r = density(s, f, 200);
    for (std::size_t i = 0; i < r.per_n.size(); ++i) {
      const double n = static_cast<double>(i + 1);
      EXPECT_LE(std::abs(r.per_n[i] - 1.0 / static_cast<double>(step)), 2.0 / n);
    }
    EXPECT_LE(r.lower, r.upper);
    EXPECT_EQ(r.window_from, 101);
  }
}

TEST(Density, CountsNondecreasingAndBounded) {
  const FolnerSequence f(2);
  const std::vector<SubsetGenerator> gens{
      SubsetGenerator::axis_ray(2, 0, 3), SubsetGenerator::arithmetic(GroupElement{1, 0}, GroupElement{1, 2}),
      SubsetGenerator::complement_of(2, {{0, 0}, {3, 4}}), SubsetGenerator::polynomial({0, 0, 1}, GroupElement{1, 1})};
  for (const auto& s : gens) {
    const auto r = density(s, f, 30);
    for (std::size_t i = 1; i < r.counts.size(); ++i) EXPECT_LE(r.counts[i - 1], r.counts[i]);
    for (double p : r.per_n) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  }
}

TEST(Subset, CanonicalOrderIsFirstHitThenLex) {
  const auto s = SubsetGenerator::explicit_list({{2, 0}, {0, 1}, {1, 1}, {0, 0}, {0, 1}});
  EXPECT_EQ(s.first(10), (FiniteGroupSet{{0, 0}, {0, 1}, {1, 1}, {2, 0}}));
  EXPECT_EQ(SubsetGenerator::everything(2).first(4), (FiniteGroupSet{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
}

TEST(Subset, SquaresAndRays) {
  const auto sq = SubsetGenerator::polynomial({0, 0, 1}, GroupElement{1});
  EXPECT_EQ(sq.first(5), (FiniteGroupSet{GroupElement{0}, GroupElement{1}, GroupElement{4}, GroupElement{9},
                                         GroupElement{16}}));
  EXPECT_EQ(sq.intersect_box(10).size(), 4u);
  const auto ray = SubsetGenerator::axis_ray(2, 1);
  EXPECT_EQ(ray.intersect_box(3), (FiniteGroupSet{{0, 0}, {0, 1}, {0, 2}}));
}

TEST(Subset, RejectsElementsOutsideOrthant) {
  EXPECT_THROW(SubsetGenerator::explicit_list({GroupElement{-1}}), ConfigError);
  EXPECT_THROW(SubsetGenerator::arithmetic(GroupElement{0}, GroupElement{-1}), ConfigError);
  EXPECT_THROW(SubsetGenerator::arithmetic(GroupElement{0}, GroupElement{0}), ConfigError);
}

TEST(IpSegment, Examples) {
  EXPECT_EQ(ip_initial_segment({GroupElement{1}}, 1), (FiniteGroupSet{GroupElement{1}}));
  const auto s = ip_initial_segment({GroupElement{1}, GroupElement{10}, GroupElement{100}}, 3);
  const std::set<std::int64_t> got = [&] {
    std::set<std::int64_t> v;
    for (const auto& g : s) v.insert(g[0]);
    return v;
  }();
  EXPECT_EQ(got, (std::set<std::int64_t>{1, 10, 100, 11, 101, 110, 111}));
  EXPECT_EQ(s.size(), 7u);
  EXPECT_EQ(ip_initial_segment({GroupElement{1}, GroupElement{1}}, 2).size(), 2u);
  EXPECT_THROW(ip_initial_segment({GroupElement{1}}, 2), ConfigError);
}

// Brute-force oracle: all nonempty subset sums by explicit recursion.
static std::set<GroupElement> subset_sums(const std::vector<GroupElement>& p, std::size_t k) {
  std::set<GroupElement> out;
  std::function<void(std::size_t, GroupElement, bool)> rec = [&](std::size_t i, GroupElement acc, bool any) {
    if (i == k) {
      if (any) out.insert(acc);
      return;
    }
    rec(i + 1, acc, any);
    rec(i + 1, acc + p[i], true);
  };
  rec(0, GroupElement::zero(p.front().dim()), false);
  return out;
}

TEST(IpSegment, MatchesBruteForceAndNests) {
  std::vector<GroupElement> pow2, mixed;
  for (std::int64_t i = 0; i < 12; ++i) {
    pow2.push_back(GroupElement{std::int64_t{1} << i});
    mixed.push_back(GroupElement{i % 3, 1 + i * i % 5});
  }
  for (std::size_t k = 1; k <= 12; ++k) {
    const auto a = ip_initial_segment(pow2, k);
    EXPECT_EQ(a.size(), (std::size_t{1} << k) - 1);
    EXPECT_EQ(std::set<GroupElement>(a.begin(), a.end()), subset_sums(pow2, k));
    const auto b = ip_initial_segment(mixed, k);
    EXPECT_EQ(std::set<GroupElement>(b.begin(), b.end()), subset_sums(mixed, k));
    if (k > 1) {
      const auto prev = ip_initial_segment(mixed, k - 1);
      const std::set<GroupElement> now(b.begin(), b.end());
      for (const auto& g : prev) EXPECT_TRUE(now.count(g));
    }
  }
}

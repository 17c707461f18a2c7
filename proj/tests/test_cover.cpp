#include <gtest/gtest.h>

#include <random>

#include "seqent/cover.hpp"

using namespace seqent;

namespace {

const double kLog2 = std::log(2.0);

SymbolicSystem z_shift() { return SymbolicSystem::uniform({AxisAction::shift}, 2); }

OpenSet cyl(std::int64_t at, std::uint32_t letter) { return cylinder_set(GroupElement{at}, letter); }

Cover two_arcs(double a0, double l0, double a1, double l1) {
  return Cover{{ArcUnion{{{a0, l0}}}, ArcUnion{{{a1, l1}}}}};
}

// Second route to N(join): explicit join elements and the hitting-set solver.
std::uint64_t join_then_hitting_set(const System& sys, const Cover& c, const FiniteGroupSet& gens) {
  const auto inc = cover_atoms(sys, c, gens);
  std::vector<std::vector<std::size_t>> groups(gens.size());
  for (std::size_t k = 0; k < gens.size(); ++k)
    for (std::size_t i = 0; i < c.elements.size(); ++i) groups[k].push_back(k * c.elements.size() + i);
  return exact_subcover({inc.atom_count, join_elements(inc, groups)}, 64).size;
}

// Third route, only for tiny instances: every label pattern is a join element.
std::uint64_t all_patterns_oracle(const AtomIncidence& inc, std::size_t translates, std::size_t l) {
  std::vector<Bitset> elems;
  std::size_t total = 1;
  for (std::size_t k = 0; k < translates; ++k) total *= l;
  for (std::size_t code = 0; code < total; ++code) {
    Bitset e(inc.atom_count);
    e.set();
    std::size_t rest = code;
    for (std::size_t k = 0; k < translates; ++k, rest /= l) e &= inc.sets[k * l + rest % l];
    if (e.any()) elems.push_back(e);
  }
  std::size_t best = elems.size();
  const std::size_t m = elems.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    const auto k = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (k >= best) continue;
    Bitset u(inc.atom_count);
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1u) u |= elems[i];
    if (u.all()) best = k;
  }
  return best;
}

}  // namespace

TEST(CoverAtoms, TrivialCover) {
  const System s = z_shift();
  const Cover whole{{CylinderUnion{{CylinderPattern::single(GroupElement{0}, 0), CylinderPattern::single(GroupElement{0}, 1)}}}};
  const auto inc = cover_atoms(s, whole, {GroupElement{0}, GroupElement{3}});
  ASSERT_EQ(inc.sets.size(), 2u);
  for (const auto& e : inc.sets) EXPECT_TRUE(e.all());
}

TEST(CoverAtoms, StandardCoverIncidenceOnTwoCoordinates) {
  const System s = z_shift();
  // {X \ [0 at 0], X \ [1 at 0]} = {[1 at 0], [0 at 0]}
  const Cover c{{cyl(0, 1), cyl(0, 0)}};
  const auto inc = cover_atoms(s, c, {GroupElement{0}, GroupElement{1}});
  ASSERT_EQ(inc.atom_count, 4u);
  ASSERT_EQ(inc.sets.size(), 4u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(inc.sets[2 * k].count(), 2u);
    EXPECT_TRUE((inc.sets[2 * k] & inc.sets[2 * k + 1]).none());
    EXPECT_TRUE((inc.sets[2 * k] | inc.sets[2 * k + 1]).all());
  }
  // the four atoms are the four words on {0, 1}: each pair of choices meets once
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 2; j < 4; ++j) EXPECT_EQ((inc.sets[i] & inc.sets[j]).count(), 1u);
}

TEST(CoverAtoms, CapacityOnLargeDomains) {
  const System s = z_shift();
  Budget b;
  b.max_states = 1u << 8;
  EXPECT_THROW(cover_atoms(s, origin_cylinder_cover(std::get<SymbolicSystem>(s)),
                           SubsetGenerator::everything(1).first(9), b),
               CapacityError);
}

TEST(CoverFlags, Properties) {
  const System s = z_shift();
  const auto f = analyze_cover(s, Cover{{cyl(0, 1), cyl(0, 0)}});
  EXPECT_TRUE(f.covers && f.standard && f.admissible && f.non_trivial);
  const auto g = analyze_cover(s, Cover{{cyl(0, 1), cyl(1, 0)}});
  EXPECT_FALSE(g.covers);
  const System r = RotationSystem(std::vector<double>{0.3});
  const auto h = analyze_cover(r, two_arcs(0.0, 0.6, 0.5, 0.6));
  EXPECT_TRUE(h.covers && h.standard && h.admissible && h.non_trivial);
  const auto k = analyze_cover(r, Cover{{ArcUnion{{{0.0, 0.6}}}, ArcUnion{{{0.5, 0.6}}}, ArcUnion{{{0.1, 0.2}}}}});
  EXPECT_TRUE(k.covers && k.non_trivial);
  EXPECT_FALSE(k.standard);
  EXPECT_FALSE(k.admissible);
  const Cover whole{{CylinderUnion{{CylinderPattern::single(GroupElement{0}, 0), CylinderPattern::single(GroupElement{0}, 1)}},
                     cyl(0, 0)}};
  const auto w = analyze_cover(s, whole);
  EXPECT_TRUE(w.covers);
  EXPECT_FALSE(w.non_trivial);
  EXPECT_FALSE(w.admissible);
}

TEST(TopProfile, ExampleAlongColumnAndBoxes) {
  const System s = SymbolicSystem::uniform({AxisAction::identity, AxisAction::shift}, 2);
  const auto c = origin_cylinder_cover(std::get<SymbolicSystem>(s));
  const FolnerSequence f(2);
  const auto ray = top_seq_entropy_profile(s, c, SubsetGenerator::axis_ray(2, 1), f, n_range(1, 8));
  ASSERT_EQ(ray.rows.size(), 8u);
  for (const auto& r : ray.rows) {
    EXPECT_NEAR(r.normalized, kLog2, 1e-12);
    EXPECT_EQ(*r.cover_number, std::uint64_t{1} << r.n);
  }
  const auto box = top_seq_entropy_profile(s, c, SubsetGenerator::everything(2), f, n_range(1, 4));
  for (const auto& r : box.rows) EXPECT_NEAR(r.normalized, kLog2 / static_cast<double>(r.n), 1e-12);
}

TEST(TopProfile, IrrationalRotationArcBound) {
  const double angle = (3.0 - std::sqrt(5.0)) / 2.0;
  const System s = RotationSystem(std::vector<double>{angle});
  const auto c = two_arcs(0.0, 0.6, 0.5, 0.6);
  const auto p = top_seq_entropy_profile(s, c, SubsetGenerator::everything(1), FolnerSequence(1), n_range(1, 20));
  ASSERT_EQ(p.rows.size(), 20u);
  EXPECT_FALSE(p.truncated);
  for (const auto& r : p.rows) {
    EXPECT_LE(*r.cover_number, static_cast<std::uint64_t>(2 * r.n));
    EXPECT_LE(r.normalized, std::log(2.0 * static_cast<double>(r.n)) / static_cast<double>(r.n) + 1e-12);
  }
  EXPECT_LT(p.rows.back().normalized, 0.2);
}

TEST(TopProfile, ColouringAgreesWithJoinAndHittingSet) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int tested = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const System s = RotationSystem(std::vector<double>{u(rng)});
    const double a0 = u(rng), l0 = 0.5 + 0.4 * u(rng);
    const double a1 = a0 + l0 - 0.05 * u(rng) - 0.01;
    const double l1 = 1.0 - l0 + 0.02 + 0.2 * u(rng);
    const Cover c = two_arcs(a0, l0, std::fmod(a1, 1.0), l1);
    if (!analyze_cover(s, c).covers) continue;
    ++tested;
    for (std::int64_t n = 1; n <= 7; ++n) {
      const auto gens = FolnerSequence(1).set(n);
      const auto viaColour = join_cover_number(s, c, gens, SolverMode::exact).cover_number;
      EXPECT_EQ(viaColour, join_then_hitting_set(s, c, gens));
      if (n <= 3) {
        EXPECT_EQ(viaColour, all_patterns_oracle(cover_atoms(s, c, gens), gens.size(), 2));
      }
    }
  }
  EXPECT_GE(tested, 10);
}

TEST(TopProfile, SymbolicRoutesAgree) {
  const System s = z_shift();
  // overlapping two-set cover: [0 at 0] ∪ [1 at 1] and [1 at 0] ∪ [0 at 1]
  const Cover c{{CylinderUnion{{CylinderPattern::single(GroupElement{0}, 0), CylinderPattern::single(GroupElement{1}, 1)}},
                 CylinderUnion{{CylinderPattern::single(GroupElement{0}, 1), CylinderPattern::single(GroupElement{1}, 0)}}}};
  ASSERT_TRUE(analyze_cover(s, c).covers);
  for (std::int64_t n = 1; n <= 5; ++n) {
    const auto gens = FolnerSequence(1).set(n);
    const auto a = join_cover_number(s, c, gens, SolverMode::exact).cover_number;
    EXPECT_EQ(a, join_then_hitting_set(s, c, gens));
    if (n <= 3) {
      EXPECT_EQ(a, all_patterns_oracle(cover_atoms(s, c, gens), gens.size(), 2));
    }
  }
}

TEST(TopProfile, SubmultiplicativeAndBoundedByLogN) {
  const System s = RotationSystem(std::vector<Rational>{Rational::make(3, 8)});
  const Cover c = two_arcs(0.0, 0.625, 0.5, 0.625);
  const auto n1 = join_cover_number(s, c, {GroupElement{0}}, SolverMode::exact).cover_number;
  for (std::int64_t n = 1; n <= 8; ++n) {
    const auto gens = FolnerSequence(1).set(n);
    const auto a = join_cover_number(s, c, gens, SolverMode::exact).cover_number;
    const auto g = join_cover_number(s, c, gens, SolverMode::greedy).cover_number;
    EXPECT_LE(a, g);
    double bound = 1.0;
    for (std::int64_t i = 0; i < n; ++i) bound *= static_cast<double>(n1);
    EXPECT_LE(static_cast<double>(a), bound);
    // N(U v V) <= N(U) N(V) for U, V the joins over the two halves of gens
    const FiniteGroupSet lo(gens.begin(), gens.begin() + n / 2), hi(gens.begin() + n / 2, gens.end());
    if (!lo.empty()) {
      EXPECT_LE(a, join_cover_number(s, c, lo, SolverMode::exact).cover_number *
                       join_cover_number(s, c, hi, SolverMode::exact).cover_number);
    }
  }
}

TEST(TopProfile, ExactBudgetTruncatesProfile) {
  const System s = z_shift();
  // three-set cover forces the hitting-set route
  const Cover c{{cyl(0, 0), cyl(0, 1), CylinderUnion{{CylinderPattern{{GroupElement{0}, GroupElement{1}}, {0, 1}}}}}};
  ProfileOptions opt;
  opt.budget.max_states = 1u << 6;
  const auto p = top_seq_entropy_profile(s, c, SubsetGenerator::everything(1), FolnerSequence(1), n_range(1, 10),
                                         SolverMode::exact, opt);
  EXPECT_TRUE(p.truncated);
  EXPECT_LT(p.rows.size(), 10u);
  EXPECT_FALSE(p.truncation_reason.empty());
}

TEST(HittingTimes, Examples) {
  const System s = z_shift();
  const FolnerSequence f(1);
  const OpenSet whole = CylinderUnion{{CylinderPattern::single(GroupElement{0}, 0), CylinderPattern::single(GroupElement{0}, 1)}};
  EXPECT_EQ(hitting_times(s, whole, whole, f, 6), f.set(6));
  const auto h = hitting_times(s, cyl(0, 0), cyl(0, 1), f, 10);
  FiniteGroupSet expect;
  for (std::int64_t g = 1; g < 10; ++g) expect.push_back(GroupElement{g});
  EXPECT_EQ(h, expect);
  RotationSystem rot(std::vector<Rational>{Rational::make(1, 4)});
  rot.refine_grid(5);
  const System r = rot;
  const OpenSet u = ArcUnion{{{0.0, 0.1}}}, v = ArcUnion{{{0.5, 0.1}}};
  EXPECT_EQ(hitting_times(r, u, v, f, 8), (FiniteGroupSet{GroupElement{2}, GroupElement{6}}));
}

TEST(HittingTimes, StrongMixingMissesFixedFiniteSet) {
  const System s = z_shift();
  const OpenSet u = CylinderUnion{{CylinderPattern{{GroupElement{0}, GroupElement{1}}, {0, 1}}}};
  const OpenSet v = CylinderUnion{{CylinderPattern{{GroupElement{0}, GroupElement{2}}, {1, 1}}}};
  const FolnerSequence f(1);
  FiniteGroupSet missed_first;
  for (std::int64_t n : {4, 8, 16, 32}) {
    const auto h = hitting_times(s, u, v, f, n);
    FiniteGroupSet missed;
    for (const auto& g : f.set(n))
      if (std::find(h.begin(), h.end(), g) == h.end()) missed.push_back(g);
    if (n == 4) missed_first = missed;
    EXPECT_EQ(missed, missed_first);
  }
  EXPECT_LE(missed_first.size(), 3u);
}

TEST(Intersections, MeasureOfTranslates) {
  const System s = z_shift();
  const auto a = cyl(0, 0);
  const std::vector<PlacedOpenSet> same{{GroupElement{0}, std::cref(a)}, {GroupElement{0}, std::cref(a)}};
  const std::vector<PlacedOpenSet> apart{{GroupElement{0}, std::cref(a)}, {GroupElement{3}, std::cref(a)}};
  EXPECT_DOUBLE_EQ(intersection_measure(s, same), 0.5);
  EXPECT_DOUBLE_EQ(intersection_measure(s, apart), 0.25);
  const System r = RotationSystem(std::vector<Rational>{Rational::make(1, 8)});
  const OpenSet arc = ArcUnion{{{0.0, 0.5}}};
  const std::vector<PlacedOpenSet> rot{{GroupElement{0}, std::cref(arc)}, {GroupElement{1}, std::cref(arc)}};
  EXPECT_DOUBLE_EQ(intersection_measure(r, rot), 0.375);
}

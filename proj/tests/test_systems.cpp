#include <gtest/gtest.h>

#include "seqent/partition.hpp"
#include "seqent/systems.hpp"

using namespace seqent;

namespace {

SymbolicSystem bernoulli(std::vector<AxisAction> axes, std::int64_t p_num, std::int64_t p_den) {
  return SymbolicSystem(std::move(axes), std::vector<Rational>{Rational::make(p_num, p_den),
                                                               Rational::make(p_den - p_num, p_den)});
}

// x as a finite configuration on [lo, hi] of Z, shifted by (g x)_t = x_{t + g}.
std::vector<int> shift_config(const std::vector<int>& x, std::int64_t g) {
  std::vector<int> y(x.size(), -1);
  for (std::size_t t = 0; t < x.size(); ++t) {
    const auto src = static_cast<std::int64_t>(t) + g;
    if (src >= 0 && src < static_cast<std::int64_t>(x.size())) y[t] = x[static_cast<std::size_t>(src)];
  }
  return y;
}

}  // namespace

TEST(Cylinder, Measures) {
  const auto half = SymbolicSystem::uniform({AxisAction::shift}, 2);
  EXPECT_DOUBLE_EQ(cylinder_measure(half, CylinderPattern::single(GroupElement{0}, 1)), 0.5);
  EXPECT_DOUBLE_EQ(cylinder_measure(half, {{GroupElement{0}, GroupElement{1}, GroupElement{5}}, {0, 1, 1}}), 0.125);
  const auto skew = bernoulli({AxisAction::shift}, 1, 5);
  EXPECT_NEAR(cylinder_measure(skew, {{GroupElement{0}, GroupElement{1}, GroupElement{2}}, {0, 1, 1}}), 0.128, 1e-15);
  const SymbolicSystem fl({AxisAction::shift}, std::vector<double>{0.2, 0.8});
  EXPECT_NEAR(cylinder_measure(fl, {{GroupElement{0}, GroupElement{1}, GroupElement{2}}, {0, 1, 1}}), 0.128, 1e-15);
}

TEST(Cylinder, MalformedPatterns) {
  const auto s = SymbolicSystem::uniform({AxisAction::shift}, 2);
  EXPECT_THROW(cylinder_measure(s, CylinderPattern::single(GroupElement{0}, 2)), ConfigError);
  EXPECT_THROW(cylinder_measure(s, {{GroupElement{0}, GroupElement{0}}, {0, 1}}), ConfigError);
  EXPECT_THROW(cylinder_measure(s, {{GroupElement{0}}, {0, 1}}), ConfigError);
}

TEST(Systems, WeightValidation) {
  EXPECT_THROW(SymbolicSystem({AxisAction::shift}, std::vector<double>{0.3, 0.3}), ConfigError);
  EXPECT_THROW(SymbolicSystem({AxisAction::shift}, std::vector<double>{1.0}), ConfigError);
  EXPECT_THROW(SymbolicSystem({AxisAction::shift}, std::vector<Rational>{Rational::make(1, 3), Rational::make(1, 3)}),
               ConfigError);
  EXPECT_THROW(RotationSystem(std::vector<double>{}), ConfigError);
}

TEST(Action, ShiftMovesCoordinateForward) {
  const auto s = SymbolicSystem::uniform({AxisAction::shift}, 2);
  const auto pat = CylinderPattern::single(GroupElement{0}, 1);
  EXPECT_EQ(act_on_pattern(s, GroupElement{0}, pat), pat);
  EXPECT_EQ(act_on_pattern(s, GroupElement{1}, pat), CylinderPattern::single(GroupElement{1}, 1));
}

// g^{-1}[a at 0] = {x : (g x)_0 = a}; enumerate the orbit of a length-3 configuration.
TEST(Action, ConventionAgreesWithOrbitEnumeration) {
  const auto s = SymbolicSystem::uniform({AxisAction::shift}, 2);
  for (int code = 0; code < 8; ++code) {
    const std::vector<int> x{code & 1, (code >> 1) & 1, (code >> 2) & 1};
    const auto gx = shift_config(x, 1);
    const auto pat = act_on_pattern(s, GroupElement{1}, CylinderPattern::single(GroupElement{0}, 1));
    // x is in g^{-1}[1 at 0] iff (g x)_0 = 1 iff x at the translated coordinate is 1
    EXPECT_EQ(gx[0] == 1, x[static_cast<std::size_t>(pat.domain[0][0])] == 1);
  }
}

TEST(Action, IdentityAxisDoesNotMove) {
  const auto s = SymbolicSystem::uniform({AxisAction::identity, AxisAction::shift}, 2);
  const auto pat = CylinderPattern::single(GroupElement{0, 0}, 0);
  EXPECT_EQ(act_on_pattern(s, GroupElement{5, 0}, pat), pat);
  EXPECT_EQ(act_on_pattern(s, GroupElement{5, 2}, pat), CylinderPattern::single(GroupElement{0, 2}, 0));
}

TEST(Action, HomomorphismAndInvariance) {
  const auto s = bernoulli({AxisAction::shift, AxisAction::identity, AxisAction::shift}, 1, 5);
  const CylinderPattern pat{{{0, 0, 0}, {1, 2, 0}, {0, 1, 3}}, {0, 1, 1}};
  const std::vector<GroupElement> gs{{0, 0, 0}, {1, 0, 0}, {0, 4, 1}, {3, 7, 2}, {2, 1, 5}};
  for (const auto& g : gs) {
    EXPECT_EQ(cylinder_measure(s, act_on_pattern(s, g, pat)), cylinder_measure(s, pat));
    for (const auto& h : gs)
      EXPECT_EQ(act_on_pattern(s, g + h, pat), act_on_pattern(s, g, act_on_pattern(s, h, pat)));
  }
}

TEST(Rotation, ArcExamples) {
  const RotationSystem r(std::vector<Rational>{Rational::make(1, 4)});
  EXPECT_EQ(rotate_arc(r, GroupElement{0}, {0.0, 0.5}), (Arc{0.0, 0.5}));
  EXPECT_EQ(rotate_arc(r, GroupElement{1}, {0.0, 0.5}), (Arc{0.75, 0.5}));
  EXPECT_EQ(rotate_arc(r, GroupElement{4}, {0.0, 0.5}), (Arc{0.0, 0.5}));
  EXPECT_THROW(rotate_arc(r, GroupElement{1}, {0.0, 0.0}), ConfigError);
  const RotationSystem f(std::vector<double>{0.25});
  EXPECT_NEAR(rotate_arc(f, GroupElement{1}, {0.0, 0.5}).start, 0.75, 1e-15);
}

TEST(Rotation, PeriodAndHomomorphism) {
  for (std::int64_t q : {3, 5, 7}) {
    const RotationSystem r(std::vector<Rational>{Rational::make(2, q), Rational::make(1, q)});
    const Arc arc{r.from_ticks(1), 0.4};
    EXPECT_EQ(rotate_arc(r, GroupElement{q, 0}, arc), arc);
    EXPECT_EQ(rotate_arc(r, GroupElement{0, q}, arc), arc);
    for (std::int64_t a = -3; a < 4; ++a)
      for (std::int64_t b = 0; b < 4; ++b) {
        const GroupElement g{a, b}, h{b, a};
        EXPECT_EQ(rotate_arc(r, g + h, arc), rotate_arc(r, g, rotate_arc(r, h, arc)));
      }
  }
}

TEST(Rotation, FloatModeHomomorphismWithinSnap) {
  const RotationSystem r(std::vector<double>{std::sqrt(2.0) - 1.0});
  const Arc arc{0.1, 0.3};
  for (std::int64_t a = 0; a < 30; ++a) {
    const auto lhs = rotate_arc(r, GroupElement{a + 7}, arc);
    const auto rhs = rotate_arc(r, GroupElement{a}, rotate_arc(r, GroupElement{7}, arc));
    const double d = std::abs(lhs.start - rhs.start);
    EXPECT_LT(std::min(d, 1.0 - d), 1e-12);
  }
}

TEST(Rotation, ExactGridRefinement) {
  RotationSystem r(std::vector<Rational>{Rational::make(1, 3)});
  EXPECT_EQ(r.grid(), 3);
  EXPECT_FALSE(r.on_grid(0.2));
  r.refine_grid(5);
  EXPECT_EQ(r.grid(), 15);
  EXPECT_TRUE(r.on_grid(0.2));
  EXPECT_EQ(r.offset_ticks(GroupElement{1}), 5);
}

TEST(Rational, Parsing) {
  EXPECT_EQ(Rational::parse("2/4").num, 1);
  EXPECT_EQ(Rational::parse("2/4").den, 2);
  EXPECT_EQ(Rational::parse("0.125").den, 8);
  EXPECT_EQ(Rational::parse("-3").num, -3);
  EXPECT_THROW(Rational::parse("1/0"), ConfigError);
  EXPECT_THROW(Rational::parse("abc"), ConfigError);
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "coord/item_functions.hpp"
#include "coord/samplers.hpp"
#include "support.hpp"

using namespace coord;
using coord::testing::random_triple;
using coord::testing::reference_lower_bound;

TEST(ItemFunction, Evaluation) {
  EXPECT_EQ(eval(ItemFunction::range(2), {1, 3}), 4.0);
  EXPECT_EQ(eval(ItemFunction::max(), {2, 3}), 3.0);
  EXPECT_EQ(eval(ItemFunction::min(), {2, 3}), 2.0);
  EXPECT_EQ(eval(ItemFunction::one_sided_range(2), {1, 0}), 1.0);
  EXPECT_EQ(eval(ItemFunction::one_sided_range(2), {0, 1}), 0.0);
  EXPECT_EQ(eval(ItemFunction::logical_or(), {0, 0.2}), 1.0);
  EXPECT_EQ(eval(ItemFunction::logical_or(), {0, 0}), 0.0);
}

TEST(ItemFunction, ParseAndPrint) {
  const ItemFunction f = ItemFunction::parse("one_sided_rg:p=2,hi=2,lo=1");
  EXPECT_EQ(f.kind, FunctionKind::kOneSidedRange);
  EXPECT_EQ(f.hi, 1u);
  EXPECT_EQ(f.lo, 0u);
  EXPECT_EQ(ItemFunction::parse(f.to_string()).to_string(), f.to_string());
  EXPECT_EQ(ItemFunction::parse("rg:p=2").power, 2.0);
  EXPECT_EQ(ItemFunction::parse("or").kind, FunctionKind::kOr);
  EXPECT_THROW(ItemFunction::parse("median"), Error);
  EXPECT_THROW(ItemFunction::parse("rg:q=2"), Error);
  EXPECT_THROW(ItemFunction::one_sided_range(2, 0, 3).check_arity(2), Error);
}

TEST(LowerBound, PaperOneSidedClosedForms) {
  const ItemFunction f = ItemFunction::one_sided_range(2);
  const TauScheme s = TauScheme::pps_uniform(2, 1);
  // Only entry 1 sampled at rho: lb(x) = max(0, v1 - x)^2.
  const Outcome first{Seed(0.2), {Slot::sampled(0.7), Slot::unknown(0.2)}};
  // Both sampled: lb(x) = max(0, v1 - max(v2, x))^2.
  const Outcome both{Seed(0.2), {Slot::sampled(0.9), Slot::sampled(0.3)}};
  for (int k = 0; k <= 80; ++k) {
    const double x = 0.2 + 0.01 * k;
    const double lb1 = x <= 0.7 ? std::pow(std::max(0.0, 0.7 - x), 2) : 0.0;
    const double lb2 = x <= 0.9 ? std::pow(std::max(0.0, 0.9 - std::max(0.3, x)), 2) : 0.0;
    EXPECT_NEAR(lower_bound(f, first, s, Seed(x)), lb1, 1e-15) << x;
    EXPECT_NEAR(lower_bound(f, both, s, Seed(x)), lb2, 1e-15) << x;
  }
}

TEST(LowerBound, MaxWithUnknownBelowKnown) {
  const TauScheme s = TauScheme::pps_uniform(2, 4);
  const Outcome o{Seed(0.5), {Slot::unknown(2), Slot::sampled(3)}};
  EXPECT_EQ(lower_bound(ItemFunction::max(), o, s, Seed(0.5)), 3.0);
  const Outcome none{Seed(0.5), {Slot::unknown(2), Slot::unknown(2)}};
  EXPECT_EQ(lower_bound(ItemFunction::max(), none, s, Seed(0.5)), 0.0);
  EXPECT_THROW(lower_bound(ItemFunction::max(), o, s, Seed(0.25)), Error);
}

TEST(LowerBound, MatchesReferenceOnRandomVectors) {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 300; ++n) {
    const auto t = random_triple(rng);
    for (int k = 1; k <= 40; ++k) {
      const double x = k / 40.0;
      EXPECT_NEAR(lower_bound(t.f, t.v, t.scheme, x), reference_lower_bound(t.f, t.v, t.scheme, x),
                  1e-12)
          << t.f.to_string() << " x=" << x;
    }
  }
}

TEST(LowerBound, DependsOnlyOnOutcome) {
  // Every vector consistent with the outcome at rho has the same lb on [rho, 1].
  std::mt19937_64 rng(8);
  for (int n = 0; n < 200; ++n) {
    const auto t = random_triple(rng);
    const Seed rho(coord::testing::uniform(rng, 0.05, 1.0));
    const Outcome o = sample_item(t.v, rho, t.scheme);
    std::vector<double> z(t.v.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = o.slots[i].known ? o.slots[i].value : coord::testing::uniform(rng, 0.0, 1.0) * o.slots[i].value;
    }
    const DataVector other(z);
    ASSERT_TRUE(is_consistent(o, other, t.scheme));
    for (int k = 0; k <= 10; ++k) {
      const double x = rho.value() + (1.0 - rho.value()) * k / 10.0;
      EXPECT_NEAR(lower_bound(t.f, t.v, t.scheme, x), lower_bound(t.f, other, t.scheme, x), 1e-12);
    }
  }
}

TEST(LowerBoundFn, PiecewiseMatchesPointwise) {
  std::mt19937_64 rng(9);
  for (int n = 0; n < 200; ++n) {
    const auto t = random_triple(rng);
    const LowerBoundFn lb = lower_bound_fn(t.f, t.v, t.scheme);
    double prev = kInf;
    for (int k = 1; k <= 500; ++k) {
      const double x = k / 500.0;
      const double direct = lower_bound(t.f, t.v, t.scheme, x);
      EXPECT_NEAR(lb(x), direct, 1e-9 * (1.0 + direct)) << t.f.to_string() << " x=" << x;
      EXPECT_LE(lb(x), prev + 1e-12);
      prev = lb(x);
    }
    // Left-continuity at each breakpoint.
    for (double b : lb.breakpoints()) {
      if (b >= 1.0 || b <= 1e-9) continue;
      EXPECT_NEAR(lb(b), lb(b * (1.0 - 1e-12)), 1e-6 * (1.0 + lb(b)));
    }
    EXPECT_NEAR(lb.limit_at_zero(), eval(t.f, t.v), 1e-12);
  }
}

TEST(LowerBoundFn, ExamplePieces) {
  const LowerBoundFn one = lower_bound_fn(ItemFunction::one_sided_range(2), {1, 0},
                                          TauScheme::pps_uniform(2, 1));
  for (double x : {0.1, 0.5, 0.9, 1.0}) EXPECT_NEAR(one(x), (1 - x) * (1 - x), 1e-15);
  const LowerBoundFn mx = lower_bound_fn(ItemFunction::max(), {1, 3}, TauScheme::pps_uniform(2, 4));
  EXPECT_EQ(mx(0.75), 3.0);
  EXPECT_EQ(mx(0.7500001), 0.0);
  EXPECT_TRUE(mx.constant_near_zero());
  const Outcome none{Seed(0.9), {Slot::unknown(3.6), Slot::unknown(3.6)}};
  const LowerBoundFn empty = lb_breakpoints(ItemFunction::max(), none, TauScheme::pps_uniform(2, 4));
  EXPECT_EQ(empty(0.95), 0.0);
}

TEST(BruteForce, AgreesOnExamples) {
  const TauScheme s = TauScheme::pps_uniform(2, 1);
  const Domain box = Domain::box(2, 0.0, 1.0);
  const Outcome known{Seed(0.1), {Slot::sampled(0.5), Slot::sampled(0.2)}};
  for (std::size_t g : {4u, 64u}) {
    EXPECT_EQ(brute_force_lower_bound(ItemFunction::range(2), known, s, box, Seed(0.1), g),
              eval(ItemFunction::range(2), {0.5, 0.2}));
  }
  const Outcome first{Seed(0.5), {Slot::sampled(1.0), Slot::unknown(0.5)}};
  EXPECT_NEAR(brute_force_lower_bound(ItemFunction::one_sided_range(2), first, s, box, Seed(0.5),
                                      256),
              0.25, 1.0 / 256);
  const TauScheme s4 = TauScheme::pps_uniform(2, 4);
  const Outcome none{Seed(0.5), {Slot::unknown(2), Slot::unknown(2)}};
  EXPECT_EQ(brute_force_lower_bound(ItemFunction::max(), none, s4, Domain::box(2, 0, 4), Seed(0.5), 32),
            0.0);
  EXPECT_THROW(brute_force_lower_bound(ItemFunction::max(), none, s4, Domain::nonnegative(2),
                                       Seed(0.5), 32),
               Error);
}

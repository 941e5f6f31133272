#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "coord/analysis.hpp"
#include "coord/hull.hpp"
#include "support.hpp"

using namespace coord;
namespace t = coord::testing;

TEST(LowerHull, Examples) {
  const LowerHull h = lower_hull({{0.25, 0.5}, {0.5, 0.9}, {1, 1}});
  EXPECT_EQ(h.vertices(), (std::vector<HullPoint>{{0.25, 0.5}, {1, 1}}));
  const LowerHull line = lower_hull({{0, 0}, {0.5, 1}, {1, 2}, {0.25, 0.5}});
  EXPECT_EQ(line.vertices(), (std::vector<HullPoint>{{0, 0}, {1, 2}}));
  EXPECT_EQ(lower_hull({{0, 1}, {1, 0}}).vertices().size(), 2u);
  EXPECT_THROW(lower_hull({{0.5, 1}, {0.5, 0}}), Error);
  // Duplicate u keeps the smaller value.
  EXPECT_EQ(lower_hull({{0, 1}, {0, 0}, {1, 0}}).vertices().front().value, 0.0);
}

TEST(LowerHull, MatchesExhaustiveHull) {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 300; ++n) {
    std::vector<HullPoint> pts;
    std::vector<t::Point> ref;
    const int m = 2 + static_cast<int>(rng() % 12);
    for (int k = 0; k < m; ++k) {
      // Coarse coordinates so ties and collinear triples occur.
      const double u = static_cast<double>(rng() % 9) / 8.0;
      const double value = static_cast<double>(rng() % 7) / 4.0;
      pts.push_back({u, value});
      ref.push_back({u, value});
    }
    std::sort(ref.begin(), ref.end(), [](auto& a, auto& b) { return a.u < b.u || (a.u == b.u && a.value < b.value); });
    ref.erase(std::unique(ref.begin(), ref.end(), [](auto& a, auto& b) { return a.u == b.u; }), ref.end());
    if (ref.size() < 2) {
      EXPECT_THROW(lower_hull(pts), Error);
      continue;
    }
    const auto expect = t::brute_force_hull(ref);
    const auto got = lower_hull(pts).vertices();
    ASSERT_EQ(got.size(), expect.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      EXPECT_EQ(got[k].u, expect[k].u);
      EXPECT_EQ(got[k].value, expect[k].value);
    }
  }
}

TEST(IntegrateSquare, Examples) {
  EXPECT_NEAR(integrate_square({EstimateKind::kVOptimal, {{0, 1, 3.0, {}}}}), 9.0, 1e-15);
  EstimateFn lin{EstimateKind::kVOptimal, {{0, 1, 0, [](double u) { return 2 * (1 - u); }}}};
  EXPECT_NEAR(integrate_square(lin), 4.0 / 3.0, 1e-9);
  // Dyadic J pieces of the worked example against a direct sum.
  const EstimateFn j = j_estimate_fn({1, 0}, ItemFunction::one_sided_range(2),
                                     TauScheme::pps_uniform(2, 1), 40);
  double direct = 0.0;
  for (int k = 0; k < 40; ++k) {
    const double a = t::one_sided_lb(1, 0, 1, 1, std::ldexp(1.0, -k));
    const double b = k == 0 ? 0.0 : t::one_sided_lb(1, 0, 1, 1, std::ldexp(1.0, 1 - k));
    const double value = std::ldexp(a - b, k + 1);
    direct += std::ldexp(1.0, -k - 1) * value * value;
    if (k == 0) EXPECT_EQ(direct, 0.0);
    if (k == 1) EXPECT_EQ(direct, 0.25);
  }
  EXPECT_NEAR(integrate_square(j), direct, 1e-12);
}

TEST(IntegrateSquare, DivergentTailIsInfinite) {
  EstimateFn e{EstimateKind::kVOptimal, {}};
  // sqrt(1/u) pieces: each geometric cell contributes the same amount.
  for (int k = 60; k >= 0; --k) {
    const double a = std::ldexp(1.0, -k - 1);
    const double b = std::ldexp(1.0, -k);
    e.pieces.push_back({a, b, std::sqrt(1.0 / a), {}});
  }
  EXPECT_TRUE(std::isinf(integrate_square(e)));
}

TEST(Checks, BuiltInExamples) {
  const DataVector v{1, 0};
  const auto f = ItemFunction::one_sided_range(2);
  const auto s = TauScheme::pps_uniform(2, 1);
  EXPECT_TRUE(check_estimable(v, f, s).ok);
  const BoundedCheck b = check_bounded(v, f, s);
  EXPECT_TRUE(b.ok);
  EXPECT_NEAR(b.sup, 2.0, 1e-5);
  const FiniteVarianceCheck fv = check_finite_variance(v, f, s);
  EXPECT_TRUE(fv.ok);
  EXPECT_NEAR(fv.integral, 4.0 / 3.0, 1e-3);

  const auto mx = ItemFunction::max();
  const auto s4 = TauScheme::pps_uniform(2, 4);
  EXPECT_TRUE(check_estimable({1, 3}, mx, s4).ok);
  EXPECT_TRUE(check_bounded({1, 3}, mx, s4).ok);
  EXPECT_EQ(check_bounded({1, 3}, mx, s4).sup, 0.0);
  const FiniteVarianceCheck zero = check_finite_variance({0, 0}, mx, s4);
  EXPECT_TRUE(zero.ok);
  EXPECT_EQ(zero.integral, 0.0);
}

TEST(Checks, SyntheticCounterexamples) {
  const LowerBoundFn persistent = LowerBoundFn::from_callable([](double) { return 0.5; });
  const EstimableCheck e = check_estimable(persistent, 1.0);
  EXPECT_FALSE(e.ok);
  EXPECT_NEAR(e.gap, 0.5, 1e-12);
  EXPECT_FALSE(check_finite_variance(persistent, 1.0).ok);
  EXPECT_FALSE(check_bounded(persistent, 1.0).ok);

  const LowerBoundFn root = LowerBoundFn::from_callable([](double u) { return 1.0 - std::sqrt(u); });
  EXPECT_TRUE(check_estimable(root, 1.0).ok);
  EXPECT_FALSE(check_bounded(root, 1.0).ok);
  EXPECT_FALSE(check_finite_variance(root, 1.0).ok);

  const LowerBoundFn mid = LowerBoundFn::from_callable([](double u) { return 1.0 - std::pow(u, 0.75); });
  EXPECT_TRUE(check_estimable(mid, 1.0).ok);
  EXPECT_FALSE(check_bounded(mid, 1.0).ok);
  EXPECT_TRUE(check_finite_variance(mid, 1.0).ok);
}

TEST(Competitiveness, Examples) {
  const AnalysisReport one = competitiveness_ratio({1, 0}, ItemFunction::one_sided_range(2),
                                                   TauScheme::pps_uniform(2, 1));
  EXPECT_LE(one.ratio_upper, 84.0);
  EXPECT_NEAR(one.square_integral_opt, 4.0 / 3.0, 1e-5);
  EXPECT_NEAR(one.variance_opt, 1.0 / 3.0, 1e-5);
  EXPECT_NEAR(one.variance_j, one.square_integral_j - 1.0, 1e-12);

  const AnalysisReport mx = competitiveness_ratio({1, 3}, ItemFunction::max(), TauScheme::pps_uniform(2, 4));
  EXPECT_LE(mx.ratio, 84.0);
  EXPECT_NEAR(mx.ratio, mx.square_integral_j / mx.square_integral_opt, 1e-15);

  const AnalysisReport zero = competitiveness_ratio({0, 0}, ItemFunction::max(), TauScheme::pps_uniform(2, 4));
  EXPECT_EQ(zero.ratio, 1.0);
  EXPECT_EQ(zero.square_integral_j, 0.0);
  EXPECT_TRUE(zero.estimable);
}

TEST(Competitiveness, RefinementConverges) {
  std::mt19937_64 rng(13);
  for (int n = 0; n < 20; ++n) {
    const auto tr = t::random_triple(rng, false);
    const double a = competitiveness_ratio(tr.v, tr.f, tr.scheme, 1024).square_integral_opt;
    const double b = competitiveness_ratio(tr.v, tr.f, tr.scheme, 2048).square_integral_opt;
    EXPECT_NEAR(a, b, 1e-4 * std::max(1.0, std::fabs(a))) << tr.f.to_string();
  }
}

TEST(Variance, Examples) {
  const DataVector v{1, 3};
  const auto s = TauScheme::pps_uniform(2, 4);
  EXPECT_NEAR(variance(v, ItemFunction::max(), s, EstimatorKind::kHt), 3.0, 1e-12);
  EXPECT_GE(variance(v, ItemFunction::max(), s, EstimatorKind::kJ),
            variance(v, ItemFunction::max(), s, EstimatorKind::kVOptimalOracle));
  EXPECT_EQ(variance_of({EstimateKind::kVOptimal, {{0, 1, 2.0, {}}}}, 2.0), 0.0);
}

TEST(PlotCsv, Columns) {
  std::ostringstream os;
  write_plot_csv(os, {1, 0}, ItemFunction::one_sided_range(2), TauScheme::pps_uniform(2, 1), 256, 10);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "u,lb,H,J,vopt");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 10);
}

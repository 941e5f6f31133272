#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "coord/samplers.hpp"

using namespace coord;

namespace {

InstanceSet fig1() {
  InstanceSet d(2);
  const double a[] = {1, 0, 4, 1, 0, 2, 3, 1};
  const double b[] = {3, 2, 1, 0, 2, 3, 1, 0};
  for (int h = 0; h < 8; ++h) d.add(std::to_string(h + 1), {a[h], b[h]});
  return d;
}

}  // namespace

TEST(SampleItem, ThresholdRule) {
  const TauScheme s = TauScheme::pps_uniform(2, 4);
  const Outcome o = sample_item({1, 3}, Seed(0.5), s);
  EXPECT_EQ(o.slots[0], Slot::unknown(2.0));
  EXPECT_EQ(o.slots[1], Slot::sampled(3));
  const Outcome tie = sample_item({4, 1}, Seed(1.0), s);
  EXPECT_EQ(tie.slots[0], Slot::sampled(4));
  EXPECT_EQ(tie.slots[1], Slot::unknown(4.0));
  for (double u : {0.01, 0.3, 0.9, 1.0}) {
    EXPECT_FALSE(sample_item({0, 1}, Seed(u), s).slots[0].known);
  }
}

TEST(SampleItem, Fig1ItemOneIsNestedAcrossInstances) {
  const TauScheme s = TauScheme::pps_uniform(2, 4);
  for (int k = 1; k <= 1000; ++k) {
    const Outcome o = sample_item({1, 3}, Seed(k / 1000.0), s);
    if (o.slots[0].known) EXPECT_TRUE(o.slots[1].known);
  }
}

TEST(SampleInstances, Fig1InclusionFrequencies) {
  const InstanceSet d = fig1();
  const TauScheme s = TauScheme::pps_uniform(2, 4);
  const double p1[] = {0.25, 0, 1, 0.25, 0, 0.5, 0.75, 0.25};
  const double p2[] = {0.75, 0.5, 0.25, 0, 0.5, 0.75, 0.25, 0};
  for (int h = 0; h < 8; ++h) {
    EXPECT_EQ(pps_inclusion_probability(d.row(h)[0], 4), p1[h]);
    EXPECT_EQ(pps_inclusion_probability(d.row(h)[1], 4), p2[h]);
  }
  const int reps = 100000;
  std::vector<double> hits(16, 0.0);
  for (int salt = 0; salt < reps; ++salt) {
    const auto samples = sample_instances(d, s, salt);
    for (int h = 0; h < 8; ++h) {
      hits[2 * h] += samples[h].outcome.slots[0].known;
      hits[2 * h + 1] += samples[h].outcome.slots[1].known;
    }
  }
  for (int h = 0; h < 8; ++h) {
    EXPECT_NEAR(hits[2 * h] / reps, p1[h], 0.01) << "item " << h + 1;
    EXPECT_NEAR(hits[2 * h + 1] / reps, p2[h], 0.01) << "item " << h + 1;
  }
}

TEST(SampleInstances, MatchesPerItemRuleWithPiecewiseScheme) {
  InstanceSet d(2);
  d.add("a", {0.7, 2.0});
  d.add("b", {3.0, 0.1});
  const TauScheme s({TauMap(PiecewiseTau{{0, 0.5, 1}, {0, 1, 4}}), TauMap(PpsTau{2.5})});
  for (std::uint64_t salt = 0; salt < 200; ++salt) {
    for (const ItemSample& item : sample_instances(d, s, salt)) {
      const auto k = static_cast<std::size_t>(d.index_of(item.id));
      EXPECT_EQ(item.outcome, sample_item(d.row(k), item.outcome.seed, s));
      EXPECT_NO_THROW(item.outcome.validate(s));
    }
  }
}

TEST(Ranks, Values) {
  EXPECT_EQ(rank_value({RankKind::kPps}, Seed(0.25), 2), 8.0);
  EXPECT_NEAR(rank_value({RankKind::kExp}, Seed(std::exp(-1.0)), 3), 3.0, 1e-12);
  for (double u : {0.1, 0.5, 1.0}) EXPECT_EQ(rank_value({RankKind::kPps}, Seed(u), 0), 0.0);
}

TEST(Ranks, PpsRankMonotone) {
  double prev = kInf;
  for (int k = 1; k <= 100; ++k) {
    const double r = rank_value({RankKind::kPps}, Seed(k / 100.0), 2.0);
    EXPECT_LE(r, prev);
    prev = r;
    EXPECT_LE(rank_value({RankKind::kPps}, Seed(k / 100.0), 1.0), r);
  }
}

TEST(BottomK, MembersAndConditionalThresholds) {
  // Seeds chosen so that PPS ranks are a:5, b:3, c:2, d:1.
  const double values[] = {5, 3, 2, 1};
  const double seeds[] = {1, 1, 1, 1};
  const BottomKSample s = bottomk_from_seeds(values, seeds, 2, {RankKind::kPps});
  ASSERT_EQ(s.members.size(), 2u);
  EXPECT_EQ(s.members[0].item, 0u);
  EXPECT_EQ(s.members[1].item, 1u);
  EXPECT_EQ(s.members[0].conditional_threshold, 2.0);
  EXPECT_EQ(s.kth_rank, 3.0);
  for (const auto& m : s.members) EXPECT_LE(m.conditional_threshold, m.rank);
  EXPECT_THROW(bottomk_from_seeds(values, seeds, 4, {RankKind::kPps}), Error);
  EXPECT_THROW(bottomk_from_seeds(values, seeds, 0, {RankKind::kPps}), Error);
}

TEST(BottomK, TiesBrokenByIndex) {
  const double values[] = {2, 2, 2, 1};
  const double seeds[] = {1, 1, 1, 1};
  const BottomKSample s = bottomk_from_seeds(values, seeds, 2, {RankKind::kPps});
  EXPECT_EQ(s.members[0].item, 0u);
  EXPECT_EQ(s.members[1].item, 1u);
}

TEST(BottomK, OutcomesUsePerItemThresholds) {
  const InstanceSet d = fig1();
  const auto samples = bottomk_outcomes(d, 3, {RankKind::kPps}, 5);
  ASSERT_FALSE(samples.empty());
  for (const ItemSample& s : samples) {
    EXPECT_NO_THROW(s.outcome.validate(s.scheme));
    EXPECT_TRUE(s.scheme.map(0).is_pps());
  }
  // Every sampled entry is exactly a bottom-k member of its instance.
  for (std::size_t i = 0; i < 2; ++i) {
    const auto bk = bottomk_sample(d.column(i), d.ids(), 3, {RankKind::kPps}, 5);
    std::size_t known = 0;
    for (const ItemSample& s : samples) known += s.outcome.slots[i].known;
    EXPECT_EQ(known, bk.members.size());
  }
  EXPECT_THROW(bottomk_outcomes(d, 3, {RankKind::kExp}, 5), Error);
}

#include "coord/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coord/kernels.hpp"

namespace coord {

Outcome sample_item(const DataVector& v, Seed u, const TauScheme& scheme) {
  if (v.size() != scheme.size()) throw Error("sample_item: arity mismatch");
  Outcome out{u, {}};
  out.slots.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double t = scheme.map(i).at(u.value());
    out.slots.push_back(v[i] >= t ? Slot::sampled(v[i]) : Slot::unknown(t));
  }
  return out;
}

std::vector<ItemSample> sample_instances(const InstanceSet& data, const TauScheme& scheme,
                                         std::uint64_t salt) {
  if (data.instances() != scheme.size()) throw Error("sample_instances: arity mismatch");
  const std::size_t n = data.items();
  std::vector<double> seeds(n);
  for (std::size_t h = 0; h < n; ++h) seeds[h] = hash_seed(data.id(h), salt).value();

  std::vector<ItemSample> out(n);
  for (std::size_t h = 0; h < n; ++h) {
    out[h].id = data.id(h);
    out[h].outcome.seed = Seed(seeds[h]);
    out[h].outcome.slots.resize(data.instances());
    out[h].scheme = scheme;
  }

  std::vector<std::uint8_t> mask(n);
  for (std::size_t i = 0; i < data.instances(); ++i) {
    const TauMap& tau = scheme.map(i);
    const std::vector<double> column = data.column(i);
    if (tau.is_pps()) {
      kernels::sampled_mask(column, seeds, tau.tau_star(), mask);
    } else {
      for (std::size_t h = 0; h < n; ++h) mask[h] = column[h] >= tau.at(seeds[h]) ? 1 : 0;
    }
    for (std::size_t h = 0; h < n; ++h) {
      out[h].outcome.slots[i] =
          mask[h] ? Slot::sampled(column[h]) : Slot::unknown(tau.at(seeds[h]));
    }
  }
  return out;
}

double pps_inclusion_probability(double v, double tau_star) {
  return std::min(1.0, v / tau_star);
}

double rank_value(RankFunction rf, Seed u, double v) {
  if (rf.kind == RankKind::kPps) return v / u.value();
  if (v == 0.0) return 0.0;
  if (u.value() == 1.0) return kInf;
  return -v / std::log(u.value());
}

double rank_inclusion_probability(RankFunction rf, double v, double threshold) {
  if (v <= 0.0) return 0.0;
  if (threshold <= 0.0) return 1.0;
  if (rf.kind == RankKind::kPps) return std::min(1.0, v / threshold);
  // -v / ln u >= T  <=>  u >= exp(-v / T)
  return 1.0 - std::exp(-v / threshold);
}

BottomKSample bottomk_from_seeds(std::span<const double> values,
                                 std::span<const double> seeds, std::size_t k,
                                 RankFunction rf) {
  const std::size_t n = values.size();
  if (seeds.size() != n) throw Error("bottomk: seeds and values differ in length");
  if (k == 0) throw Error("bottomk: k must be positive");
  if (k >= n) throw Error("bottomk: k must be smaller than the number of items");

  std::vector<double> ranks(n);
  if (rf.kind == RankKind::kPps) {
    kernels::pps_ranks(values, seeds, ranks);
  } else {
    for (std::size_t h = 0; h < n; ++h) ranks[h] = rank_value(rf, Seed(seeds[h]), values[h]);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ranks[a] > ranks[b]; });

  BottomKSample s;
  s.k = k;
  s.kth_rank = ranks[order[k - 1]];
  s.k1th_rank = ranks[order[k]];
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t h = order[j];
    s.members.push_back({h, values[h], ranks[h], s.k1th_rank});
  }
  return s;
}

BottomKSample bottomk_sample(std::span<const double> values,
                             const std::vector<std::string>& ids, std::size_t k,
                             RankFunction rf, std::uint64_t salt) {
  if (ids.size() != values.size()) throw Error("bottomk: ids and values differ in length");
  std::vector<double> seeds(ids.size());
  for (std::size_t h = 0; h < ids.size(); ++h) seeds[h] = hash_seed(ids[h], salt).value();
  return bottomk_from_seeds(values, seeds, k, rf);
}

std::vector<ItemSample> bottomk_outcomes(const InstanceSet& data, std::size_t k,
                                         RankFunction rf, std::uint64_t salt) {
  if (rf.kind != RankKind::kPps) {
    throw Error("bottom-k estimation requires PPS ranks");
  }
  const std::size_t n = data.items();
  const std::size_t r = data.instances();
  std::vector<double> seeds(n);
  for (std::size_t h = 0; h < n; ++h) seeds[h] = hash_seed(data.id(h), salt).value();

  // thresholds[h][i]: conditional threshold of item h in instance i.
  std::vector<std::vector<double>> thresholds(n, std::vector<double>(r));
  std::vector<char> touched(n, 0);
  for (std::size_t i = 0; i < r; ++i) {
    const std::vector<double> column = data.column(i);
    const std::size_t positive = static_cast<std::size_t>(
        std::count_if(column.begin(), column.end(), [](double x) { return x > 0.0; }));
    if (k >= positive) {
      throw Error("bottom-k: k must be smaller than the number of positive items in instance " +
                  std::to_string(i + 1));
    }
    const BottomKSample s = bottomk_from_seeds(column, seeds, k, rf);
    for (std::size_t h = 0; h < n; ++h) thresholds[h][i] = s.kth_rank;
    for (const auto& m : s.members) {
      thresholds[m.item][i] = m.conditional_threshold;
      touched[m.item] = 1;
    }
  }

  std::vector<ItemSample> out;
  for (std::size_t h = 0; h < n; ++h) {
    if (!touched[h]) continue;
    TauScheme scheme = TauScheme::pps(thresholds[h]);
    Outcome o = sample_item(data.row(h), Seed(seeds[h]), scheme);
    out.push_back({data.id(h), std::move(o), std::move(scheme)});
  }
  return out;
}

}  // namespace coord

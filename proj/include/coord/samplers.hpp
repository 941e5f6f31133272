#pragma once

// Coordinated Poisson sampling of items across instances, rank functions,
// and bottom-k samples reduced to per-item Poisson outcomes by rank
// conditioning.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coord/core.hpp"

namespace coord {

/// Entry i is sampled iff v_i >= tau_i(u); the seed travels with the outcome.
Outcome sample_item(const DataVector& v, Seed u, const TauScheme& scheme);

/// One sampled item: its id, its outcome and the scheme that produced it.
/// Poisson samples share one scheme; rank-conditioned bottom-k samples carry
/// a per-item PPS scheme with tau_star equal to the conditional threshold.
struct ItemSample {
  std::string id;
  Outcome outcome;
  TauScheme scheme;
};

/// Hashes a seed per item id and samples every item of every instance.
std::vector<ItemSample> sample_instances(const InstanceSet& data, const TauScheme& scheme,
                                         std::uint64_t salt);

/// Inclusion probability min{1, v / tau_star} of a PPS entry.
double pps_inclusion_probability(double v, double tau_star);

enum class RankKind { kPps, kExp };

struct RankFunction {
  RankKind kind = RankKind::kPps;
};

/// v/u for PPS ranks; -v/ln(u) for exponential ranks, which is +inf at u = 1
/// for v > 0 and 0 for v = 0.
double rank_value(RankFunction rf, Seed u, double v);

/// Probability over the item's own seed that its rank reaches `threshold`.
double rank_inclusion_probability(RankFunction rf, double v, double threshold);

struct BottomKMember {
  std::size_t item = 0;  // index into the instance's item list
  double value = 0.0;
  double rank = 0.0;
  /// k-th largest rank among all other items, i.e. the (k+1)-st overall.
  double conditional_threshold = 0.0;
};

struct BottomKSample {
  std::size_t k = 0;
  std::vector<BottomKMember> members;  // by decreasing rank
  double kth_rank = 0.0;               // threshold seen by non-members
  double k1th_rank = 0.0;              // (k+1)-st largest rank
};

/// Bottom-k sample of one instance from precomputed seeds. Ties are broken
/// by item index ascending.
BottomKSample bottomk_from_seeds(std::span<const double> values,
                                 std::span<const double> seeds, std::size_t k,
                                 RankFunction rf);

/// Bottom-k sample of one instance with seeds hashed from item ids.
BottomKSample bottomk_sample(std::span<const double> values,
                             const std::vector<std::string>& ids, std::size_t k,
                             RankFunction rf, std::uint64_t salt);

/// Coordinated bottom-k samples of every instance reduced to per-item
/// outcomes: in instance i an item is a Poisson entry with threshold map
/// tau_i(u) = u * T_i, T_i being the member's conditional threshold or, for
/// non-members, the k-th largest rank. Items absent from every sample are
/// omitted. Requires PPS ranks.
std::vector<ItemSample> bottomk_outcomes(const InstanceSet& data, std::size_t k,
                                         RankFunction rf, std::uint64_t salt);

}  // namespace coord

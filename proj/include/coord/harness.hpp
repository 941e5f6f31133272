#pragma once

// Run configuration and the drivers behind the command-line subcommands.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coord/analysis.hpp"
#include "coord/estimators.hpp"
#include "coord/samplers.hpp"

namespace coord {

struct RunConfig {
  std::string input;
  std::string samples;  // estimate from stored sample records instead of sampling
  std::string scheme = "pps:tau=1";
  std::string function = "max";
  std::string estimator = "j";
  std::string query;  // empty: sum of `function` over the items
  std::string items = "all";
  std::uint64_t salt = 0;
  std::size_t reps = 1;
  std::size_t k = 0;  // bottom-k mode when > 0
  std::string rank = "pps";
  std::string out;
  std::string plot;
  std::vector<double> vector;  // analyze/characterize a single vector
  std::size_t grid_n = 1024;
  int depth = 60;
  std::size_t threads = 0;  // 0 = hardware concurrency

  /// reps >= 1, grid_n >= 16, depth in [8, 60].
  void validate() const;
};

/// `all`, an id list `1,2,3`, `both-positive` (every instance positive) or
/// `positive-in:K` (instance K, 1-based, positive). Value predicates are
/// evaluated on the data.
ItemSubset select_items(const InstanceSet& data, const std::string& spec);

RankFunction parse_rank(const std::string& s);

/// Poisson samples for the configured scheme, or rank-conditioned bottom-k
/// samples when cfg.k > 0.
std::vector<ItemSample> draw_samples(const InstanceSet& data, const RunConfig& cfg,
                                     std::uint64_t salt);

/// Exact answer, or the estimate from one draw with cfg.salt.
QueryResult run_query(const RunConfig& cfg, const InstanceSet& data);

/// Estimates from stored sample records; `truth` may be null unless the
/// estimator needs the data.
QueryResult run_query_on_samples(const RunConfig& cfg, const std::vector<ItemSample>& samples,
                                 const InstanceSet* truth);

struct MonteCarloSummary {
  std::string query;
  std::string estimator;
  std::string items;
  std::size_t reps = 0;
  double truth = 0.0;
  double mean = 0.0;
  double std_error = 0.0;  // from the empirical variance of the repetitions

  double z_score() const;
};

/// cfg.reps draws with salts cfg.salt, cfg.salt + 1, ...; deterministic for
/// any thread count.
MonteCarloSummary run_monte_carlo(const RunConfig& cfg, const InstanceSet& data);
std::string monte_carlo_to_json(const MonteCarloSummary& s);

/// Data vectors selected by the config: cfg.vector when set, otherwise the
/// selected rows of the data.
std::vector<std::pair<std::string, DataVector>> analysis_vectors(const RunConfig& cfg,
                                                                 const InstanceSet* data);

/// One report per vector. `ok` is cleared when a ratio exceeds 84, the
/// implication chain fails or the optimum is inconsistent.
std::vector<AnalysisReport> run_analysis(const RunConfig& cfg, const InstanceSet* data, bool* ok);
std::vector<AnalysisReport> run_characterize(const RunConfig& cfg, const InstanceSet* data,
                                             bool* ok);

struct ConditionalInclusion {
  std::size_t item = 0;
  double value = 0.0;
  double threshold = 0.0;  // k-th largest rank among the other items
  double predicted = 0.0;
  double observed = 0.0;
};

/// Fixes the other items' seeds, redraws one item's seed `redraws` times and
/// compares its bottom-k inclusion frequency with the probability that its
/// rank beats the k-th largest rank of the others.
std::vector<ConditionalInclusion> bottomk_conditional_check(std::span<const double> values,
                                                            std::size_t k, RankFunction rf,
                                                            std::size_t redraws,
                                                            std::uint64_t seed);

/// Logs per-member conditional thresholds of every instance and runs the
/// conditional inclusion check (cfg.reps redraws); `ok` is cleared when a
/// frequency misses its prediction by more than 0.01.
void run_bottomk_analysis(const RunConfig& cfg, const InstanceSet& data, std::ostream& out,
                          bool* ok);

/// Runs fn(i) for i < n on worker threads.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace coord

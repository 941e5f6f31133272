#pragma once

// Per-item estimators (J, Horvitz-Thompson, v-optimal) and sum aggregation
// of per-item estimates into multi-instance query answers.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "coord/hull.hpp"
#include "coord/item_functions.hpp"
#include "coord/samplers.hpp"

namespace coord {

enum class EstimateKind { kJDyadic, kVOptimal, kHt };

/// Constant (or callable) estimate on (a, b].
struct EstimatePiece {
  double a = 0.0;
  double b = 1.0;
  double value = 0.0;
  std::function<double(double)> callable;

  double at(double u) const { return callable ? callable(u) : value; }
};

/// Estimates over seeds for one data vector, pieces sorted by a.
struct EstimateFn {
  EstimateKind kind = EstimateKind::kJDyadic;
  std::vector<EstimatePiece> pieces;

  double operator()(double u) const;
  /// Integral over the covered seeds; exact for constant pieces.
  double integral() const;
};

/// i = floor(-log2(rho)), computed exactly: rho lies in (2^-(i+1), 2^-i].
int dyadic_index(double rho);

/// J estimate from an outcome: 2^(i+1) * (lb(2^-i) - lb(2^-(i-1))), the
/// second term being 0 when i = 0.
double j_estimate(const Outcome& outcome, const ItemFunction& f, const TauScheme& scheme);
double j_estimate(const Outcome& outcome, const ItemFunction& f, const TauScheme& scheme,
                  const Domain& domain);

/// Integral of the J estimates over [rho, 1] for data v, summed over the
/// constant dyadic pieces j < depth.
double j_cumulative(const DataVector& v, double rho, const ItemFunction& f,
                    const TauScheme& scheme, int depth);

/// Dyadic J pieces (2^-(j+1), 2^-j] for j < depth.
EstimateFn j_estimate_fn(const DataVector& v, const ItemFunction& f, const TauScheme& scheme,
                         int depth);

/// Horvitz-Thompson estimate for MAX and MIN under PPS with a common tau_star.
double ht_estimate(const Outcome& outcome, const ItemFunction& f, const TauScheme& scheme);
EstimateFn ht_estimate_fn(const DataVector& v, const ItemFunction& f, const TauScheme& scheme);

/// Negated slope of the lower hull of `lb` sampled on `grid`, anchored at
/// (0, lb(0+)) and (1, 0). Requires lb on all of (0, 1].
EstimateFn v_optimal_estimates(const LowerBoundFn& lb, std::size_t grid_n);
EstimateFn v_optimal_estimates(const LowerBoundFn& lb, const HullGrid& grid,
                               std::optional<double> left_value = std::nullopt);

enum class EstimatorKind { kJ, kHt, kExact, kVOptimalOracle };

EstimatorKind parse_estimator(std::string_view s);
const char* estimator_name(EstimatorKind k);

enum class QueryKind { kL1, kLpp, kLp, kMaxSum, kMinSum, kJaccard, kDistinct, kFunction };

struct Query {
  QueryKind kind = QueryKind::kL1;
  double p = 1.0;
  ItemFunction function;  // used by kFunction

  /// `l1`, `lpp:p`, `lp:p`, `maxsum`, `minsum`, `jaccard`, `distinct`.
  static Query parse(std::string_view s);
  static Query of_function(const ItemFunction& f);
  std::string to_string() const;
};

struct Contribution {
  std::string id;
  double value = 0.0;
};

struct QueryResult {
  std::string query;
  std::string estimator;
  double estimate = 0.0;
  std::vector<Contribution> contributions;
  std::string items;  // description of the item subset
};

/// Selected item ids; std::nullopt selects every item.
using ItemSubset = std::optional<std::unordered_set<std::string>>;

/// Per-item v-optimal estimate functions keyed by item id and scheme
/// parameters, so repeated Monte Carlo runs do not rebuild hulls.
class OracleCache {
 public:
  explicit OracleCache(std::size_t grid_n = 1024) : grid_n_(grid_n) {}
  double estimate(const ItemSample& s, const ItemFunction& f, const DataVector& truth);

 private:
  std::size_t grid_n_;
  std::map<std::string, EstimateFn> cache_;
};

struct EstimateContext {
  const InstanceSet* truth = nullptr;  // needed by kExact and kVOptimalOracle
  OracleCache* oracle = nullptr;
};

/// Estimate of f for one sampled item.
double estimate_item(const ItemSample& s, const ItemFunction& f, EstimatorKind kind,
                     const EstimateContext& ctx);

/// Sum of per-item estimates of f over the selected items.
QueryResult sum_estimate(const std::vector<ItemSample>& samples, const ItemFunction& f,
                         EstimatorKind kind, const ItemSubset& subset,
                         const EstimateContext& ctx = {});

/// Query answer: sums for the sum-aggregate kinds, min-sum/max-sum clamped to
/// [0, 1] for Jaccard, and the p-th root of the L_p^p estimate for lp.
QueryResult estimate_query(const std::vector<ItemSample>& samples, const Query& q,
                           EstimatorKind kind, const ItemSubset& subset,
                           const EstimateContext& ctx = {});

/// Ground-truth answer over the data.
QueryResult exact_query(const InstanceSet& data, const Query& q, const ItemSubset& subset);

}  // namespace coord

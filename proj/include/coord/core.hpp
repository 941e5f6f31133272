#pragma once

// Domain types for coordinated shared-seed sampling of a single item:
// data vectors, seeds, per-instance threshold maps and outcomes.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace coord {

/// Raised for violated preconditions and malformed input across the library.
class Error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Values of one item across r instances. Every entry is >= 0.
class DataVector {
 public:
  DataVector() = default;
  explicit DataVector(std::vector<double> values);
  DataVector(std::initializer_list<double> values)
      : DataVector(std::vector<double>(values)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  bool operator==(const DataVector&) const = default;

 private:
  std::vector<double> values_;
};

/// Item ids plus one DataVector per item; all rows share the same arity.
class InstanceSet {
 public:
  InstanceSet() = default;
  explicit InstanceSet(std::size_t instances) : instances_(instances) {}

  void add(std::string id, DataVector row);

  std::size_t instances() const { return instances_; }
  std::size_t items() const { return ids_.size(); }
  const std::string& id(std::size_t k) const { return ids_[k]; }
  const DataVector& row(std::size_t k) const { return rows_[k]; }
  const std::vector<std::string>& ids() const { return ids_; }

  /// Row index of an item id, or -1 when absent.
  std::ptrdiff_t index_of(const std::string& id) const;

  /// Values of instance `i` across all items, in item order.
  std::vector<double> column(std::size_t i) const;

 private:
  std::size_t instances_ = 0;
  std::vector<std::string> ids_;
  std::vector<DataVector> rows_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Shared random seed in (0, 1].
class Seed {
 public:
  explicit Seed(double u);
  double value() const { return u_; }
  bool operator==(const Seed&) const = default;
  auto operator<=>(const Seed&) const = default;

 private:
  double u_;
};

/// Maps a raw 64-bit hash to (0, 1] using the top 53 bits; 0 maps to 1.
Seed seed_from_hash(std::uint64_t h);

/// Deterministic seed for an item. Items with the same id share a seed in
/// every instance hashed with the same salt.
Seed hash_seed(std::string_view item_id, std::uint64_t salt);

/// tau(u) = u * tau_star.
struct PpsTau {
  double tau_star;
};

/// Continuous non-decreasing interpolation through (u, tau) knots spanning
/// u = 0 to u = 1.
struct PiecewiseTau {
  std::vector<double> u;
  std::vector<double> tau;
};

/// Per-instance seed-to-threshold map.
class TauMap {
 public:
  TauMap(PpsTau pps);
  TauMap(PiecewiseTau pwl);

  double at(double u) const;

  /// Largest u in [0, 1] with tau(u) <= level, or a negative value when
  /// tau(0) > level.
  double last_at_or_below(double level) const;

  /// Knot positions strictly inside (0, 1); empty for PPS.
  std::vector<double> joints() const;

  /// Coefficients (a, b) with tau(x) = a + b * x on the linear piece that
  /// contains the open neighbourhood of `u`.
  std::pair<double, double> linear_piece(double u) const;

  bool is_pps() const { return std::holds_alternative<PpsTau>(rep_); }
  double tau_star() const;
  const PiecewiseTau* piecewise() const { return std::get_if<PiecewiseTau>(&rep_); }

 private:
  std::variant<PpsTau, PiecewiseTau> rep_;
};

/// Per-coordinate bounds of the data domain. Defaults to [0, inf).
struct Domain {
  std::vector<double> lo;
  std::vector<double> hi;

  static Domain nonnegative(std::size_t r);
  static Domain box(std::size_t r, double lo, double hi);
  bool bounded() const;
};

/// The sampling scheme: one TauMap per instance.
class TauScheme {
 public:
  TauScheme() = default;
  explicit TauScheme(std::vector<TauMap> taus);

  static TauScheme pps(std::vector<double> tau_stars);
  static TauScheme pps_uniform(std::size_t r, double tau_star);

  std::size_t size() const { return taus_.size(); }
  const TauMap& map(std::size_t i) const { return taus_[i]; }

  /// Throws when the infimum of some tau_i exceeds the domain's lower bound.
  void validate(const Domain& domain) const;

  /// Common tau_star when every instance is PPS with the same threshold.
  bool common_pps(double* tau_star = nullptr) const;

 private:
  std::vector<TauMap> taus_;
};

double tau_at(const TauScheme& scheme, std::size_t instance, Seed u);

/// One outcome slot: either the sampled value or the upper bound tau_i(seed).
struct Slot {
  bool known = false;
  double value = 0.0;  // sampled value when known, otherwise the upper bound

  static Slot sampled(double v) { return {true, v}; }
  static Slot unknown(double upper_bound) { return {false, upper_bound}; }
  bool operator==(const Slot&) const = default;
};

/// Everything an estimator may see for one item: the seed and the slots.
struct Outcome {
  Seed seed{1.0};
  std::vector<Slot> slots;

  std::size_t known_count() const;
  bool operator==(const Outcome&) const = default;

  /// Checks Known(v) => v >= tau_i(seed) and Unknown bound == tau_i(seed).
  void validate(const TauScheme& scheme) const;
};

/// True iff `candidate` lies in the set of vectors consistent with the
/// outcome: equal on known slots, strictly below the bound on unknown slots.
bool is_consistent(const Outcome& outcome, const DataVector& candidate,
                   const TauScheme& scheme);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace coord

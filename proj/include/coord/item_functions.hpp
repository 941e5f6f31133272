#pragma once

// Item functions f(v) >= 0 and their lower-bound functions: the infimum of f
// over all data vectors consistent with what the outcome reveals at seed x.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "coord/core.hpp"

namespace coord {

enum class FunctionKind { kMax, kMin, kRange, kOneSidedRange, kOr };

/// Built-in item function. `power` applies to the range kinds; `hi`/`lo` are
/// the 0-based coordinates of the one-sided range max{v_hi - v_lo, 0}^p.
struct ItemFunction {
  FunctionKind kind = FunctionKind::kMax;
  double power = 1.0;
  std::size_t hi = 0;
  std::size_t lo = 1;

  static ItemFunction max() { return {FunctionKind::kMax}; }
  static ItemFunction min() { return {FunctionKind::kMin}; }
  static ItemFunction range(double p) { return {FunctionKind::kRange, p}; }
  static ItemFunction one_sided_range(double p, std::size_t hi = 0, std::size_t lo = 1) {
    return {FunctionKind::kOneSidedRange, p, hi, lo};
  }
  static ItemFunction logical_or() { return {FunctionKind::kOr}; }

  /// Parses `max`, `min`, `or`, `rg:p=2`, `one_sided_rg:p=2,hi=1,lo=2`
  /// (coordinates are 1-based in the text form).
  static ItemFunction parse(std::string_view spec);
  std::string to_string() const;

  /// Throws if the function cannot be applied to vectors of arity r.
  void check_arity(std::size_t r) const;
};

double eval(const ItemFunction& f, const DataVector& v);

/// Information about one item that stays valid for every seed x >= from:
/// present values are revealed at x iff value >= tau_i(x); absent entries
/// (not sampled at `from`) stay unknown with bound tau_i(x).
struct RevealState {
  std::vector<double> values;
  std::vector<char> present;
  double from = 0.0;

  static RevealState of_outcome(const Outcome& o);
  static RevealState of_vector(const DataVector& v);
};

/// Lower bound at x for every vector consistent with `state`.
double lower_bound(const ItemFunction& f, const RevealState& state, const TauScheme& scheme,
                   const Domain& domain, double x);

/// Lower bound at seed x >= outcome.seed, default domain [0, inf)^r.
double lower_bound(const ItemFunction& f, const Outcome& outcome, const TauScheme& scheme,
                   Seed x);
double lower_bound(const ItemFunction& f, const Outcome& outcome, const TauScheme& scheme,
                   const Domain& domain, Seed x);

/// Lower bound of the data vector itself at seed x.
double lower_bound(const ItemFunction& f, const DataVector& v, const TauScheme& scheme,
                   double x);

/// Grid search over unknown coordinates: grid_n points per coordinate on
/// [lo_i, ub_i - step], ub_i = min(tau_i(x), hi_i). Needs a bounded domain.
double brute_force_lower_bound(const ItemFunction& f, const Outcome& outcome,
                               const TauScheme& scheme, const Domain& domain, Seed x,
                               std::size_t grid_n);

/// One piece of a LowerBoundFn over (a, b]: either max(0, c0 + c1*u)^power
/// or an arbitrary callable.
struct LowerBoundSegment {
  double a = 0.0;
  double b = 1.0;
  double c0 = 0.0;
  double c1 = 0.0;
  double power = 1.0;
  std::function<double(double)> callable;

  double at(double u) const;
};

/// Piecewise, non-increasing, left-continuous lower-bound function on
/// [domain_left, 1] (or (0, 1] when domain_left == 0).
class LowerBoundFn {
 public:
  LowerBoundFn() = default;
  LowerBoundFn(std::vector<LowerBoundSegment> segments, double domain_left);

  /// Single callable piece over (0, 1]; used for synthetic lower bounds.
  static LowerBoundFn from_callable(std::function<double(double)> fn,
                                    std::vector<double> breakpoints = {});

  double domain_left() const { return domain_left_; }
  const std::vector<LowerBoundSegment>& segments() const { return segments_; }

  /// Right endpoints of all pieces (the last one is 1).
  std::vector<double> breakpoints() const;

  double operator()(double u) const;

  /// Limit from the right at u, i.e. the value of the piece starting at u.
  double right_limit(double u) const;

  /// Limit as u -> 0+ of the first piece.
  double limit_at_zero() const;

  /// True when the first piece is constant, so the limit at 0 is attained on
  /// an interval (0, u0].
  bool constant_near_zero() const;

 private:
  const LowerBoundSegment& piece(double u) const;

  std::vector<LowerBoundSegment> segments_;
  double domain_left_ = 0.0;
};

/// Piecewise representation from an outcome, valid on [outcome.seed, 1].
LowerBoundFn lb_breakpoints(const ItemFunction& f, const Outcome& outcome,
                            const TauScheme& scheme, const Domain& domain);
LowerBoundFn lb_breakpoints(const ItemFunction& f, const Outcome& outcome,
                            const TauScheme& scheme);

/// Full lower-bound function of a data vector on (0, 1].
LowerBoundFn lower_bound_fn(const ItemFunction& f, const DataVector& v,
                            const TauScheme& scheme, const Domain& domain);
LowerBoundFn lower_bound_fn(const ItemFunction& f, const DataVector& v,
                            const TauScheme& scheme);

}  // namespace coord

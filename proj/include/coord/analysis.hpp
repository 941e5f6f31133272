#pragma once

// Square integrals, variances and the competitiveness / characterization
// checks run on the lower-bound function of a single data vector.

#include <iosfwd>
#include <string>

#include "coord/estimators.hpp"

namespace coord {

/// Sum over pieces of the integral of value(u)^2. Constant pieces are exact,
/// callable pieces use adaptive Gauss-Kronrod quadrature. Returns +inf when
/// the pieces nearest 0 do not shrink (a divergent tail).
double integrate_square(const EstimateFn& e);

struct EstimableCheck {
  bool ok = false;
  double gap = 0.0;  // f(v) - lb(0+)
};

struct BoundedCheck {
  bool ok = false;
  double sup = 0.0;  // largest observed (f(v) - lb(u)) / u
};

struct FiniteVarianceCheck {
  bool ok = false;
  double integral = 0.0;  // last partial integral of squared hull slopes
  int refinements = 0;
};

EstimableCheck check_estimable(const LowerBoundFn& lb, double f_value, double eps = 1e-200);
BoundedCheck check_bounded(const LowerBoundFn& lb, double f_value, double eps = 1e-6);
FiniteVarianceCheck check_finite_variance(const LowerBoundFn& lb, double f_value,
                                          std::size_t grid_n = 64);

EstimableCheck check_estimable(const DataVector& v, const ItemFunction& f,
                               const TauScheme& scheme, double eps = 1e-200);
BoundedCheck check_bounded(const DataVector& v, const ItemFunction& f, const TauScheme& scheme,
                           double eps = 1e-6);
FiniteVarianceCheck check_finite_variance(const DataVector& v, const ItemFunction& f,
                                          const TauScheme& scheme, std::size_t grid_n = 64);

struct AnalysisReport {
  std::string function;
  std::string scheme;
  std::string vector;
  double f_value = 0.0;
  double square_integral_j = 0.0;
  double square_integral_opt = 0.0;
  double ratio = 1.0;
  double ratio_upper = 1.0;  // ratio with the certified J tail added
  double j_tail_bound = 0.0;
  double variance_j = 0.0;
  double variance_opt = 0.0;
  bool estimable = false;
  bool finite_variance = false;
  bool bounded = false;
  double gap = 0.0;
  double slope_sup = 0.0;
  double variance_integral = 0.0;
  bool consistent = true;  // false when the optimum is 0 but J is not

  /// bounded => finite_variance => estimable.
  bool chain_holds() const;
  bool operator==(const AnalysisReport&) const = default;
};

/// Characterization checks only; the integral fields stay at their defaults.
AnalysisReport characterize(const DataVector& v, const ItemFunction& f, const TauScheme& scheme,
                            std::size_t grid_n = 64);

/// Square integrals of J (to `depth` dyadic pieces plus a certified tail)
/// and of the v-optimal estimates, their ratio and variances, and the
/// characterization checks.
AnalysisReport competitiveness_ratio(const DataVector& v, const ItemFunction& f,
                                     const TauScheme& scheme, std::size_t grid_n = 1024,
                                     int depth = 60);

/// Square integral minus f(v)^2; tiny negatives are clamped to 0.
double variance(const DataVector& v, const ItemFunction& f, const TauScheme& scheme,
                EstimatorKind kind, std::size_t grid_n = 1024, int depth = 60);
double variance_of(const EstimateFn& e, double f_value);

/// CSV with columns u,lb,H,J,vopt on a uniform grid of `points` seeds.
void write_plot_csv(std::ostream& os, const DataVector& v, const ItemFunction& f,
                    const TauScheme& scheme, std::size_t grid_n = 1024, std::size_t points = 200);

}  // namespace coord

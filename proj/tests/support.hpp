#pragma once

// Random instance generators and independent reference computations shared
// by the unit tests and the acceptance suite. None of the references call
// into the closed forms they are compared against.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "coord/core.hpp"
#include "coord/item_functions.hpp"

namespace coord::testing {

struct Triple {
  DataVector v;
  ItemFunction f;
  TauScheme scheme;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Entries are 0 with probability 1/4, otherwise uniform on [0.05, 5].
inline DataVector random_vector(std::mt19937_64& rng, std::size_t r) {
  std::vector<double> v(r);
  for (double& x : v) x = uniform(rng, 0.0, 1.0) < 0.25 ? 0.0 : uniform(rng, 0.05, 5.0);
  return DataVector(v);
}

inline TauMap random_piecewise(std::mt19937_64& rng) {
  PiecewiseTau p{{0.0}, {0.0}};
  const int knots = 1 + static_cast<int>(rng() % 3);
  double u = 0.0;
  double t = 0.0;
  for (int k = 0; k < knots; ++k) {
    u += uniform(rng, 0.05, (1.0 - u) / 1.5);
    t += uniform(rng, 0.0, 3.0);
    p.u.push_back(u);
    p.tau.push_back(t);
  }
  p.u.push_back(1.0);
  p.tau.push_back(t + uniform(rng, 0.1, 3.0));
  return TauMap(p);
}

inline TauScheme random_pps(std::mt19937_64& rng, std::size_t r) {
  std::vector<double> t(r);
  for (double& x : t) x = uniform(rng, 0.5, 6.0);
  return TauScheme::pps(t);
}

inline TauScheme random_scheme(std::mt19937_64& rng, std::size_t r, bool allow_piecewise) {
  if (!allow_piecewise || rng() % 2 == 0) return random_pps(rng, r);
  std::vector<TauMap> maps;
  for (std::size_t i = 0; i < r; ++i) {
    if (rng() % 2 == 0) maps.emplace_back(PpsTau{uniform(rng, 0.5, 6.0)});
    else maps.push_back(random_piecewise(rng));
  }
  return TauScheme(maps);
}

inline ItemFunction random_function(std::mt19937_64& rng, std::size_t r) {
  const double p = rng() % 2 ? 1.0 : 2.0;
  switch (rng() % 5) {
    case 0: return ItemFunction::max();
    case 1: return ItemFunction::min();
    case 2: return ItemFunction::range(p);
    case 3: return ItemFunction::logical_or();
    default: {
      const std::size_t hi = rng() % r;
      std::size_t lo = rng() % r;
      if (lo == hi) lo = (hi + 1) % r;
      return ItemFunction::one_sided_range(p, hi, lo);
    }
  }
}

inline Triple random_triple(std::mt19937_64& rng, bool allow_piecewise = true) {
  const std::size_t r = 2 + rng() % 2;
  return {random_vector(rng, r), random_function(rng, r), random_scheme(rng, r, allow_piecewise)};
}

/// Infimum of f over the per-coordinate box [lo_i, hi_i) by cases on the
/// function kind: open upper ends never bind, so only the closed lower ends
/// and the upper ends as limits matter.
inline double box_infimum(const ItemFunction& f, const std::vector<double>& lo,
                          const std::vector<double>& hi, const std::vector<bool>& fixed) {
  const std::size_t r = lo.size();
  switch (f.kind) {
    case FunctionKind::kMax: return *std::max_element(lo.begin(), lo.end());
    case FunctionKind::kMin: return *std::min_element(lo.begin(), lo.end());
    case FunctionKind::kOr:
      return std::any_of(lo.begin(), lo.end(), [](double x) { return x > 0.0; }) ? 1.0 : 0.0;
    case FunctionKind::kRange: {
      // Pull every free coordinate toward the band [max lo, min hi].
      double top = 0.0;
      double bottom = 1e300;
      for (std::size_t i = 0; i < r; ++i) {
        top = std::max(top, lo[i]);
        bottom = std::min(bottom, fixed[i] ? lo[i] : hi[i]);
      }
      return std::pow(std::max(0.0, top - bottom), f.power);
    }
    case FunctionKind::kOneSidedRange: {
      const double b = fixed[f.lo] ? lo[f.lo] : hi[f.lo];
      return std::pow(std::max(0.0, lo[f.hi] - b), f.power);
    }
  }
  return 0.0;
}

/// Lower bound of v at seed x straight from the sampling rule.
inline double reference_lower_bound(const ItemFunction& f, const DataVector& v,
                                    const TauScheme& scheme, double x) {
  const std::size_t r = v.size();
  std::vector<double> lo(r);
  std::vector<double> hi(r);
  std::vector<bool> fixed(r);
  for (std::size_t i = 0; i < r; ++i) {
    const double t = scheme.map(i).at(x);
    fixed[i] = v[i] >= t;
    lo[i] = fixed[i] ? v[i] : 0.0;
    hi[i] = fixed[i] ? v[i] : t;
  }
  return box_infimum(f, lo, hi, fixed);
}

/// The J construction run forward from u = 1: on (2^-j-1, 2^-j] the value
/// fills the gap between lb(2^-j) and what has been accumulated so far.
/// Returns the integral of the estimates over [rho, 1].
inline double reference_j_cumulative(const std::function<double(double)>& lb, double rho,
                                     int max_depth = 62) {
  double accumulated = 0.0;
  double total_over_rho = 0.0;
  for (int j = 0; j < max_depth; ++j) {
    const double top = std::ldexp(1.0, -j);
    const double bottom = top / 2.0;
    double value;
    if (j == 0) {
      value = 2.0 * lb(1.0);
    } else {
      const double target = lb(top);
      value = target == accumulated ? 0.0 : std::ldexp(target - accumulated, j + 1);
    }
    accumulated += value * (top - bottom);
    if (rho < top) total_over_rho += value * (top - std::max(bottom, rho));
    if (bottom <= rho) break;
  }
  return total_over_rho;
}

/// Closed form of the one-sided squared range under PPS with thresholds
/// (t1, t2): entry 1 must be sampled, entry 2 contributes its value when
/// sampled and its bound otherwise.
inline double one_sided_lb(double v1, double v2, double t1, double t2, double x, double p = 2.0) {
  if (v1 < t1 * x) return 0.0;
  return std::pow(std::max(0.0, v1 - std::max(v2, t2 * x)), p);
}

struct Point {
  double u;
  double value;
};

/// Hull vertices by exhaustion: a point is a vertex unless some chord
/// between two other points passes strictly below it, or it ties another
/// point's u with a larger value. Collinear interior points are dropped.
inline std::vector<Point> brute_force_hull(const std::vector<Point>& pts) {
  std::vector<Point> out;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const Point& p = pts[k];
    bool vertex = true;
    for (std::size_t a = 0; a < pts.size() && vertex; ++a) {
      if (a != k && pts[a].u == p.u && pts[a].value < p.value) vertex = false;
      for (std::size_t b = 0; b < pts.size() && vertex; ++b) {
        if (pts[a].u < p.u && p.u < pts[b].u) {
          const double t = (p.u - pts[a].u) / (pts[b].u - pts[a].u);
          const double chord = pts[a].value + t * (pts[b].value - pts[a].value);
          if (chord <= p.value) vertex = false;
        }
      }
    }
    if (vertex) out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const Point& a, const Point& b) { return a.u < b.u; });
  return out;
}

}  // namespace coord::testing

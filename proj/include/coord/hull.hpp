#pragma once

// Lower convex hull of a sampled lower-bound function. The negated slope of
// the hull is the minimum-variance estimate for the sampled data vector.

#include <vector>

#include "coord/item_functions.hpp"

namespace coord {

struct HullPoint {
  double u = 0.0;
  double value = 0.0;
  bool operator==(const HullPoint&) const = default;
};

/// Vertices with strictly increasing u and non-decreasing slopes.
class LowerHull {
 public:
  LowerHull() = default;
  explicit LowerHull(std::vector<HullPoint> vertices) : vertices_(std::move(vertices)) {}

  const std::vector<HullPoint>& vertices() const { return vertices_; }

  /// Linear interpolation between vertices; u must lie in the covered range.
  double operator()(double u) const;

  /// Slope of each edge, left to right.
  std::vector<double> slopes() const;

 private:
  std::vector<HullPoint> vertices_;
};

/// Monotone-chain lower hull. Points sharing a u keep the smallest value.
/// Throws when fewer than two distinct u remain.
LowerHull lower_hull(std::vector<HullPoint> points);

struct HullGrid {
  std::size_t grid_n = 1024;     // uniform points on (0, 1]
  double geometric_min = 1e-12;  // geometric points span [geometric_min, 1]
  std::size_t geometric_n = 0;   // 0 means grid_n
};

/// Points fed to the hull: a uniform and a geometric grid, every breakpoint
/// with its right limit, the left anchor (0, left_value) and (1, 0). The
/// right anchor encodes that the cumulative estimate over [1, 1] is empty.
std::vector<HullPoint> hull_points(const LowerBoundFn& lb, double left_value,
                                   const HullGrid& grid);

}  // namespace coord

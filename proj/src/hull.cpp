#include "coord/hull.hpp"

#include <algorithm>
#include <cmath>

namespace coord {

double LowerHull::operator()(double u) const {
  if (vertices_.empty()) throw Error("empty hull");
  if (u < vertices_.front().u || u > vertices_.back().u) {
    throw Error("hull evaluated outside its range");
  }
  const auto it = std::lower_bound(vertices_.begin(), vertices_.end(), u,
                                   [](const HullPoint& p, double x) { return p.u < x; });
  if (it->u == u) return it->value;
  const HullPoint& b = *it;
  const HullPoint& a = *(it - 1);
  return a.value + (b.value - a.value) * ((u - a.u) / (b.u - a.u));
}

std::vector<double> LowerHull::slopes() const {
  std::vector<double> out;
  for (std::size_t k = 1; k < vertices_.size(); ++k) {
    out.push_back((vertices_[k].value - vertices_[k - 1].value) /
                  (vertices_[k].u - vertices_[k - 1].u));
  }
  return out;
}

LowerHull lower_hull(std::vector<HullPoint> points) {
  std::sort(points.begin(), points.end(), [](const HullPoint& a, const HullPoint& b) {
    return a.u < b.u || (a.u == b.u && a.value < b.value);
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const HullPoint& a, const HullPoint& b) { return a.u == b.u; }),
               points.end());
  if (points.size() < 2) throw Error("lower hull needs at least two distinct u values");

  const auto cross = [](const HullPoint& o, const HullPoint& a, const HullPoint& b) {
    return (a.u - o.u) * (b.value - o.value) - (a.value - o.value) * (b.u - o.u);
  };
  std::vector<HullPoint> hull;
  hull.reserve(points.size());
  for (const HullPoint& p : points) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0) {
      hull.pop_back();
    }
    hull.push_back(p);
  }
  return LowerHull(std::move(hull));
}

std::vector<HullPoint> hull_points(const LowerBoundFn& lb, double left_value,
                                   const HullGrid& grid) {
  if (grid.grid_n < 2) throw Error("hull grid needs grid_n >= 2");
  if (lb.domain_left() > 0.0) {
    throw Error("hull needs the lower bound on all of (0, 1]");
  }
  std::vector<HullPoint> pts;
  pts.push_back({0.0, left_value});
  pts.push_back({1.0, 0.0});
  const double n = static_cast<double>(grid.grid_n);
  for (std::size_t k = 1; k <= grid.grid_n; ++k) {
    const double u = static_cast<double>(k) / n;
    pts.push_back({u, lb(u)});
  }
  const std::size_t gn = grid.geometric_n ? grid.geometric_n : grid.grid_n;
  const double log_min = std::log(grid.geometric_min);
  for (std::size_t k = 0; k < gn; ++k) {
    const double u = std::exp(log_min * (1.0 - static_cast<double>(k) / static_cast<double>(gn)));
    if (u > 0.0 && u < 1.0) pts.push_back({u, lb(u)});
  }
  for (double b : lb.breakpoints()) {
    if (b >= 1.0) continue;
    pts.push_back({b, lb(b)});
    pts.push_back({b, lb.right_limit(b)});
  }
  return pts;
}

}  // namespace coord

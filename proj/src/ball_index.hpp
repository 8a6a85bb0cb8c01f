#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "isodiam/geometry.hpp"

namespace isodiam {

// Spatial hash over equal-radius balls. Each point is embedded by a map phi
// with |phi(x) - phi(c)| <= reach(d(x, c)):
//   S^n: ambient coordinates, chord length 2 sin(d/2)
//   R^n: identity
//   H^n: log map at the pole, 1-Lipschitz in negative curvature
// so a grid of cell size reach(radius) only needs neighbouring cells.
class BallIndex {
 public:
  BallIndex(const Space& space, std::vector<Point> centers, double radius);

  bool any_contains(const Point& x) const;

  const Space& space() const noexcept { return space_; }
  const std::vector<Point>& centers() const noexcept { return centers_; }
  double radius() const noexcept { return radius_; }

 private:
  Vec embed(const Point& x) const;
  using Cell = std::array<std::int64_t, kMaxAmbientDim>;
  std::uint64_t key(const Cell& cell) const;
  Cell cell_of(const Vec& y) const;

  Space space_;
  std::vector<Point> centers_;
  double radius_;
  double cell_;
  int width_;
  std::vector<std::vector<int>> offsets_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

}  // namespace isodiam

#include "ball_index.hpp"

#include <cmath>
#include <numbers>

#include "isodiam/random.hpp"

namespace isodiam {

BallIndex::BallIndex(const Space& space, std::vector<Point> centers, double radius)
    : space_(space), centers_(std::move(centers)), radius_(radius) {
  double reach = radius;
  if (space.spherical()) reach = 2.0 * std::sin(0.5 * std::min(radius, std::numbers::pi));
  cell_ = reach * (1.0 + 1e-9) + 1e-12;
  width_ = space.hyperbolic() ? space.dim() : space.ambient_dim();

  // All offsets in {-1,0,1}^width.
  std::vector<int> digits(static_cast<std::size_t>(width_), -1);
  while (true) {
    offsets_.push_back(digits);
    int i = 0;
    while (i < width_ && digits[static_cast<std::size_t>(i)] == 1) digits[static_cast<std::size_t>(i++)] = -1;
    if (i == width_) break;
    ++digits[static_cast<std::size_t>(i)];
  }

  for (std::size_t i = 0; i < centers_.size(); ++i) {
    buckets_[key(cell_of(embed(centers_[i])))].push_back(static_cast<std::uint32_t>(i));
  }
}

Vec BallIndex::embed(const Point& x) const {
  if (!space_.hyperbolic()) return x.coords();
  Vec y(space_.dim());
  double r2 = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    y[i] = x[i];
    r2 += x[i] * x[i];
  }
  const double r = std::sqrt(r2);
  if (r > 0.0) y *= std::asinh(r) / r;
  return y;
}

BallIndex::Cell BallIndex::cell_of(const Vec& y) const {
  Cell cell{};
  for (int i = 0; i < width_; ++i) cell[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(y[i] / cell_));
  return cell;
}

std::uint64_t BallIndex::key(const Cell& cell) const {
  std::uint64_t h = 0x51ed270b27a5c3d1ULL;
  for (int i = 0; i < width_; ++i) h = mix64(h ^ static_cast<std::uint64_t>(cell[static_cast<std::size_t>(i)]));
  return h;
}

bool BallIndex::any_contains(const Point& x) const {
  const Cell base = cell_of(embed(x));
  Cell cell{};
  for (const auto& off : offsets_) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(width_); ++i) cell[i] = base[i] + off[i];
    const auto it = buckets_.find(key(cell));
    if (it == buckets_.end()) continue;
    for (std::uint32_t idx : it->second) {
      if (distance(space_, x, centers_[idx]) <= radius_) return true;
    }
  }
  return false;
}

}  // namespace isodiam

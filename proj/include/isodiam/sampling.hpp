#pragma once

// Monte Carlo machinery over regions: uniform sampling in geodesic balls,
// rejection sampling of regions, hit-or-miss volume, and the sampled metrics
// (diameter, Hausdorff distance) used to track symmetrization flows.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "isodiam/geometry.hpp"
#include "isodiam/random.hpp"
#include "isodiam/region.hpp"

namespace isodiam {

/// Uniform sampler (w.r.t. the volume measure) for one geodesic ball. Builds
/// an inverse-CDF table of the radial density once; `draw` is then cheap.
class BallSampler {
 public:
  /// `ball.radius` may be pi on the sphere (whole-sphere envelope).
  BallSampler(const Space& space, const Ball& ball);

  Point draw(Engine& engine) const;
  double radius_at(double u) const;

  const Ball& ball() const noexcept { return ball_; }
  double volume() const noexcept { return volume_; }

 private:
  Space space_;
  Ball ball_;
  std::vector<Vec> basis_;
  double volume_;
  std::vector<double> knots_;
  std::vector<double> cdf_;
};

Point uniform_in_ball(const Space& space, const Ball& ball, Engine& engine);

struct PointCloud {
  std::vector<Point> points;
  double density = 1.0;
  double weight = 1.0;  // volume per sample, 1 / density
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  double volume_estimate() const noexcept { return static_cast<double>(points.size()) * weight; }
};

PointCloud make_cloud(std::vector<Point> points, double density = 1.0, std::uint64_t seed = 0);

/// Rejection sampling inside bounding_ball(region): density * V(envelope)
/// proposals, accepted ones kept in proposal order.
PointCloud sample(const Space& space, const Region& region, double density, std::uint64_t seed);

/// Same, with an explicit envelope (must contain the region).
PointCloud sample_in(const Space& space, const Region& region, const Ball& envelope, double density,
                     std::uint64_t seed);

struct VolumeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples_used = 0;
};

/// Hit-or-miss over the bounding ball.
VolumeEstimate volume_estimate(const Space& space, const Region& region, std::size_t samples, std::uint64_t seed);
VolumeEstimate volume_estimate_in(const Space& space, const Region& region, const Ball& envelope,
                                  std::size_t samples, std::uint64_t seed);

struct DiameterResult {
  double value = 0.0;
  std::size_t first = 0;
  std::size_t second = 0;
};

/// Exact maximum pairwise distance over the samples, O(N^2).
DiameterResult diameter(const Space& space, std::span<const Point> points);
inline DiameterResult diameter(const Space& space, const PointCloud& cloud) { return diameter(space, cloud.points); }

/// max of the two directed max-min distances, brute force.
double hausdorff(const Space& space, std::span<const Point> a, std::span<const Point> b);
inline double hausdorff(const Space& space, const PointCloud& a, const PointCloud& b) {
  return hausdorff(space, a.points, b.points);
}

/// Mean distance from each sample to its nearest other sample.
double mean_spacing(const Space& space, std::span<const Point> points);

}  // namespace isodiam

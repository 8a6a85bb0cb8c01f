#pragma once

// Minimum-norm points, hemisphere certificates, hull membership through the
// gnomonic chart, and convexity probes for balls and hulls.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "isodiam/geometry.hpp"
#include "isodiam/sampling.hpp"

namespace isodiam {

/// Nearest point of the Euclidean convex hull of `points` to the origin
/// (Wolfe's algorithm). Stops once |z|^2 - min_i <z, p_i> <= gap * scale^2,
/// where scale is the largest input norm. Returns exactly zero when the hull
/// contains the origin.
Vec min_norm_point(std::span<const Vec> points, double gap = 1e-10);

struct HemisphereCertificate {
  Vec z;              // nonzero; every sample has <z, x> >= min_margin
  double min_margin;  // > 0
};

/// Certificate that the sample lies in the open hemisphere around z / |z|.
std::optional<HemisphereCertificate> hemisphere_center(std::span<const Point> points);
inline std::optional<HemisphereCertificate> hemisphere_center(const PointCloud& cloud) {
  return hemisphere_center(cloud.points);
}

/// Affine chart in which geodesic hulls are Euclidean hulls. Spherical clouds
/// are first reflected so that their hemisphere certificate points at e.
class HullChart {
 public:
  /// Throws InvalidGeometry for a spherical cloud without a certificate.
  HullChart(const Space& space, std::span<const Point> points);

  /// Chart image of x, or nothing for spherical points outside the
  /// certified open hemisphere.
  std::optional<Vec> to_chart(const Point& x) const;
  Point from_chart(const Vec& y) const;
  const std::vector<Vec>& images() const noexcept { return images_; }

 private:
  Space space_;
  Vec mirror_;  // Householder vector; empty when no reflection is needed
  std::vector<Vec> images_;
};

/// Whether `query` lies in the geodesic convex hull of the cloud (tolerance 1e-9 in the chart).
bool hull_contains(const Space& space, std::span<const Point> points, const Point& query);
inline bool hull_contains(const Space& space, const PointCloud& cloud, const Point& query) {
  return hull_contains(space, cloud.points, query);
}

struct HullDiameter {
  double cloud = 0.0;  // diameter of the input points
  double hull = 0.0;   // diameter of the points plus random hull samples
};

/// Spherical clouds must have diameter <= pi/2.
HullDiameter hull_diameter_check(const Space& space, std::span<const Point> points, std::size_t hull_samples,
                                 std::uint64_t seed);

struct ConvexityProbe {
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::optional<std::pair<Point, Point>> witness;  // first violating pair in trial order
};

/// Random pairs of the ball whose geodesic midpoint falls outside it.
ConvexityProbe ball_convexity_probe(const Space& space, const Ball& ball, std::size_t trials, std::uint64_t seed);

}  // namespace isodiam

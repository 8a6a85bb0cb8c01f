#pragma once

// Immutable membership oracles: CSG trees over balls and half spaces, with a
// node for the two-point symmetrization of a subtree.

#include <cstddef>
#include <memory>
#include <vector>

#include "isodiam/geometry.hpp"

namespace isodiam {

class BallIndex;

class Region {
 public:
  enum class Kind { Ball, HalfSpace, Union, Intersection, Difference, Symmetrized };

  static Region ball(const Ball& ball);
  static Region halfspace(const Hyperplane& h);
  static Region unite(std::vector<Region> children);
  static Region intersect(std::vector<Region> children);
  static Region difference(Region a, Region b);
  /// tau_H(inner), H^+ being the side that gains mass.
  static Region symmetrized(const Hyperplane& h, Region inner);
  /// Union of equal-radius balls, backed by a spatial hash. Membership is
  /// identical to `unite` over the same balls.
  static Region ball_union(const Space& space, std::vector<Point> centers, double radius);

  Kind kind() const noexcept;
  const Ball& as_ball() const;
  /// HalfSpace and Symmetrized nodes.
  const Hyperplane& hyperplane() const;
  /// Union/Intersection: operands. Difference: {a, b}. Symmetrized: {inner}.
  const std::vector<Region>& children() const noexcept;
  const Region& inner() const;

  /// Longest chain of Symmetrized nodes on any root-leaf path.
  int symmetrization_depth() const noexcept;
  std::size_t node_count() const noexcept;
  /// Non-null for ball_union nodes.
  const BallIndex* index() const noexcept;

 private:
  struct Node;
  explicit Region(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

const char* to_string(Region::Kind kind);

bool contains(const Space& space, const Region& region, const Point& x);

/// A ball containing the region (not minimal). Spherical regions that cannot be
/// bounded otherwise get the whole sphere, Ball{e, pi}.
Ball bounding_ball(const Space& space, const Region& region);

/// sigma_mirror(region) as a tree of the same shape.
Region reflect_region(const Space& space, const Hyperplane& mirror, const Region& region);

/// Same node kinds, same parameters bit-for-bit.
bool structurally_equal(const Region& a, const Region& b);

/// Smallest ball containing both (exact for R^n, a valid enclosure otherwise).
Ball enclosing_ball(const Space& space, const Ball& a, const Ball& b);

}  // namespace isodiam

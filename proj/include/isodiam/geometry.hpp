#pragma once

// Ambient-coordinate kernel for the three model spaces of constant curvature.
//
//   Euclidean  R^n : points are vectors of length n, the usual inner product.
//   Spherical  S^n : unit vectors of R^{n+1}.
//   Hyperbolic H^n : hyperboloid sheet {B(x,x) = 1, x_n >= 1} of R^{n+1}, where
//                    B(x,y) = x_n y_n - sum_{i<n} x_i y_i.
//
// The distinguished point e (the "pole") is the last coordinate axis for the
// curved models and the origin for R^n.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "isodiam/vec.hpp"

namespace isodiam {

enum class Curvature : int { Hyperbolic = -1, Euclidean = 0, Spherical = 1 };

std::string_view to_string(Curvature c);
Curvature curvature_from_string(std::string_view name);

class Point;

class Space {
 public:
  Space(Curvature curvature, int dim);

  static Space sphere(int dim) { return {Curvature::Spherical, dim}; }
  static Space hyperbolic(int dim) { return {Curvature::Hyperbolic, dim}; }
  static Space euclidean(int dim) { return {Curvature::Euclidean, dim}; }

  Curvature curvature() const noexcept { return curvature_; }
  int dim() const noexcept { return dim_; }
  int ambient_dim() const noexcept { return curvature_ == Curvature::Euclidean ? dim_ : dim_ + 1; }
  bool spherical() const noexcept { return curvature_ == Curvature::Spherical; }
  bool hyperbolic() const noexcept { return curvature_ == Curvature::Hyperbolic; }
  bool euclidean() const noexcept { return curvature_ == Curvature::Euclidean; }

  /// e: last axis on the quadrics, origin in R^n.
  Point pole() const;

  std::string describe() const;

  friend bool operator==(const Space&, const Space&) = default;

 private:
  Curvature curvature_;
  int dim_;
};

/// A point of the model. Construct with `Point::on`, which checks the quadric
/// invariant to 1e-10; kernel operations return already-normalized points.
class Point {
 public:
  static Point on(const Space& space, const Vec& coords);
  /// Skips validation. For coordinates produced by `normalize_to_space` or an
  /// equivalent exact construction.
  static Point trusted(const Vec& coords) { return Point(coords); }

  const Vec& coords() const noexcept { return coords_; }
  int size() const noexcept { return coords_.size(); }
  double operator[](int i) const noexcept { return coords_[i]; }

  friend bool operator==(const Point& a, const Point& b) noexcept { return a.coords_ == b.coords_; }

 private:
  explicit Point(const Vec& coords) : coords_(coords) {}
  Vec coords_;
};

struct Tangent {
  Point base;
  Vec vec;
};

/// Totally geodesic hypersurface H = {form(x, normal) = offset} with the
/// closed half space H^+ = {orientation * (form(x, normal) - offset) >= 0}.
/// `offset` is nonzero only in R^n. Normals are stored scaled to unit length
/// (|form(p,p)| = 1 on the quadrics).
struct Hyperplane {
  Vec normal;
  double offset = 0.0;
  int orientation = 1;
};

struct Ball {
  Point center;
  double radius;
};

inline constexpr double kPointTolerance = 1e-10;
inline constexpr double kSideTolerance = 1e-12;

void require_ambient(const Space& space, const Vec& v);

/// <x,y> for curvature >= 0, B(x,y) for the hyperboloid.
double form(const Space& space, const Vec& x, const Vec& y);

double distance(const Space& space, const Point& x, const Point& y);

/// Unnormalized monotone proxy of distance: larger means farther.
/// Used by the O(N^2) loops to avoid inverse trigonometry per pair.
inline double distance_key(const Space& space, const Vec& x, const Vec& y) {
  switch (space.curvature()) {
    case Curvature::Spherical: return -dot(x, y);
    case Curvature::Hyperbolic: {
      double s = x.back() * y.back();
      for (int i = 0; i + 1 < x.size(); ++i) s -= x[i] * y[i];
      return s;
    }
    case Curvature::Euclidean: {
      double s = 0.0;
      for (int i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
      return s;
    }
  }
  return 0.0;
}

/// Tangent-space norm: sqrt(<v,v>) or sqrt(-B(v,v)).
double tangent_norm(const Space& space, const Vec& v);

/// Validated unit tangent at `base`.
Tangent make_unit_tangent(const Space& space, const Point& base, const Vec& vec);

Point geodesic_point(const Space& space, const Tangent& u, double t);

struct TangentAndDistance {
  Tangent direction;
  double t;
};
TangentAndDistance tangent_toward(const Space& space, const Point& z, const Point& x);

/// Rescale raw onto the model; identity for R^n.
Point normalize_to_space(const Space& space, const Vec& raw);

/// Orthonormal basis (w.r.t. the tangent metric) of T_z; `dim` vectors.
std::vector<Vec> tangent_basis(const Space& space, const Point& z);

/// Midpoint of the geodesic segment [x, y]; x != -y on the sphere.
Point midpoint(const Space& space, const Point& x, const Point& y);

Hyperplane make_hyperplane(const Space& space, const Vec& normal, int orientation, double offset = 0.0);

/// Perpendicular bisector of [x, y], oriented so that x lies in H^+.
Hyperplane bisector(const Space& space, const Point& x, const Point& y);

Point reflect(const Space& space, const Hyperplane& h, const Point& x);

/// Image of `h` under the reflection in `mirror`, with H^+ mapped to H^+.
Hyperplane reflect_hyperplane(const Space& space, const Hyperplane& mirror, const Hyperplane& h);

/// Signed form value orientation * (form(x, p) - offset).
double signed_offset(const Space& space, const Hyperplane& h, const Point& x);

/// Geodesic distance from x to H, positive on the H^+ side.
double signed_distance(const Space& space, const Hyperplane& h, const Point& x);

/// +1, 0, -1; values within 1e-12 of H count as 0.
int side(const Space& space, const Hyperplane& h, const Point& x);

/// x / <x, e> in the affine plane e^perp + e. For R^n, (x, 1).
Vec project_gnomonic(const Space& space, const Point& x);

/// Inverse of project_gnomonic.
Point unproject_gnomonic(const Space& space, const Vec& y);

Ball make_ball(const Space& space, const Point& center, double radius);

/// Volume of a ball of radius r; adaptive Gauss-Kronrod on the radial integrand.
double ball_volume(const Space& space, double r);

/// Radial density s(t)^{n-1} with s = sin, sinh or identity.
double radial_density(const Space& space, double t);

/// Radius r with ball_volume(r) = volume, by bisection to 1e-10.
double radius_for_volume(const Space& space, double volume);

/// Total measure of the space (4*pi for S^2); infinity off the sphere.
double total_volume(const Space& space);

/// Largest admissible ball radius: pi on the sphere, infinity otherwise.
double max_radius(const Space& space);

}  // namespace isodiam

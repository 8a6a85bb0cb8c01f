#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "isodiam/convexity.hpp"
#include "test_support.hpp"

using namespace isodiam;
using isodiam::testing::all_spaces;
using isodiam::testing::gaussian_vec;
using isodiam::testing::random_point;

namespace {

constexpr double kPi = std::numbers::pi;

double sq(const Vec& v) { return dot(v, v); }

// Minimum of |s a + t b + (1 - s - t) c| over the triangle by nested grids.
double triangle_min(const Vec& a, const Vec& b, const Vec& c) {
  auto value = [&](double s, double t) { return sq(s * a + t * b + (1.0 - s - t) * c); };
  double bs = 0.0, bt = 0.0, best = value(0, 0);
  double h = 1.0 / 20.0;
  double s0 = 0.0, s1 = 1.0, t0 = 0.0, t1 = 1.0;
  for (int level = 0; level < 16; ++level) {
    for (double s = s0; s <= s1 + 1e-15; s += h) {
      for (double t = t0; t <= t1 + 1e-15; t += h) {
        const double cs = std::clamp(s, 0.0, 1.0);
        const double ct = std::clamp(t, 0.0, 1.0 - cs);
        const double v = value(cs, ct);
        if (v < best) {
          best = v;
          bs = cs;
          bt = ct;
        }
      }
    }
    s0 = bs - 2 * h;
    s1 = bs + 2 * h;
    t0 = bt - 2 * h;
    t1 = bt + 2 * h;
    h /= 4.0;
  }
  return std::sqrt(best);
}

double brute_force_min_norm(const std::vector<Vec>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      for (std::size_t k = j + 1; k < pts.size(); ++k) best = std::min(best, triangle_min(pts[i], pts[j], pts[k]));
  return best;
}

Point sphere_point(const Vec& v) { return Point::on(Space::sphere(static_cast<int>(v.size()) - 1), v / norm(v)); }

// Uniform random rotation of R^3 from a normalized quaternion.
std::array<Vec, 3> random_rotation(Engine& rng) {
  double q[4];
  double n = 0.0;
  for (double& c : q) {
    c = rng.normal();
    n += c * c;
  }
  n = std::sqrt(n);
  for (double& c : q) c /= n;
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  return {Vec{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
          Vec{2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
          Vec{2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}};
}

Vec rotate(const std::array<Vec, 3>& rot, const Vec& v) { return Vec{dot(rot[0], v), dot(rot[1], v), dot(rot[2], v)}; }

std::vector<Point> cap_cloud(const Space& space, const Point& center, double radius, int count, Engine& rng) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) out.push_back(uniform_in_ball(space, make_ball(space, center, radius), rng));
  return out;
}

}  // namespace

TEST_CASE("min_norm_point: symmetric examples") {
  const std::vector<Vec> a{Vec{1, 0}, Vec{0, 1}};
  const Vec za = min_norm_point(a);
  CHECK(za[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(za[1] == doctest::Approx(0.5).epsilon(1e-12));
  const std::vector<Vec> b{Vec{1, 0}, Vec{-1, 0}};
  const Vec zb = min_norm_point(b);
  CHECK(zb[0] == 0.0);
  CHECK(zb[1] == 0.0);
  CHECK_THROWS_AS(min_norm_point(std::vector<Vec>{}), InvalidGeometry);
}

TEST_CASE("min_norm_point agrees with a brute-force barycentric grid") {
  Engine rng(21);
  for (int cloud = 0; cloud < 4; ++cloud) {
    std::vector<Vec> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(Vec{4.5 + rng.normal(), rng.normal(), rng.normal()});
    // A positive first coordinate keeps the origin off the hull, so the nearest point lies on a triangle.
    for (const Vec& p : pts) REQUIRE(p[0] > 0.0);
    const double fast = norm(min_norm_point(pts));
    const double slow = brute_force_min_norm(pts);
    CHECK(std::abs(fast - slow) <= 1e-6);
  }
}

TEST_CASE("min_norm_point satisfies the nearest-point inequality") {
  Engine rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    const int dim = 2 + trial % 7;
    const int count = 1 + static_cast<int>(rng.uniform() * 40);
    Vec shift = gaussian_vec(dim, rng) * (3.0 * rng.uniform());
    std::vector<Vec> pts;
    for (int i = 0; i < count; ++i) pts.push_back(gaussian_vec(dim, rng) + shift);
    const Vec z = min_norm_point(pts);
    for (const Vec& x : pts) REQUIRE(dot(z, x - z) >= -1e-8);
  }
}

TEST_CASE("min_norm_point on degenerate inputs") {
  Engine rng(28);
  for (int trial = 0; trial < 2000; ++trial) {
    const int dim = 2 + trial % 4;
    // Points on a random line or plane, with duplicates.
    const int rank = 1 + trial % 2;
    std::vector<Vec> dirs;
    for (int r = 0; r < rank; ++r) dirs.push_back(gaussian_vec(dim, rng));
    const Vec base = gaussian_vec(dim, rng) * (trial % 3 == 0 ? 0.0 : rng.uniform());
    std::vector<Vec> pts;
    for (int i = 0; i < 3 + trial % 9; ++i) {
      Vec p = base;
      for (const Vec& d : dirs) p += rng.normal() * d;
      pts.push_back(p);
      if (i % 3 == 0) pts.push_back(p);
    }
    const Vec z = min_norm_point(pts);
    for (const Vec& x : pts) REQUIRE(dot(z, x - z) >= -1e-8);
  }
}

TEST_CASE("hemisphere_center: examples") {
  Engine rng(23);
  const Space s2 = Space::sphere(2);
  const auto small = cap_cloud(s2, s2.pole(), 0.3, 200, rng);
  const auto cert = hemisphere_center(small);
  REQUIRE(cert.has_value());
  CHECK(cert->z[2] / norm(cert->z) > std::cos(0.3));
  CHECK(cert->min_margin > 0.0);

  std::vector<Point> axes;
  for (int i = 0; i < 3; ++i) {
    axes.push_back(Point::on(s2, Vec::unit(3, i)));
    axes.push_back(Point::on(s2, -Vec::unit(3, i)));
  }
  CHECK_FALSE(hemisphere_center(axes).has_value());
}

TEST_CASE("hemisphere_center: clouds below the simplex angle are certified") {
  const double bound = std::acos(-1.0 / 3.0);
  CHECK(bound == doctest::Approx(1.91063).epsilon(1e-5));
  const Space s2 = Space::sphere(2);
  Engine rng(24);
  int tested = 0;
  double closest = 0.0;
  while (tested < 120) {
    std::vector<Point> cloud;
    if (tested % 2 == 0) {
      // Few uniform points: some configurations come close to the regular simplex.
      const int count = 4 + tested % 4 / 2;
      for (int i = 0; i < count; ++i) cloud.push_back(sphere_point(gaussian_vec(3, rng)));
    } else {
      cloud = cap_cloud(s2, random_point(s2, rng, kPi), 0.95, 50, rng);
    }
    const double d = diameter(s2, cloud).value;
    if (d >= bound - 1e-6) continue;
    if (tested % 2 == 0) closest = std::max(closest, d);
    ++tested;
    const auto cert = hemisphere_center(cloud);
    REQUIRE(cert.has_value());
    for (const Point& p : cloud) REQUIRE(dot(cert->z, p.coords()) > 0.0);
  }
  CHECK(closest > 1.8);
}

TEST_CASE("hull_contains: examples in every space") {
  Engine rng(25);
  for (const Space& space : all_spaces(3)) {
    const Point c = random_point(space, rng, 1.0);
    const double r = 0.6;
    const auto cloud = cap_cloud(space, c, r, 30, rng);
    for (const Point& p : cloud) CHECK(hull_contains(space, cloud, p));
    for (int i = 0; i < 20; ++i) {
      const Point m = midpoint(space, cloud[static_cast<std::size_t>(i)], cloud[static_cast<std::size_t>(i) + 1]);
      CHECK(hull_contains(space, cloud, m));
    }
    // The cloud lies in the convex ball B(c, r); points beyond it are outside the hull.
    for (int i = 0; i < 50; ++i) {
      const Point q = random_point(space, rng, kPi);
      if (distance(space, c, q) <= r + 1e-6) continue;
      CHECK_FALSE(hull_contains(space, cloud, q));
    }
  }
  const Space s2 = Space::sphere(2);
  std::vector<Point> bad{Point::on(s2, {1, 0, 0}), Point::on(s2, {-1, 0, 0})};
  CHECK_THROWS_AS(hull_contains(s2, bad, s2.pole()), InvalidGeometry);
}

TEST_CASE("hull membership is monotone and rotation invariant") {
  Engine rng(26);
  const Space s2 = Space::sphere(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Point c = random_point(s2, rng, kPi);
    const auto cloud = cap_cloud(s2, c, 0.7, 12, rng);
    auto more = cloud;
    for (const Point& p : cap_cloud(s2, c, 0.7, 6, rng)) more.push_back(p);
    const auto rot = random_rotation(rng);
    std::vector<Point> turned;
    for (const Point& p : cloud) turned.push_back(sphere_point(rotate(rot, p.coords())));
    for (int i = 0; i < 100; ++i) {
      const Point q = uniform_in_ball(s2, make_ball(s2, c, 0.8), rng);
      const bool inside = hull_contains(s2, cloud, q);
      if (inside) CHECK(hull_contains(s2, more, q));
      CHECK(hull_contains(s2, turned, sphere_point(rotate(rot, q.coords()))) == inside);
    }
  }
}

TEST_CASE("hull_diameter_check: examples and bound") {
  Engine rng(27);
  for (const Space& space : all_spaces(2)) {
    const std::vector<Point> two{random_point(space, rng, 0.5), random_point(space, rng, 0.5)};
    const HullDiameter d = hull_diameter_check(space, two, 500, 1);
    CHECK(std::abs(d.cloud - distance(space, two[0], two[1])) <= 1e-9);
    CHECK(std::abs(d.hull - d.cloud) <= 1e-9);
  }

  const Space s2 = Space::sphere(2);
  // Points on the boundary circle of a cap of radius 0.6: diameter 1.2 < pi/2.
  std::vector<Point> ring;
  for (int i = 0; i < 24; ++i) {
    const double a = 2 * kPi * i / 24.0;
    ring.push_back(Point::on(s2, {std::sin(0.6) * std::cos(a), std::sin(0.6) * std::sin(a), std::cos(0.6)}));
  }
  const HullDiameter dr = hull_diameter_check(s2, ring, 4000, 2);
  CHECK(dr.cloud == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(dr.hull <= dr.cloud + 1e-9);
  CHECK(dr.hull >= dr.cloud - 2e-3);

  const Space r2 = Space::euclidean(2);
  const std::vector<Point> tri{Point::on(r2, {0, 0}), Point::on(r2, {4, 0}), Point::on(r2, {1, 2})};
  const HullDiameter dt = hull_diameter_check(r2, tri, 2000, 3);
  CHECK(dt.cloud == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(std::abs(dt.hull - 4.0) <= 1e-9);

  for (const Space& space : all_spaces(3)) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto cloud = cap_cloud(space, random_point(space, rng, 1.0), 0.7, 15, rng);
      const HullDiameter d = hull_diameter_check(space, cloud, 1000, 4 + trial);
      CHECK(d.hull <= d.cloud + 1e-9);
    }
  }
  const auto wide = cap_cloud(s2, s2.pole(), 1.2, 80, rng);
  CHECK_THROWS_AS(hull_diameter_check(s2, wide, 100, 5), InvalidGeometry);
}

TEST_CASE("ball_convexity_probe") {
  const Space h2 = Space::hyperbolic(2);
  for (double r : {0.3, 1.5, 4.0}) {
    CHECK(ball_convexity_probe(h2, make_ball(h2, h2.pole(), r), 10000, 7).violations == 0);
  }
  const Space s2 = Space::sphere(2);
  for (double r : {kPi / 4, 1.5}) {
    CHECK(ball_convexity_probe(s2, make_ball(s2, s2.pole(), r), 10000, 8).violations == 0);
  }
  const Ball wide = make_ball(s2, s2.pole(), 3 * kPi / 4);
  const ConvexityProbe p = ball_convexity_probe(s2, wide, 10000, 9);
  CHECK(p.violations >= 1);
  REQUIRE(p.witness.has_value());
  const auto& [x, y] = *p.witness;
  CHECK(distance(s2, wide.center, x) <= wide.radius);
  CHECK(distance(s2, wide.center, y) <= wide.radius);
  CHECK(distance(s2, wide.center, midpoint(s2, x, y)) > wide.radius);

  const Space r3 = Space::euclidean(3);
  CHECK(ball_convexity_probe(r3, make_ball(r3, r3.pole(), 2.0), 5000, 10).violations == 0);
  const ConvexityProbe again = ball_convexity_probe(s2, wide, 10000, 9);
  CHECK(again.violations == p.violations);
}

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "isodiam/geometry.hpp"
#include "test_support.hpp"

using namespace isodiam;
using isodiam::testing::random_hyperplane;
using isodiam::testing::random_point;
using isodiam::testing::random_unit_tangent;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed-form radial integrals by the reduction formulas
//   int sin^m  = -sin^{m-1} cos / m + (m-1)/m int sin^{m-2}
//   int sinh^m =  sinh^{m-1} cosh / m - (m-1)/m int sinh^{m-2}
double sin_power_integral(int m, double r) {
  if (m == 0) return r;
  if (m == 1) return 1.0 - std::cos(r);
  return -std::pow(std::sin(r), m - 1) * std::cos(r) / m + (m - 1.0) / m * sin_power_integral(m - 2, r);
}

double sinh_power_integral(int m, double r) {
  if (m == 0) return r;
  if (m == 1) return std::cosh(r) - 1.0;
  return std::pow(std::sinh(r), m - 1) * std::cosh(r) / m - (m - 1.0) / m * sinh_power_integral(m - 2, r);
}

double closed_form_volume(const Space& space, double r) {
  const int n = space.dim();
  const double omega = 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
  switch (space.curvature()) {
    case Curvature::Spherical: return omega * sin_power_integral(n - 1, r);
    case Curvature::Hyperbolic: return omega * sinh_power_integral(n - 1, r);
    case Curvature::Euclidean: return omega * std::pow(r, n) / n;
  }
  return 0.0;
}

}  // namespace

TEST_CASE("form: hyperboloid and Euclidean inner products") {
  const Space h2 = Space::hyperbolic(2);
  const Space s2 = Space::sphere(2);
  CHECK(form(h2, Vec{0, 0, 1}, Vec{0, 0, 1}) == 1.0);
  CHECK(form(s2, Vec{1, 0, 0}, Vec{0, 1, 0}) == 0.0);
  CHECK(form(h2, Vec{1, 0, 0}, Vec{1, 0, 0}) == -1.0);
  CHECK_THROWS_AS(form(h2, Vec{1, 0}, Vec{1, 0, 0}), DimensionMismatch);
}

TEST_CASE("distance: reference values") {
  const Space s2 = Space::sphere(2);
  const Space h2 = Space::hyperbolic(2);
  CHECK(distance(s2, Point::on(s2, {1, 0, 0}), Point::on(s2, {0, 1, 0})) == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(distance(h2, h2.pole(), Point::on(h2, {std::sinh(1.0), 0, std::cosh(1.0)})) ==
        doctest::Approx(1.0).epsilon(1e-14));
  const Point x = Point::on(s2, {0.6, 0.8, 0});
  CHECK(distance(s2, x, x) == 0.0);
  CHECK(distance(s2, x, Point::on(s2, {-0.6, -0.8, 0})) == doctest::Approx(kPi));
}

TEST_CASE("Point::on rejects coordinates off the model") {
  CHECK_THROWS_AS(Point::on(Space::sphere(2), {1, 1, 0}), InvalidGeometry);
  CHECK_THROWS_AS(Point::on(Space::hyperbolic(2), {0, 0, -1}), InvalidGeometry);
  CHECK_THROWS_AS(Point::on(Space::hyperbolic(2), {1, 0, 1}), InvalidGeometry);
  CHECK_THROWS_AS(Point::on(Space::sphere(2), {1, 0}), DimensionMismatch);
  CHECK_NOTHROW(Point::on(Space::euclidean(2), {1e6, -3}));
  CHECK_THROWS_AS(Space::sphere(1), InvalidGeometry);
}

TEST_CASE("geodesic_point and tangent_toward") {
  const Space s2 = Space::sphere(2);
  const Space h2 = Space::hyperbolic(2);
  const Space r2 = Space::euclidean(2);

  const Point z = Point::on(s2, {1, 0, 0});
  const Point q = geodesic_point(s2, make_unit_tangent(s2, z, {0, 1, 0}), kPi / 2);
  CHECK(max_abs_diff(q.coords(), Vec{0, 1, 0}) < 1e-15);

  const Point hq = geodesic_point(h2, make_unit_tangent(h2, h2.pole(), {1, 0, 0}), 1.0);
  CHECK(max_abs_diff(hq.coords(), Vec{std::sinh(1.0), 0, std::cosh(1.0)}) < 1e-14);
  CHECK(geodesic_point(h2, make_unit_tangent(h2, h2.pole(), {1, 0, 0}), 0.0) == h2.pole());

  const auto back = tangent_toward(s2, z, Point::on(s2, {0, 1, 0}));
  CHECK(max_abs_diff(back.direction.vec, Vec{0, 1, 0}) < 1e-15);
  CHECK(back.t == doctest::Approx(kPi / 2));

  const auto hback = tangent_toward(h2, h2.pole(), hq);
  CHECK(max_abs_diff(hback.direction.vec, Vec{1, 0, 0}) < 1e-12);
  CHECK(hback.t == doctest::Approx(1.0).epsilon(1e-13));

  const auto eback = tangent_toward(r2, r2.pole(), Point::on(r2, {3, 4}));
  CHECK(max_abs_diff(eback.direction.vec, Vec{0.6, 0.8}) < 1e-15);
  CHECK(eback.t == 5.0);

  CHECK_THROWS_AS(tangent_toward(s2, z, z), DegenerateInput);
  CHECK_THROWS_AS(tangent_toward(s2, z, Point::on(s2, {-1, 0, 0})), DegenerateInput);
  CHECK_THROWS_AS(make_unit_tangent(s2, z, {0, 2, 0}), InvalidGeometry);
  CHECK_THROWS_AS(make_unit_tangent(s2, z, {1, 0, 0}), InvalidGeometry);
}

TEST_CASE("normalize_to_space") {
  const Space s2 = Space::sphere(2);
  const Space h2 = Space::hyperbolic(2);
  CHECK(normalize_to_space(s2, {2, 0, 0}).coords() == Vec{1, 0, 0});
  CHECK(normalize_to_space(h2, {0, 0, 2}).coords() == Vec{0, 0, 1});
  const Vec unit{0.6, 0.0, 0.8};
  CHECK(max_abs_diff(normalize_to_space(s2, unit).coords(), unit) < 1e-16);
  CHECK_THROWS_AS(normalize_to_space(s2, {0, 0, 0}), InvalidGeometry);
  CHECK_THROWS_AS(normalize_to_space(h2, {2, 0, 1}), InvalidGeometry);
}

TEST_CASE("bisector: orientation and equidistance") {
  const Space s2 = Space::sphere(2);
  const Point x = Point::on(s2, {1, 0, 0});
  const Point y = Point::on(s2, {0, 1, 0});
  const Hyperplane h = bisector(s2, x, y);
  CHECK(h.normal[0] == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(h.normal[1] == doctest::Approx(-1 / std::sqrt(2.0)));
  CHECK(side(s2, h, x) == 1);
  CHECK(side(s2, h, y) == -1);
  const Point m = midpoint(s2, x, y);
  CHECK(std::abs(form(s2, m.coords(), x.coords() - y.coords())) < 1e-15);
  CHECK(side(s2, h, m) == 0);

  const Space h2 = Space::hyperbolic(2);
  const double sh = std::sinh(1.0), ch = std::cosh(1.0);
  const Hyperplane hb = bisector(h2, Point::on(h2, {sh, 0, ch}), Point::on(h2, {-sh, 0, ch}));
  CHECK(form(h2, hb.normal, hb.normal) < 0);
  CHECK(hb.normal[1] == 0.0);
  CHECK(hb.normal[2] == 0.0);
  CHECK(side(h2, hb, Point::on(h2, {sh, 0, ch})) == 1);

  CHECK_THROWS_AS(bisector(s2, x, x), DegenerateInput);
  CHECK_THROWS_AS(bisector(s2, x, Point::on(s2, {-1, 0, 0})), DegenerateInput);
}

TEST_CASE("reflect: involution, swaps bisected pair, fixes H") {
  Engine rng(17);
  for (const Space& space : isodiam::testing::all_spaces(3)) {
    CAPTURE(space.describe());
    for (int trial = 0; trial < 200; ++trial) {
      const Hyperplane h = random_hyperplane(space, rng);
      const Point x = random_point(space, rng);
      const Point y = random_point(space, rng);
      CHECK(max_abs_diff(reflect(space, h, reflect(space, h, x)).coords(), x.coords()) < 1e-12);
      CHECK(std::abs(distance(space, reflect(space, h, x), reflect(space, h, y)) - distance(space, x, y)) < 1e-10);
      const Hyperplane b = bisector(space, x, y);
      CHECK(max_abs_diff(reflect(space, b, x).coords(), y.coords()) < 1e-11);
      if (side(space, h, x) != 0) CHECK(side(space, h, reflect(space, h, x)) == -side(space, h, x));
    }
  }
  const Space s2 = Space::sphere(2);
  const Hyperplane h = make_hyperplane(s2, {0, 0, 1}, 1);
  const Point on = Point::on(s2, {0.6, 0.8, 0});
  CHECK(reflect(s2, h, on) == on);
  CHECK(side(s2, h, on) == 0);
}

TEST_CASE("reflect_hyperplane conjugates side()") {
  Engine rng(5);
  for (const Space& space : isodiam::testing::all_spaces(2)) {
    for (int trial = 0; trial < 200; ++trial) {
      const Hyperplane mirror = random_hyperplane(space, rng);
      const Hyperplane h = random_hyperplane(space, rng);
      const Hyperplane image = reflect_hyperplane(space, mirror, h);
      const Point y = random_point(space, rng);
      const double lhs = signed_offset(space, image, y);
      const double rhs = signed_offset(space, h, reflect(space, mirror, y));
      CHECK(std::abs(lhs - rhs) < 1e-9);
    }
  }
}

TEST_CASE("make_hyperplane validates the normal signature") {
  CHECK_THROWS_AS(make_hyperplane(Space::hyperbolic(2), {0, 0, 1}, 1), InvalidGeometry);
  CHECK_THROWS_AS(make_hyperplane(Space::sphere(2), {0, 0, 0}, 1), InvalidGeometry);
  CHECK_THROWS_AS(make_hyperplane(Space::sphere(2), {0, 0, 1}, 0), InvalidGeometry);
  CHECK_THROWS_AS(make_hyperplane(Space::sphere(2), {0, 0, 1}, 1, 0.5), InvalidGeometry);
  const Hyperplane h = make_hyperplane(Space::euclidean(2), {2, 0}, -1, 4);
  CHECK(h.normal == Vec{1, 0});
  CHECK(h.offset == 2.0);
}

TEST_CASE("project_gnomonic maps geodesics to straight lines") {
  const Space h2 = Space::hyperbolic(2);
  const Space s2 = Space::sphere(2);
  CHECK(project_gnomonic(h2, h2.pole()) == Vec{0, 0, 1});
  CHECK(project_gnomonic(s2, s2.pole()) == Vec{0, 0, 1});
  const double t = 0.7;
  const Vec img = project_gnomonic(h2, Point::on(h2, {std::sinh(t), 0, std::cosh(t)}));
  CHECK(img[0] == doctest::Approx(std::tanh(t)));
  CHECK(img[2] == 1.0);
  CHECK_THROWS_AS(project_gnomonic(s2, Point::on(s2, {1, 0, 0})), InvalidGeometry);

  Engine rng(99);
  for (const Space& space : {s2, h2}) {
    for (int trial = 0; trial < 200; ++trial) {
      const Point z = random_point(space, rng, space.spherical() ? 0.7 : 2.0);
      const Tangent u = random_unit_tangent(space, z, rng);
      const double a = -0.3 + 0.1 * rng.uniform(), b = 0.1 * rng.uniform(), c = 0.2 + 0.1 * rng.uniform();
      const Vec pa = project_gnomonic(space, geodesic_point(space, u, a));
      const Vec pb = project_gnomonic(space, geodesic_point(space, u, b));
      const Vec pc = project_gnomonic(space, geodesic_point(space, u, c));
      // Collinear iff the 2x2 determinant of the in-plane differences vanishes.
      const Vec d1 = pb - pa, d2 = pc - pa;
      CHECK(std::abs(d1[0] * d2[1] - d1[1] * d2[0]) < 1e-9);
    }
  }
  const Vec back = project_gnomonic(h2, unproject_gnomonic(h2, Vec{0.3, -0.2, 1.0}));
  CHECK(max_abs_diff(back, Vec{0.3, -0.2, 1.0}) < 1e-15);
}

TEST_CASE("ball_volume against closed forms") {
  const Space s2 = Space::sphere(2);
  const Space h2 = Space::hyperbolic(2);
  CHECK(ball_volume(s2, kPi / 4) == doctest::Approx(2 * kPi * (1 - std::cos(kPi / 4))).epsilon(1e-12));
  CHECK(ball_volume(s2, kPi / 4) == doctest::Approx(1.8403024).epsilon(1e-7));
  CHECK(ball_volume(h2, 1.0) == doctest::Approx(2 * kPi * (std::cosh(1.0) - 1)).epsilon(1e-12));
  CHECK(ball_volume(h2, 1.0) == doctest::Approx(3.4122763).epsilon(1e-7));
  CHECK(ball_volume(s2, kPi) == doctest::Approx(4 * kPi).epsilon(1e-12));
  CHECK(total_volume(s2) == doctest::Approx(4 * kPi));
  for (int n = 2; n <= 6; ++n) {
    for (const Space& space : isodiam::testing::all_spaces(n)) {
      for (double r : {0.05, 0.5, 1.3, 2.9}) {
        const double expected = closed_form_volume(space, r);
        // The reduction formulas cancel for tiny volumes; allow an absolute floor.
        CHECK(std::abs(ball_volume(space, r) - expected) <= 1e-10 * expected + 1e-14);
      }
    }
  }
  double prev = 0.0;
  for (double r = 0.1; r < kPi; r += 0.1) {
    const double v = ball_volume(s2, r);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(ball_volume(s2, 4.0), InvalidGeometry);
  CHECK_THROWS_AS(ball_volume(h2, -1.0), InvalidGeometry);
}

TEST_CASE("radius_for_volume inverts ball_volume") {
  for (const Space& space : isodiam::testing::all_spaces(3)) {
    for (double r : {0.1, 0.8, 1.7}) {
      CHECK(radius_for_volume(space, ball_volume(space, r)) == doctest::Approx(r).epsilon(1e-10));
    }
  }
}

TEST_CASE("tangent_basis is orthonormal for the tangent metric") {
  Engine rng(3);
  for (const Space& space : isodiam::testing::all_spaces(4)) {
    const Point z = random_point(space, rng, 2.5);
    const auto basis = tangent_basis(space, z);
    REQUIRE(static_cast<int>(basis.size()) == space.dim());
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (!space.euclidean()) CHECK(std::abs(form(space, basis[i], z.coords())) < 1e-10);
      for (std::size_t j = 0; j < basis.size(); ++j) {
        const double ip = space.hyperbolic() ? -form(space, basis[i], basis[j]) : dot(basis[i], basis[j]);
        CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-10);
      }
    }
  }
}

#include "isodiam/geometry.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace isodiam {

namespace {

constexpr double kPi = std::numbers::pi;

double sphere_area_factor(int n) {
  // omega_{n-1}: surface measure of the unit (n-1)-sphere.
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

// |x|_E scale used to make the tangent checks relative on the far hyperboloid.
double euclid_scale(const Vec& v) { return std::max(1.0, norm(v)); }

}  // namespace

std::string_view to_string(Curvature c) {
  switch (c) {
    case Curvature::Spherical: return "sphere";
    case Curvature::Hyperbolic: return "hyperbolic";
    case Curvature::Euclidean: return "euclidean";
  }
  return "?";
}

Curvature curvature_from_string(std::string_view name) {
  if (name == "sphere" || name == "spherical" || name == "S") return Curvature::Spherical;
  if (name == "hyperbolic" || name == "H") return Curvature::Hyperbolic;
  if (name == "euclidean" || name == "R") return Curvature::Euclidean;
  throw InvalidGeometry("unknown space '" + std::string(name) + "' (expected sphere, hyperbolic or euclidean)");
}

Space::Space(Curvature curvature, int dim) : curvature_(curvature), dim_(dim) {
  if (dim < 2) throw InvalidGeometry("dimension must be at least 2");
  if (dim + 1 > kMaxAmbientDim) throw InvalidGeometry("dimension exceeds supported maximum of 8");
}

Point Space::pole() const {
  Vec e(ambient_dim());
  if (!euclidean()) e[ambient_dim() - 1] = 1.0;
  return Point::trusted(e);
}

std::string Space::describe() const {
  std::ostringstream out;
  out << to_string(curvature_) << "^" << dim_;
  return out.str();
}

void require_ambient(const Space& space, const Vec& v) {
  if (v.size() != space.ambient_dim()) {
    std::ostringstream msg;
    msg << "expected " << space.ambient_dim() << " ambient coordinates for " << space.describe() << ", got "
        << v.size();
    throw DimensionMismatch(msg.str());
  }
}

Point Point::on(const Space& space, const Vec& coords) {
  require_ambient(space, coords);
  for (double c : coords) {
    if (!std::isfinite(c)) throw InvalidGeometry("point has non-finite coordinates");
  }
  if (space.spherical()) {
    if (std::abs(dot(coords, coords) - 1.0) > kPointTolerance) {
      throw InvalidGeometry("spherical point is not a unit vector");
    }
  } else if (space.hyperbolic()) {
    if (std::abs(form(space, coords, coords) - 1.0) > kPointTolerance * euclid_scale(coords)) {
      throw InvalidGeometry("hyperbolic point violates B(x,x) = 1");
    }
    if (coords.back() < 1.0 - kPointTolerance) throw InvalidGeometry("hyperbolic point is not on the upper sheet");
  }
  return Point(coords);
}

double form(const Space& space, const Vec& x, const Vec& y) {
  require_ambient(space, x);
  require_ambient(space, y);
  if (!space.hyperbolic()) return dot(x, y);
  const int last = x.size() - 1;
  double s = x[last] * y[last];
  for (int i = 0; i < last; ++i) s -= x[i] * y[i];
  return s;
}

double distance(const Space& space, const Point& x, const Point& y) {
  const Vec diff = x.coords() - y.coords();
  switch (space.curvature()) {
    case Curvature::Euclidean: return norm(diff);
    case Curvature::Spherical: {
      // atan2 form of arccos(<x,y>): well conditioned at both ends.
      const Vec sum = x.coords() + y.coords();
      return 2.0 * std::atan2(norm(diff), norm(sum));
    }
    case Curvature::Hyperbolic: {
      // -B(x-y, x-y) = 2 B(x,y) - 2 = 4 sinh^2(d/2).
      const double chord2 = std::max(0.0, -form(space, diff, diff));
      return 2.0 * std::asinh(0.5 * std::sqrt(chord2));
    }
  }
  return 0.0;
}

double tangent_norm(const Space& space, const Vec& v) {
  const double q = form(space, v, v);
  return std::sqrt(std::max(0.0, space.hyperbolic() ? -q : q));
}

Tangent make_unit_tangent(const Space& space, const Point& base, const Vec& vec) {
  require_ambient(space, vec);
  const double scale = euclid_scale(base.coords()) * euclid_scale(vec);
  if (!space.euclidean() && std::abs(form(space, vec, base.coords())) > kPointTolerance * scale) {
    throw InvalidGeometry("vector is not tangent at the base point");
  }
  if (std::abs(tangent_norm(space, vec) - 1.0) > kPointTolerance * scale) {
    throw InvalidGeometry("tangent vector is not unit length");
  }
  return {base, vec};
}

Point geodesic_point(const Space& space, const Tangent& u, double t) {
  const Vec& z = u.base.coords();
  switch (space.curvature()) {
    case Curvature::Euclidean: return Point::trusted(z + t * u.vec);
    case Curvature::Spherical: return normalize_to_space(space, std::cos(t) * z + std::sin(t) * u.vec);
    case Curvature::Hyperbolic: return normalize_to_space(space, std::cosh(t) * z + std::sinh(t) * u.vec);
  }
  return u.base;
}

TangentAndDistance tangent_toward(const Space& space, const Point& z, const Point& x) {
  const double t = distance(space, z, x);
  if (t == 0.0) throw DegenerateInput("tangent_toward: points coincide");
  Vec w = x.coords();
  if (!space.euclidean()) w -= form(space, x.coords(), z.coords()) * z.coords();
  else w -= z.coords();
  const double len = tangent_norm(space, w);
  if (len <= 1e-14 * euclid_scale(x.coords())) {
    throw DegenerateInput(space.spherical() ? "tangent_toward: antipodal points, geodesic not unique"
                                            : "tangent_toward: points coincide");
  }
  return {Tangent{z, w / len}, t};
}

Point normalize_to_space(const Space& space, const Vec& raw) {
  require_ambient(space, raw);
  switch (space.curvature()) {
    case Curvature::Euclidean: return Point::trusted(raw);
    case Curvature::Spherical: {
      const double len = norm(raw);
      if (!(len > 0.0) || !std::isfinite(len)) throw InvalidGeometry("cannot normalize the zero vector onto the sphere");
      return Point::trusted(raw / len);
    }
    case Curvature::Hyperbolic: {
      const double q = form(space, raw, raw);
      if (!(q > 0.0) || !std::isfinite(q)) throw InvalidGeometry("vector is not timelike; cannot normalize onto H^n");
      const double s = (raw.back() < 0.0 ? -1.0 : 1.0) / std::sqrt(q);
      return Point::trusted(raw * s);
    }
  }
  return Point::trusted(raw);
}

std::vector<Vec> tangent_basis(const Space& space, const Point& z) {
  const int m = space.ambient_dim();
  const int n = space.dim();
  std::vector<Vec> basis;
  basis.reserve(static_cast<std::size_t>(n));
  auto ip = [&](const Vec& a, const Vec& b) { return space.hyperbolic() ? -form(space, a, b) : dot(a, b); };
  for (int axis = 0; axis < m && static_cast<int>(basis.size()) < n; ++axis) {
    Vec v = Vec::unit(m, axis);
    if (!space.euclidean()) v -= form(space, v, z.coords()) * z.coords();
    // Two Gram-Schmidt passes keep the basis orthonormal to rounding.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& b : basis) v -= ip(v, b) * b;
    }
    const double len = std::sqrt(std::max(0.0, ip(v, v)));
    if (len > 1e-6) basis.push_back(v / len);
  }
  if (static_cast<int>(basis.size()) != n) throw DegenerateInput("failed to build a tangent basis");
  return basis;
}

Point midpoint(const Space& space, const Point& x, const Point& y) {
  const Vec sum = x.coords() + y.coords();
  if (space.euclidean()) return Point::trusted(sum * 0.5);
  if (space.spherical() && norm(sum) < 1e-12) throw DegenerateInput("midpoint of antipodal points is not unique");
  return normalize_to_space(space, sum);
}

Hyperplane make_hyperplane(const Space& space, const Vec& normal, int orientation, double offset) {
  require_ambient(space, normal);
  if (orientation != 1 && orientation != -1) throw InvalidGeometry("hyperplane orientation must be +1 or -1");
  if (!std::isfinite(offset)) throw InvalidGeometry("hyperplane offset must be finite");
  if (!space.euclidean() && offset != 0.0) {
    throw InvalidGeometry("hyperplanes of the curved models pass through the origin of R^{n+1} (offset must be 0)");
  }
  const double q = form(space, normal, normal);
  const double e2 = dot(normal, normal);
  if (!(e2 > 0.0) || !std::isfinite(e2)) throw InvalidGeometry("hyperplane normal must be nonzero");
  double scale = 0.0;
  if (space.hyperbolic()) {
    if (!(q < -1e-14 * e2)) throw InvalidGeometry("hyperbolic hyperplane normal needs B(p,p) < 0");
    scale = 1.0 / std::sqrt(-q);
  } else {
    scale = 1.0 / std::sqrt(q);
  }
  return Hyperplane{normal * scale, offset * scale, orientation};
}

Hyperplane bisector(const Space& space, const Point& x, const Point& y) {
  if (distance(space, x, y) == 0.0) throw DegenerateInput("bisector: points coincide");
  const Vec p = x.coords() - y.coords();
  if (space.euclidean()) {
    const double t = 0.5 * (dot(x.coords(), x.coords()) - dot(y.coords(), y.coords()));
    return make_hyperplane(space, p, 1, t);
  }
  if (space.spherical() && norm(x.coords() + y.coords()) < 1e-12) {
    throw DegenerateInput("bisector: antipodal points");
  }
  // form(x, x - y) = 1 - form(x, y): positive on S^n, negative on H^n.
  const int orientation = form(space, x.coords(), p) >= 0.0 ? 1 : -1;
  return make_hyperplane(space, p, orientation);
}

double signed_offset(const Space& space, const Hyperplane& h, const Point& x) {
  return h.orientation * (form(space, x.coords(), h.normal) - h.offset);
}

double signed_distance(const Space& space, const Hyperplane& h, const Point& x) {
  const double s = signed_offset(space, h, x);
  switch (space.curvature()) {
    case Curvature::Spherical: return std::asin(std::clamp(s, -1.0, 1.0));
    case Curvature::Hyperbolic: return std::asinh(s);
    case Curvature::Euclidean: return s;
  }
  return s;
}

int side(const Space& space, const Hyperplane& h, const Point& x) {
  const double s = signed_offset(space, h, x);
  if (std::abs(s) <= kSideTolerance) return 0;
  return s > 0.0 ? 1 : -1;
}

Point reflect(const Space& space, const Hyperplane& h, const Point& x) {
  const double pp = form(space, h.normal, h.normal);
  const double k = 2.0 * (form(space, x.coords(), h.normal) - h.offset) / pp;
  const Vec image = x.coords() - k * h.normal;
  if (space.euclidean()) return Point::trusted(image);
  return normalize_to_space(space, image);
}

Hyperplane reflect_hyperplane(const Space& space, const Hyperplane& mirror, const Hyperplane& h) {
  const double qq = form(space, mirror.normal, mirror.normal);
  const Vec rotated = h.normal - (2.0 * form(space, h.normal, mirror.normal) / qq) * mirror.normal;
  double offset = 0.0;
  if (space.euclidean()) {
    // sigma(y) = R y + b with b = 2 s q / <q,q>; <sigma y, p> = t  <=>  <y, R p> = t - <b, p>.
    const Vec b = (2.0 * mirror.offset / qq) * mirror.normal;
    offset = h.offset - dot(b, h.normal);
  }
  return make_hyperplane(space, rotated, h.orientation, offset);
}

Vec project_gnomonic(const Space& space, const Point& x) {
  if (space.euclidean()) {
    Vec y(space.ambient_dim() + 1);
    for (int i = 0; i < x.size(); ++i) y[i] = x[i];
    y[space.ambient_dim()] = 1.0;
    return y;
  }
  const double h = x.coords().back();
  if (space.spherical() && !(h > 0.0)) {
    throw InvalidGeometry("gnomonic projection needs a point in the open hemisphere around e");
  }
  return x.coords() / h;
}

Point unproject_gnomonic(const Space& space, const Vec& y) {
  if (space.euclidean()) {
    if (y.size() != space.ambient_dim() + 1) throw DimensionMismatch("affine chart vector has wrong length");
    Vec x(space.ambient_dim());
    for (int i = 0; i < x.size(); ++i) x[i] = y[i] / y.back();
    return Point::trusted(x);
  }
  require_ambient(space, y);
  if (!(y.back() > 0.0)) throw InvalidGeometry("affine chart vector must have positive last coordinate");
  if (space.hyperbolic() && !(form(space, y, y) > 0.0)) {
    throw InvalidGeometry("affine chart vector lies outside the Klein ball");
  }
  return normalize_to_space(space, y);
}

Ball make_ball(const Space& space, const Point& center, double radius) {
  require_ambient(space, center.coords());
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidGeometry("ball radius must be positive and finite");
  if (space.spherical() && !(radius < kPi)) throw InvalidGeometry("spherical ball radius must be below pi");
  return Ball{center, radius};
}

double radial_density(const Space& space, double t) {
  const int k = space.dim() - 1;
  switch (space.curvature()) {
    case Curvature::Spherical: return std::pow(std::sin(t), k);
    case Curvature::Hyperbolic: return std::pow(std::sinh(t), k);
    case Curvature::Euclidean: return std::pow(t, k);
  }
  return 0.0;
}

double ball_volume(const Space& space, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidGeometry("ball_volume: radius must be positive and finite");
  if (space.spherical() && r > kPi) throw InvalidGeometry("ball_volume: spherical radius exceeds pi");
  using boost::math::quadrature::gauss_kronrod;
  const auto integrand = [&](double t) { return radial_density(space, t); };
  const double integral = gauss_kronrod<double, 15>::integrate(integrand, 0.0, r, 20, 1e-12);
  return sphere_area_factor(space.dim()) * integral;
}

double total_volume(const Space& space) {
  if (!space.spherical()) return std::numeric_limits<double>::infinity();
  // |S^n| = omega_n = 2 pi^{(n+1)/2} / Gamma((n+1)/2).
  return sphere_area_factor(space.dim() + 1);
}

double max_radius(const Space& space) {
  return space.spherical() ? kPi : std::numeric_limits<double>::infinity();
}

double radius_for_volume(const Space& space, double volume) {
  if (!(volume > 0.0) || !std::isfinite(volume)) throw InvalidGeometry("radius_for_volume: volume must be positive");
  double lo = 0.0;
  double hi = 1.0;
  if (space.spherical()) {
    if (volume >= total_volume(space)) return kPi;
    hi = kPi;
  } else {
    while (ball_volume(space, hi) < volume) hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ball_volume(space, mid) < volume) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace isodiam

#include "isodiam/convexity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "isodiam/errors.hpp"
#include "isodiam/parallel.hpp"
#include "isodiam/random.hpp"

namespace isodiam {

namespace {

// Weights of the point of the affine hull of `active` nearest to the origin.
std::vector<double> affine_minimizer(std::span<const Vec> points, const std::vector<std::size_t>& active) {
  const std::size_t k = active.size();
  if (k == 1) return {1.0};
  const Vec& base = points[active.front()];
  const int dim = base.size();
  Eigen::MatrixXd edges(dim, static_cast<Eigen::Index>(k - 1));
  Eigen::VectorXd rhs(dim);
  for (int r = 0; r < dim; ++r) {
    rhs(r) = -base[r];
    for (std::size_t c = 1; c < k; ++c) edges(r, static_cast<Eigen::Index>(c - 1)) = points[active[c]][r] - base[r];
  }
  const Eigen::VectorXd beta = edges.colPivHouseholderQr().solve(rhs);
  std::vector<double> alpha(k);
  alpha[0] = 1.0 - beta.sum();
  for (std::size_t c = 1; c < k; ++c) alpha[c] = beta(static_cast<Eigen::Index>(c - 1));
  return alpha;
}

Vec combine(std::span<const Vec> points, const std::vector<std::size_t>& active, const std::vector<double>& weights) {
  Vec x(points.front().size());
  for (std::size_t i = 0; i < active.size(); ++i) x += weights[i] * points[active[i]];
  return x;
}

}  // namespace

Vec min_norm_point(std::span<const Vec> points, double gap) {
  if (points.empty()) throw InvalidGeometry("min_norm_point needs at least one point");
  const int dim = points.front().size();
  double scale2 = 0.0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) throw DimensionMismatch("min_norm_point inputs differ in length");
    const double n2 = dot(points[i], points[i]);
    if (n2 > scale2) scale2 = n2;
    if (n2 < dot(points[start], points[start])) start = i;
  }
  if (scale2 == 0.0) return Vec(dim);

  std::vector<std::size_t> active{start};
  std::vector<double> weights{1.0};
  Vec x = points[start];
  const std::size_t max_major = 100 * (points.size() + static_cast<std::size_t>(dim)) + 100;
  for (std::size_t major = 0; major < max_major; ++major) {
    std::size_t j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double v = dot(x, points[i]);
      if (v < best) {
        best = v;
        j = i;
      }
    }
    if (dot(x, x) - best <= gap * scale2 || dot(x, x) <= 1e-24 * scale2) break;
    if (std::find(active.begin(), active.end(), j) != active.end()) break;
    active.push_back(j);
    weights.push_back(0.0);

    // Each pass drops at least one point; a single point is its own minimizer.
    while (true) {
      const std::vector<double> alpha = affine_minimizer(points, active);
      if (std::all_of(alpha.begin(), alpha.end(), [](double a) { return a > 0.0; })) {
        weights = alpha;
        break;
      }
      double theta = std::numeric_limits<double>::infinity();
      std::size_t drop = 0;
      for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] > 0.0) continue;
        const double t = weights[i] / (weights[i] - alpha[i]);
        if (t < theta) {
          theta = t;
          drop = i;
        }
      }
      theta = std::min(theta, 1.0);
      for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = (1.0 - theta) * weights[i] + theta * alpha[i];
      weights[drop] = 0.0;
      std::vector<std::size_t> keep_idx;
      std::vector<double> keep_w;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) {
          keep_idx.push_back(active[i]);
          keep_w.push_back(weights[i]);
        }
      }
      active = std::move(keep_idx);
      weights = std::move(keep_w);
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= total;
    x = combine(points, active, weights);
  }
  if (dot(x, x) <= 1e-24 * scale2) return Vec(dim);
  return x;
}

std::optional<HemisphereCertificate> hemisphere_center(std::span<const Point> points) {
  if (points.empty()) return std::nullopt;
  std::vector<Vec> coords;
  coords.reserve(points.size());
  for (const Point& p : points) coords.push_back(p.coords());
  const Vec z = min_norm_point(coords);
  if (!(norm(z) > 1e-9)) return std::nullopt;
  double margin = std::numeric_limits<double>::infinity();
  for (const Vec& x : coords) margin = std::min(margin, dot(z, x));
  if (!(margin > 0.0)) return std::nullopt;
  return HemisphereCertificate{z, margin};
}

HullChart::HullChart(const Space& space, std::span<const Point> points) : space_(space) {
  if (points.empty()) throw InvalidGeometry("convex hull of an empty cloud");
  for (const Point& p : points) require_ambient(space, p.coords());
  if (space.spherical()) {
    const auto cert = hemisphere_center(points);
    if (!cert) throw InvalidGeometry("spherical cloud is not contained in an open hemisphere");
    Vec v = cert->z / norm(cert->z);
    v[v.size() - 1] -= 1.0;
    if (norm(v) > 1e-15) mirror_ = v;
  }
  images_.reserve(points.size());
  for (const Point& p : points) {
    auto y = to_chart(p);
    if (!y) throw InvalidGeometry("cloud point falls outside its own hemisphere");
    images_.push_back(*y);
  }
}

std::optional<Vec> HullChart::to_chart(const Point& x) const {
  require_ambient(space_, x.coords());
  if (!space_.spherical()) return project_gnomonic(space_, x);
  Vec r = x.coords();
  if (mirror_.size() > 0) r -= (2.0 * dot(mirror_, r) / dot(mirror_, mirror_)) * mirror_;
  if (!(r[r.size() - 1] > 0.0)) return std::nullopt;
  return r / r[r.size() - 1];
}

Point HullChart::from_chart(const Vec& y) const {
  const Point p = unproject_gnomonic(space_, y);
  if (!space_.spherical() || mirror_.size() == 0) return p;
  Vec r = p.coords();
  r -= (2.0 * dot(mirror_, r) / dot(mirror_, mirror_)) * mirror_;
  return normalize_to_space(space_, r);
}

bool hull_contains(const Space& space, std::span<const Point> points, const Point& query) {
  const HullChart chart(space, points);
  const auto q = chart.to_chart(query);
  if (!q) return false;
  std::vector<Vec> shifted;
  shifted.reserve(chart.images().size());
  double scale = 1.0;
  for (const Vec& y : chart.images()) {
    shifted.push_back(y - *q);
    scale = std::max(scale, norm(y));
  }
  return norm(min_norm_point(shifted, 1e-20)) <= 1e-9 * scale;
}

HullDiameter hull_diameter_check(const Space& space, std::span<const Point> points, std::size_t hull_samples,
                                 std::uint64_t seed) {
  if (points.empty()) throw InvalidGeometry("hull diameter of an empty cloud");
  HullDiameter out;
  out.cloud = diameter(space, points).value;
  if (space.spherical() && out.cloud > 0.5 * std::numbers::pi + 1e-12) {
    throw InvalidGeometry("spherical hull diameter check needs cloud diameter at most pi/2");
  }
  const HullChart chart(space, points);
  const std::vector<Vec>& images = chart.images();
  const std::size_t m = images.size();
  const std::size_t k = std::min<std::size_t>(m, static_cast<std::size_t>(space.dim()) + 1);
  const Stream stream(seed, streams::kHull);

  std::vector<Point> all(points.begin(), points.end());
  all.resize(m + hull_samples, points.front());
  parallel_for(hull_samples, [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> order(m);
    for (std::size_t s = begin; s < end; ++s) {
      Engine engine = stream.engine(s);
      std::iota(order.begin(), order.end(), std::size_t{0});
      // Uniform point of the simplex on k distinct random vertices.
      Vec y(images.front().size());
      double total = 0.0;
      std::vector<double> w(k);
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t pick = i + static_cast<std::size_t>(engine.uniform() * static_cast<double>(m - i));
        std::swap(order[i], order[std::min(pick, m - 1)]);
        w[i] = -std::log1p(-engine.uniform());
        total += w[i];
      }
      for (std::size_t i = 0; i < k; ++i) y += (w[i] / total) * images[order[i]];
      all[m + s] = chart.from_chart(y);
    }
  });
  out.hull = diameter(space, all).value;
  return out;
}

ConvexityProbe ball_convexity_probe(const Space& space, const Ball& ball, std::size_t trials, std::uint64_t seed) {
  const BallSampler sampler(space, ball);
  const Stream stream(seed, streams::kProbe);
  std::vector<char> bad(trials, 0);
  const double limit = ball.radius * (1.0 + 1e-12) + 1e-12;
  parallel_for(trials, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      Engine engine = stream.engine(t);
      const Point x = sampler.draw(engine);
      const Point y = sampler.draw(engine);
      if (space.spherical() && norm(x.coords() + y.coords()) < 1e-12) continue;
      bad[t] = distance(space, ball.center, midpoint(space, x, y)) > limit;
    }
  });
  ConvexityProbe out;
  out.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    if (!bad[t]) continue;
    ++out.violations;
    if (!out.witness) {
      Engine engine = stream.engine(t);
      const Point x = sampler.draw(engine);
      const Point y = sampler.draw(engine);
      out.witness.emplace(x, y);
    }
  }
  return out;
}

}  // namespace isodiam

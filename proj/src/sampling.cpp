#include "isodiam/sampling.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "isodiam/parallel.hpp"

namespace isodiam {

namespace {

constexpr std::size_t kRadialKnots = 256;

}  // namespace

BallSampler::BallSampler(const Space& space, const Ball& ball) : space_(space), ball_(ball) {
  require_ambient(space, ball.center.coords());
  if (!(ball.radius > 0.0)) throw InvalidGeometry("sampling ball needs positive radius");
  volume_ = ball_volume(space, ball.radius);
  basis_ = tangent_basis(space, ball.center);
  if (space.dim() == 2 || space.euclidean()) return;  // closed-form inverse CDF

  using boost::math::quadrature::gauss_kronrod;
  knots_.resize(kRadialKnots + 1);
  cdf_.resize(kRadialKnots + 1);
  const auto f = [&](double t) { return radial_density(space, t); };
  for (std::size_t k = 0; k <= kRadialKnots; ++k) knots_[k] = ball.radius * static_cast<double>(k) / kRadialKnots;
  cdf_[0] = 0.0;
  for (std::size_t k = 0; k < kRadialKnots; ++k) {
    cdf_[k + 1] = cdf_[k] + gauss_kronrod<double, 15>::integrate(f, knots_[k], knots_[k + 1], 0);
  }
}

double BallSampler::radius_at(double u) const {
  const double R = ball_.radius;
  if (space_.euclidean()) return R * std::pow(u, 1.0 / space_.dim());
  if (space_.dim() == 2) {
    // Area element sin t / sinh t: 1 - cos t = 2 sin^2(t/2), cosh t - 1 = 2 sinh^2(t/2).
    if (space_.spherical()) return 2.0 * std::asin(std::min(1.0, std::sqrt(u) * std::sin(0.5 * R)));
    return 2.0 * std::asinh(std::sqrt(u) * std::sinh(0.5 * R));
  }
  const double target = u * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
  std::size_t k = static_cast<std::size_t>(std::distance(cdf_.begin(), it));
  k = std::clamp<std::size_t>(k, 1, kRadialKnots) - 1;
  const double a = knots_[k];
  const double b = knots_[k + 1];
  const double span = cdf_[k + 1] - cdf_[k];
  double t = span > 0.0 ? a + (b - a) * (target - cdf_[k]) / span : a;
  const auto f = [&](double s) { return radial_density(space_, s); };
  using boost::math::quadrature::gauss;
  double lo = a;
  double hi = b;
  for (int it_newton = 0; it_newton < 12; ++it_newton) {
    const double g = cdf_[k] + gauss<double, 7>::integrate(f, a, t) - target;
    if (g == 0.0) return t;
    if (g > 0.0) hi = t;
    else lo = t;
    const double slope = f(t);
    double next = slope > 0.0 ? t - g / slope : 0.5 * (lo + hi);
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, t)) return next;
    t = next;
  }
  return t;
}

Point BallSampler::draw(Engine& engine) const {
  const double t = radius_at(engine.uniform());
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec dir(space_.ambient_dim());
  double len2 = 0.0;
  std::array<double, kMaxAmbientDim> g{};
  do {
    len2 = 0.0;
    for (int i = 0; i < space_.dim(); ++i) {
      g[static_cast<std::size_t>(i)] = gauss(engine);
      len2 += g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
    }
  } while (!(len2 > 0.0));
  const double inv = 1.0 / std::sqrt(len2);
  for (int i = 0; i < space_.dim(); ++i) dir += (g[static_cast<std::size_t>(i)] * inv) * basis_[static_cast<std::size_t>(i)];
  return geodesic_point(space_, Tangent{ball_.center, dir}, t);
}

Point uniform_in_ball(const Space& space, const Ball& ball, Engine& engine) {
  return BallSampler(space, ball).draw(engine);
}

PointCloud make_cloud(std::vector<Point> points, double density, std::uint64_t seed) {
  if (!(density > 0.0)) throw InvalidGeometry("cloud density must be positive");
  PointCloud c;
  c.points = std::move(points);
  c.density = density;
  c.weight = 1.0 / density;
  c.seed = seed;
  return c;
}

PointCloud sample_in(const Space& space, const Region& region, const Ball& envelope, double density,
                     std::uint64_t seed) {
  if (!(density > 0.0) || !std::isfinite(density)) throw InvalidGeometry("sampling density must be positive");
  const BallSampler sampler(space, envelope);
  const double expected = density * sampler.volume();
  if (!(expected < 1e9)) throw InvalidGeometry("sampling envelope too large for the requested density");
  const auto proposals = static_cast<std::size_t>(std::llround(expected));
  const Stream stream(seed, streams::kSample);

  // Chunks are keyed by their first proposal index and stitched back in order.
  std::map<std::size_t, std::vector<Point>> chunks;
  std::mutex m;
  parallel_for(proposals, [&](std::size_t begin, std::size_t end) {
    std::vector<Point> local;
    for (std::size_t i = begin; i < end; ++i) {
      Engine engine = stream.engine(i);
      Point p = sampler.draw(engine);
      if (contains(space, region, p)) local.push_back(p);
    }
    std::lock_guard lock(m);
    chunks.emplace(begin, std::move(local));
  });
  std::vector<Point> kept;
  for (auto& [begin, pts] : chunks) kept.insert(kept.end(), pts.begin(), pts.end());
  return make_cloud(std::move(kept), density, seed);
}

PointCloud sample(const Space& space, const Region& region, double density, std::uint64_t seed) {
  return sample_in(space, region, bounding_ball(space, region), density, seed);
}

VolumeEstimate volume_estimate_in(const Space& space, const Region& region, const Ball& envelope,
                                  std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw InvalidGeometry("volume estimate needs samples");
  const BallSampler sampler(space, envelope);
  const Stream stream(seed, streams::kVolume);
  // Hits are integers, so the reduction is exact in any order.
  std::size_t hits = 0;
  std::mutex m;
  parallel_for(samples, [&](std::size_t begin, std::size_t end) {
    std::size_t local = 0;
    for (std::size_t i = begin; i < end; ++i) {
      Engine engine = stream.engine(i);
      if (contains(space, region, sampler.draw(engine))) ++local;
    }
    std::lock_guard lock(m);
    hits += local;
  });
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(hits) / n;
  VolumeEstimate est;
  est.value = sampler.volume() * p;
  est.std_error = sampler.volume() * std::sqrt(p * (1.0 - p) / n);
  est.samples_used = samples;
  return est;
}

VolumeEstimate volume_estimate(const Space& space, const Region& region, std::size_t samples, std::uint64_t seed) {
  return volume_estimate_in(space, region, bounding_ball(space, region), samples, seed);
}

DiameterResult diameter(const Space& space, std::span<const Point> points) {
  if (points.empty()) throw InvalidGeometry("diameter of an empty cloud");
  const std::size_t n = points.size();
  std::vector<double> row_best(n, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> row_arg(n, 0);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      row_arg[i] = i;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double k = distance_key(space, points[i].coords(), points[j].coords());
        if (k > row_best[i]) {
          row_best[i] = k;
          row_arg[i] = j;
        }
      }
    }
  });
  DiameterResult best;
  double best_key = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (row_best[i] > best_key) {
      best_key = row_best[i];
      best.first = i;
      best.second = row_arg[i];
    }
  }
  best.value = distance(space, points[best.first], points[best.second]);
  return best;
}

namespace {

// max over x in `from` of the distance to the nearest point of `to`.
double directed_hausdorff(const Space& space, std::span<const Point> from, std::span<const Point> to) {
  std::vector<double> nearest(from.size(), 0.0);
  parallel_for(from.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t j = 0; j < to.size(); ++j) {
        const double k = distance_key(space, from[i].coords(), to[j].coords());
        if (k < best) {
          best = k;
          arg = j;
        }
      }
      nearest[i] = distance(space, from[i], to[arg]);
    }
  });
  return *std::max_element(nearest.begin(), nearest.end());
}

}  // namespace

double hausdorff(const Space& space, std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) throw InvalidGeometry("Hausdorff distance needs nonempty clouds");
  return std::max(directed_hausdorff(space, b, a), directed_hausdorff(space, a, b));
}

double mean_spacing(const Space& space, std::span<const Point> points) {
  if (points.size() < 2) return 0.0;
  std::vector<double> nearest(points.size(), 0.0);
  parallel_for(points.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = i;
      for (std::size_t j = 0; j < points.size(); ++j) {
        if (j == i) continue;
        const double k = distance_key(space, points[i].coords(), points[j].coords());
        if (k < best) {
          best = k;
          arg = j;
        }
      }
      nearest[i] = distance(space, points[i], points[arg]);
    }
  });
  double sum = 0.0;
  for (double d : nearest) sum += d;
  return sum / static_cast<double>(nearest.size());
}

}  // namespace isodiam

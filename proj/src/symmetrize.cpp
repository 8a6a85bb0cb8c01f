#include "isodiam/symmetrize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ball_index.hpp"
#include "isodiam/csv.hpp"
#include "isodiam/parallel.hpp"
#include "isodiam/region_io.hpp"

namespace isodiam {

Region two_point_symmetrize(const Space& space, const Hyperplane& h, const Region& region) {
  require_ambient(space, h.normal);
  return Region::symmetrized(h, region);
}

namespace {

bool same_plane(const Hyperplane& a, const Hyperplane& b) {
  return a.normal == b.normal && a.offset == b.offset && a.orientation == b.orientation;
}

}  // namespace

Region symmetrize_folded(const Space& space, const Hyperplane& h, const Region& region) {
  require_ambient(space, h.normal);
  if (region.kind() == Region::Kind::Symmetrized && same_plane(region.hyperplane(), h)) return region;
  if (region.kind() == Region::Kind::Ball && side(space, h, region.as_ball().center) == 0) return region;
  const Ball b = bounding_ball(space, region);
  if (!(space.spherical() && b.radius >= std::numbers::pi)) {
    const double s = signed_distance(space, h, b.center);
    if (s >= b.radius) return region;
    if (s <= -b.radius) return reflect_region(space, h, region);
  }
  return Region::symmetrized(h, region);
}

std::string_view to_string(Strategy::Kind kind) {
  switch (kind) {
    case Strategy::Kind::FarthestPairBisector: return "farthest-pair";
    case Strategy::Kind::RandomThroughPole: return "random-through-pole";
    case Strategy::Kind::FixedSchedule: return "fixed-schedule";
    case Strategy::Kind::MassTransfer: return "mass-transfer";
  }
  return "?";
}

Strategy::Kind strategy_kind_from_string(std::string_view name) {
  for (auto k : {Strategy::Kind::FarthestPairBisector, Strategy::Kind::RandomThroughPole,
                 Strategy::Kind::FixedSchedule, Strategy::Kind::MassTransfer}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidGeometry("unknown strategy \"" + std::string(name) +
                        "\" (expected farthest-pair, random-through-pole, fixed-schedule or mass-transfer)");
}

namespace {

Hyperplane oriented_toward(const Space& space, Hyperplane h, const Point& pole) {
  if (side(space, h, pole) < 0) h.orientation = -h.orientation;
  return h;
}

Hyperplane random_through(const Space& space, const Point& pole, Engine& rng) {
  const auto basis = tangent_basis(space, pole);
  Vec normal(space.ambient_dim());
  double len2 = 0.0;
  std::vector<double> g(basis.size());
  do {
    len2 = 0.0;
    for (double& x : g) {
      x = rng.normal();
      len2 += x * x;
    }
  } while (!(len2 > 0.0));
  for (std::size_t i = 0; i < basis.size(); ++i) normal += (g[i] / std::sqrt(len2)) * basis[i];
  const int orientation = rng.uniform() < 0.5 ? 1 : -1;
  const double offset = space.euclidean() ? dot(normal, pole.coords()) : 0.0;
  return make_hyperplane(space, normal, orientation, offset);
}

// The sample farthest from the pole is mapped onto the center of the largest
// uncovered part of the reference ball (the candidate hole farthest from every
// sample). The pole is closer to the hole than to the excess point, so it
// stays in H^+.
std::optional<Hyperplane> mass_transfer(const Space& space, const Point& pole, const PointCloud& cloud, Engine& rng,
                                        const StrategyContext& ctx) {
  if (!ctx.region || !ctx.reference) throw InvalidGeometry("mass-transfer strategy needs the region and reference ball");
  if (cloud.empty()) return std::nullopt;
  std::size_t far = 0;
  double far_d = -1.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double d = distance(space, pole, cloud.points[i]);
    if (d > far_d) {
      far_d = d;
      far = i;
    }
  }
  if (far_d <= ctx.reference->radius) return std::nullopt;
  const Point& y = cloud.points[far];

  const BallSampler sampler(space, *ctx.reference);
  std::optional<Point> hole;
  double hole_key = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ctx.hole_candidates; ++i) {
    const Point x = sampler.draw(rng);
    if (contains(space, *ctx.region, x)) continue;
    double nearest = std::numeric_limits<double>::infinity();
    for (const Point& c : cloud.points) nearest = std::min(nearest, distance_key(space, x.coords(), c.coords()));
    if (nearest > hole_key) {
      hole_key = nearest;
      hole = x;
    }
  }
  if (!hole) return std::nullopt;
  const Hyperplane h = bisector(space, *hole, y);
  if (side(space, h, pole) < 0) return std::nullopt;
  return h;
}

}  // namespace

Hyperplane choose_hyperplane(const Space& space, const Strategy& strategy, const PointCloud& cloud, Engine& rng,
                             const StrategyContext& ctx) {
  const Point pole = strategy.pole_in(space);
  switch (strategy.kind) {
    case Strategy::Kind::FarthestPairBisector: {
      if (cloud.empty()) throw InvalidGeometry("farthest-pair strategy needs a nonempty cloud");
      const DiameterResult d = diameter(space, cloud);
      if (d.value == 0.0) return random_through(space, pole, rng);
      return oriented_toward(space, bisector(space, cloud.points[d.first], cloud.points[d.second]), pole);
    }
    case Strategy::Kind::RandomThroughPole: return random_through(space, pole, rng);
    case Strategy::Kind::FixedSchedule:
      if (ctx.step == 0 || ctx.step > strategy.schedule.size()) {
        throw ScheduleExhausted("hyperplane schedule has " + std::to_string(strategy.schedule.size()) +
                                " entries, step " + std::to_string(ctx.step) + " requested");
      }
      return strategy.schedule[ctx.step - 1];
    case Strategy::Kind::MassTransfer: {
      if (auto h = mass_transfer(space, pole, cloud, rng, ctx)) return *h;
      return random_through(space, pole, rng);
    }
  }
  throw InvalidGeometry("unknown strategy");
}

namespace {

bool ball_inside(const Space& space, const Ball& inner, const Ball& outer) {
  if (space.spherical() && outer.radius >= std::numbers::pi) return true;
  // Enclosures carry a relative 1e-12 inflation per tree level; ignore it.
  return distance(space, inner.center, outer.center) + inner.radius <= outer.radius * (1.0 + 1e-9) + 1e-9;
}

// Envelope for one step: the flow envelope whenever it still contains the region.
Ball step_envelope(const FlowSetup& setup, const Region& region) {
  const Ball b = bounding_ball(setup.space, region);
  if (ball_inside(setup.space, b, setup.envelope)) return setup.envelope;
  return enclosing_ball(setup.space, setup.envelope, b);
}

}  // namespace

FlowSetup prepare_flow(const Space& space, const Region& initial, const Strategy& strategy, const FlowConfig& config) {
  if (config.max_steps < 1) throw InvalidGeometry("flow needs at least one step");
  if (config.volume_samples < 100) throw InvalidGeometry("flow volume estimate needs at least 100 samples");
  if (config.cloud_points < 2) throw InvalidGeometry("flow cloud needs at least 2 points");
  if (config.depth_cap < 1) throw InvalidGeometry("depth cap must be at least 1");
  if (strategy.kind == Strategy::Kind::FixedSchedule && strategy.schedule.empty()) {
    throw InvalidGeometry("fixed schedule is empty");
  }
  const Point pole = strategy.pole_in(space);
  const Ball bound = bounding_ball(space, initial);

  FlowSetup setup{space, pole, config, bound, bound, 0.0, 0.0, {}};
  const VolumeEstimate v0 = volume_estimate_in(space, initial, bound, config.volume_samples, config.seed);
  if (!(v0.value > 0.0)) throw DegenerateInput("initial region has zero estimated volume");
  setup.initial_volume = v0.value;
  setup.reference = Ball{pole, radius_for_volume(space, v0.value)};

  // Centered at the pole: every step whose hyperplane keeps the pole in H^+
  // maps this ball into itself.
  double reach = std::max(setup.reference.radius, distance(space, pole, bound.center) + bound.radius);
  reach = reach * (1.0 + 1e-9) + 1e-9;
  if (space.spherical()) reach = std::min(reach, std::numbers::pi);
  setup.envelope = Ball{pole, reach};

  setup.density = static_cast<double>(config.cloud_points) / v0.value;
  setup.reference_cloud = sample_in(space, Region::ball(setup.reference), setup.envelope, setup.density, config.seed);
  return setup;
}

FlowState measure_state(const FlowSetup& setup, const Region& region, std::size_t step, bool enclosed) {
  const Space& space = setup.space;
  const Ball env = enclosed ? setup.envelope : step_envelope(setup, region);
  const bool coupled = enclosed || ball_inside(space, env, setup.envelope);
  FlowState st{region, sample_in(space, region, env, setup.density, setup.config.seed), {}, coupled};
  StepRecord& r = st.record;
  r.step = step;
  r.volume = volume_estimate_in(space, region, env, setup.config.volume_samples, setup.config.seed);
  r.cloud_size = st.cloud.size();
  r.depth = region.symmetrization_depth();
  if (st.cloud.empty()) {
    r.hausdorff = std::numeric_limits<double>::infinity();
    return st;
  }
  r.diameter = diameter(space, st.cloud).value;
  r.spacing = mean_spacing(space, st.cloud.points);
  const PointCloud ref = coupled ? setup.reference_cloud
                                 : sample_in(space, Region::ball(setup.reference), env, setup.density, setup.config.seed);
  r.hausdorff = ref.empty() ? std::numeric_limits<double>::infinity() : hausdorff(space, st.cloud, ref);
  return st;
}

std::pair<Region, double> rebase_region(const FlowSetup& setup, const PointCloud& cloud) {
  const Space& space = setup.space;
  if (cloud.empty()) throw DegenerateInput("cannot rebase an empty cloud");
  const std::size_t n = 4 * setup.config.volume_samples;
  const BallSampler sampler(space, setup.envelope);
  const Stream stream(setup.config.seed, streams::kRebase);
  // Distance from every calibration sample to the nearest cloud point. A
  // union of radius s contains exactly the samples at distance <= s.
  std::vector<double> nearest(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Engine engine = stream.engine(i);
      const Point x = sampler.draw(engine);
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t j = 0; j < cloud.size(); ++j) {
        const double k = distance_key(space, x.coords(), cloud.points[j].coords());
        if (k < best) {
          best = k;
          arg = j;
        }
      }
      nearest[i] = distance(space, x, cloud.points[arg]);
    }
  });
  std::sort(nearest.begin(), nearest.end());
  const double fraction = setup.initial_volume / sampler.volume();
  const auto hits = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))), 1, n);
  const double lo = nearest[hits - 1];
  const double hi = hits < n ? nearest[hits] : lo * 1.01 + 1e-9;
  double radius = 0.5 * (lo + hi);
  if (!(radius > 0.0)) radius = std::max(hi, 1e-9);
  if (space.spherical()) radius = std::min(radius, 0.5 * std::numbers::pi);
  Region clipped = Region::intersect({Region::ball_union(space, cloud.points, radius), Region::ball(setup.envelope)});
  return {std::move(clipped), radius};
}

namespace {

std::size_t identity_failures(const FlowSetup& setup, const Hyperplane& h, const Region& before, const Region& after,
                              std::size_t step) {
  const Space& space = setup.space;
  const BallSampler sampler(space, setup.envelope);
  const Stream stream = Stream(setup.config.seed, streams::kIdentity).substream(step);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < setup.config.identity_points; ++i) {
    Engine engine = stream.engine(i);
    const Point y = sampler.draw(engine);
    const Point sy = reflect(space, h, y);
    const int lhs = int(contains(space, after, y)) + int(contains(space, after, sy));
    const int rhs = int(contains(space, before, y)) + int(contains(space, before, sy));
    if (lhs != rhs) ++failures;
  }
  return failures;
}

}  // namespace

FlowState flow_step(const FlowSetup& setup, const Strategy& strategy, const FlowState& current) {
  const Space& space = setup.space;
  const std::size_t step = current.record.step + 1;
  Engine rng = Stream(setup.config.seed, streams::kStrategy).engine(step);
  StrategyContext ctx;
  ctx.step = step;
  ctx.region = &current.region;
  ctx.reference = &setup.reference;
  ctx.hole_candidates = setup.config.hole_candidates;
  const Hyperplane h = choose_hyperplane(space, strategy, current.cloud, rng, ctx);

  const Region next = symmetrize_folded(space, h, current.region);
  const std::size_t failures = identity_failures(setup, h, current.region, next, step);
  // Points of H^- move closer to any point of H^+, so a pole in H^+ keeps the
  // region inside the pole-centered envelope.
  const bool enclosed = current.enclosed && side(space, h, setup.pole) >= 0;
  FlowState st = measure_state(setup, next, step, enclosed);
  st.record.hyperplane = h;
  st.record.identity_checks = setup.config.identity_points;
  st.record.identity_failures = failures;

  if (next.symmetrization_depth() > setup.config.depth_cap && !st.cloud.empty()) {
    if (st.enclosed) {
      auto [rebased, radius] = rebase_region(setup, st.cloud);
      StepRecord keep = st.record;
      st = measure_state(setup, rebased, step);
      st.record.hyperplane = keep.hyperplane;
      st.record.identity_checks = keep.identity_checks;
      st.record.identity_failures = keep.identity_failures;
      st.record.rebased = true;
      st.record.rebase_radius = radius;
    }
  }
  return st;
}

FlowReport run_flow(const Space& space, const Region& initial, const Strategy& strategy, const FlowConfig& config) {
  const FlowSetup setup = prepare_flow(space, initial, strategy, config);
  FlowReport report{space, strategy, config, setup.reference, setup.envelope, setup.density, {}, "max_steps", 0};
  FlowState state = measure_state(setup, initial, 0);
  report.steps.push_back(state.record);
  if (state.record.hausdorff < config.stop_epsilon) {
    report.stop_reason = "converged";
    return report;
  }
  for (std::size_t step = 1; step <= config.max_steps; ++step) {
    try {
      state = flow_step(setup, strategy, state);
    } catch (const ScheduleExhausted&) {
      report.stop_reason = "schedule_exhausted";
      break;
    }
    report.steps.push_back(state.record);
    if (state.record.rebased) ++report.rebases;
    if (state.record.hausdorff < config.stop_epsilon) {
      report.stop_reason = "converged";
      break;
    }
  }
  return report;
}

double FlowReport::diameter_excess() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < steps.size(); ++i) {
    const StepRecord& a = steps[i - 1];
    const StepRecord& b = steps[i];
    double slack = 2.0 * std::max(a.spacing, b.spacing) + 1e-9;
    if (b.rebased) slack += 2.0 * b.rebase_radius;
    if (a.rebased) slack += 2.0 * a.rebase_radius;
    worst = std::max(worst, b.diameter - a.diameter - slack);
  }
  return worst;
}

double FlowReport::volume_drift_sigmas() const {
  if (steps.size() < 2) return 0.0;
  const VolumeEstimate& a = steps.front().volume;
  const VolumeEstimate& b = steps.back().volume;
  const double sigma = std::hypot(a.std_error, b.std_error);
  const double diff = std::abs(b.value - a.value);
  if (sigma == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / sigma;
}

std::size_t FlowReport::identity_failures() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += s.identity_failures;
  return n;
}

std::string flow_csv(const FlowReport& report) {
  std::vector<std::string> header{"step", "volume", "volume_stderr", "diameter", "hausdorff"};
  const int dims = report.space.ambient_dim();
  for (int i = 0; i < dims; ++i) header.push_back("normal_" + std::to_string(i));
  for (const char* c : {"offset", "orientation", "spacing", "cloud_size", "depth", "rebased", "rebase_radius",
                        "identity_checks", "identity_failures"}) {
    header.emplace_back(c);
  }
  CsvTable table(std::move(header));
  for (const StepRecord& s : report.steps) {
    std::vector<std::string> row{std::to_string(s.step), format_real(s.volume.value), format_real(s.volume.std_error),
                                 format_real(s.diameter), format_real(s.hausdorff)};
    for (int i = 0; i < dims; ++i) row.push_back(s.hyperplane ? format_real(s.hyperplane->normal[i]) : "");
    row.push_back(s.hyperplane ? format_real(s.hyperplane->offset) : "");
    row.push_back(s.hyperplane ? std::to_string(s.hyperplane->orientation) : "");
    row.push_back(format_real(s.spacing));
    row.push_back(std::to_string(s.cloud_size));
    row.push_back(std::to_string(s.depth));
    row.push_back(s.rebased ? "1" : "0");
    row.push_back(format_real(s.rebase_radius));
    row.push_back(std::to_string(s.identity_checks));
    row.push_back(std::to_string(s.identity_failures));
    table.add_row(std::move(row));
  }
  return table.str();
}

namespace {

nlohmann::json vec_json(const Vec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v.values()) a.push_back(x);
  return a;
}

nlohmann::json ball_json(const Ball& b) { return {{"center", vec_json(b.center.coords())}, {"radius", b.radius}}; }

}  // namespace

nlohmann::json flow_json(const FlowReport& report) {
  nlohmann::json j;
  j["space"] = std::string(to_string(report.space.curvature()));
  j["dim"] = report.space.dim();
  j["seed"] = report.config.seed;
  nlohmann::json strategy{{"kind", std::string(to_string(report.strategy.kind))},
                          {"pole", vec_json(report.strategy.pole_in(report.space).coords())}};
  if (!report.strategy.schedule.empty()) {
    nlohmann::json sched = nlohmann::json::array();
    for (const Hyperplane& h : report.strategy.schedule) {
      sched.push_back({{"normal", vec_json(h.normal)}, {"offset", h.offset}, {"orientation", h.orientation}});
    }
    strategy["schedule"] = std::move(sched);
  }
  j["strategy"] = std::move(strategy);
  j["config"] = {{"max_steps", report.config.max_steps},
                 {"stop_epsilon", report.config.stop_epsilon},
                 {"volume_samples", report.config.volume_samples},
                 {"cloud_points", report.config.cloud_points},
                 {"identity_points", report.config.identity_points},
                 {"depth_cap", report.config.depth_cap},
                 {"hole_candidates", report.config.hole_candidates}};
  j["reference_ball"] = ball_json(report.reference);
  j["envelope"] = ball_json(report.envelope);
  j["density"] = report.density;
  j["steps_run"] = report.steps.empty() ? 0 : report.steps.back().step;
  j["stop_reason"] = report.stop_reason;
  j["rebases"] = report.rebases;
  j["identity_failures"] = report.identity_failures();
  j["volume_drift_sigmas"] = report.volume_drift_sigmas();
  j["diameter_excess"] = report.diameter_excess();
  j["final_hausdorff"] = report.steps.empty() ? 0.0 : report.steps.back().hausdorff;
  j["hausdorff_note"] =
      "Hausdorff distance between the step's sample cloud and a cloud of the reference ball drawn from the same "
      "proposals; it carries a sampling slack of a few mean spacings.";
  return j;
}

PairCheck symmetrization_pair_check(const Space& space, const Hyperplane& h, const Region& region,
                                    double diameter_bound, std::size_t pairs, std::uint64_t seed) {
  const Ball env = bounding_ball(space, region);
  const double density = 4000.0 / std::max(volume_estimate_in(space, region, env, 4000, seed).value, 1e-300);
  const PointCloud cloud = sample_in(space, region, env, density, seed);
  const Region tau = two_point_symmetrize(space, h, region);
  const PointCloud tau_cloud = sample_in(space, tau, bounding_ball(space, tau), density, seed);
  std::vector<const Point*> plus, minus;
  for (const Point& p : cloud.points) (side(space, h, p) >= 0 ? plus : minus).push_back(&p);

  PairCheck out;
  Engine rng = Stream(seed, streams::kProbe).engine(0);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)) % n; };
  auto record = [&](double measured, double bound) {
    ++out.checks;
    out.max_excess = std::max(out.max_excess, measured - bound);
    if (measured > bound + 1e-9) ++out.violations;
  };
  for (std::size_t i = 0; i < pairs; ++i) {
    if (i % 2 == 0 && !plus.empty() && !minus.empty()) {
      const Point& x = *plus[pick(plus.size())];
      const Point& y = *minus[pick(minus.size())];
      const double direct = distance(space, x, y);
      const double mirrored = distance(space, x, reflect(space, h, y));
      record(mirrored, direct);
      record(std::min(direct, mirrored), diameter_bound);
    } else if (tau_cloud.size() >= 2) {
      const Point& a = tau_cloud.points[pick(tau_cloud.size())];
      const Point& b = tau_cloud.points[pick(tau_cloud.size())];
      record(distance(space, a, b), diameter_bound);
    }
  }
  return out;
}

}  // namespace isodiam

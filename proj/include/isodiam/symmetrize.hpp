#pragma once

// Two-point symmetrization of regions, hyperplane selection strategies, and
// the iterated symmetrization flow with its per-step metrics.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "isodiam/geometry.hpp"
#include "isodiam/random.hpp"
#include "isodiam/region.hpp"
#include "isodiam/sampling.hpp"

namespace isodiam {

/// Symmetrized(h, region): the H^+ side of h gains mass.
Region two_point_symmetrize(const Space& space, const Hyperplane& h, const Region& region);

/// Same set as two_point_symmetrize, without a new tree level whenever the
/// result is exactly known: region on one side of h, a ball centered on h,
/// or a repeated symmetrization in h.
Region symmetrize_folded(const Space& space, const Hyperplane& h, const Region& region);

class ScheduleExhausted : public Error {
 public:
  using Error::Error;
};

struct Strategy {
  enum class Kind {
    FarthestPairBisector,  // bisector of the sampled diameter pair
    RandomThroughPole,     // uniform random hyperplane through the pole
    FixedSchedule,         // schedule[step - 1]
    MassTransfer,          // bisector moving the farthest sample into a hole of the reference ball
  };

  Kind kind = Kind::FarthestPairBisector;
  std::optional<Point> pole;  // defaults to e
  std::vector<Hyperplane> schedule;

  static Strategy farthest_pair() { return {Kind::FarthestPairBisector, std::nullopt, {}}; }
  static Strategy random_through_pole() { return {Kind::RandomThroughPole, std::nullopt, {}}; }
  static Strategy fixed(std::vector<Hyperplane> schedule) { return {Kind::FixedSchedule, std::nullopt, std::move(schedule)}; }
  static Strategy mass_transfer() { return {Kind::MassTransfer, std::nullopt, {}}; }

  Point pole_in(const Space& space) const { return pole ? *pole : space.pole(); }
};

std::string_view to_string(Strategy::Kind kind);
Strategy::Kind strategy_kind_from_string(std::string_view name);

/// Inputs some strategies need beyond the cloud.
struct StrategyContext {
  std::size_t step = 1;               // 1-based index of the step being chosen
  const Region* region = nullptr;     // MassTransfer
  const Ball* reference = nullptr;    // MassTransfer
  std::size_t hole_candidates = 512;  // MassTransfer
};

Hyperplane choose_hyperplane(const Space& space, const Strategy& strategy, const PointCloud& cloud, Engine& rng,
                             const StrategyContext& context = {});

struct FlowConfig {
  std::size_t max_steps = 200;
  double stop_epsilon = 0.0;
  std::uint64_t seed = 0;
  std::size_t volume_samples = 20000;
  std::size_t cloud_points = 3000;     // target sample count per step
  std::size_t identity_points = 1000;  // counting-identity checks per step
  int depth_cap = 8;                   // rebase when the symmetrization depth exceeds this
  std::size_t hole_candidates = 512;
};

struct StepRecord {
  std::size_t step = 0;
  VolumeEstimate volume;
  double diameter = 0.0;
  double hausdorff = 0.0;
  double spacing = 0.0;  // mean nearest-neighbour distance in the cloud
  std::size_t cloud_size = 0;
  std::optional<Hyperplane> hyperplane;  // empty at step 0
  int depth = 0;
  bool rebased = false;
  double rebase_radius = 0.0;
  std::size_t identity_checks = 0;
  std::size_t identity_failures = 0;
};

/// Fixed quantities of one flow. All steps sample the same envelope with the
/// same seed, so metric changes between steps reflect changes of the region
/// rather than fresh Monte Carlo noise.
struct FlowSetup {
  Space space;
  Point pole;
  FlowConfig config;
  Ball envelope;
  Ball reference;
  double density = 0.0;
  double initial_volume = 0.0;
  PointCloud reference_cloud;
};

FlowSetup prepare_flow(const Space& space, const Region& initial, const Strategy& strategy, const FlowConfig& config);

struct FlowState {
  Region region;
  PointCloud cloud;
  StepRecord record;
  bool enclosed = true;  // region known to lie in the flow envelope
};

/// Metrics of `region` as step `step`. When `enclosed` is false the envelope
/// is widened to the region's bounding ball.
FlowState measure_state(const FlowSetup& setup, const Region& region, std::size_t step, bool enclosed = true);

/// One symmetrization step from `current`, including the counting-identity
/// check and a rebase when the depth cap is exceeded.
FlowState flow_step(const FlowSetup& setup, const Strategy& strategy, const FlowState& current);

/// Union of equal balls around the cloud points, clipped to the envelope,
/// with the radius chosen so that its volume (estimated on an independent stream of 4x the flow's
/// volume samples) equals the initial volume estimate, the quantity every
/// step conserves. Returns the region and the radius.
std::pair<Region, double> rebase_region(const FlowSetup& setup, const PointCloud& cloud);

struct FlowReport {
  Space space;
  Strategy strategy;
  FlowConfig config;
  Ball reference;
  Ball envelope;
  double density = 0.0;
  std::vector<StepRecord> steps;
  std::string stop_reason;  // "converged", "max_steps", "schedule_exhausted"
  std::size_t rebases = 0;

  bool converged() const { return stop_reason == "converged"; }
  /// Largest increase of the sampled diameter between consecutive steps
  /// beyond twice the larger spacing plus twice any rebase radius.
  double diameter_excess() const;
  /// |V(last) - V(0)| / combined std error.
  double volume_drift_sigmas() const;
  std::size_t identity_failures() const;
};

FlowReport run_flow(const Space& space, const Region& initial, const Strategy& strategy, const FlowConfig& config);

std::string flow_csv(const FlowReport& report);
nlohmann::json flow_json(const FlowReport& report);

struct PairCheck {
  std::size_t checks = 0;
  std::size_t violations = 0;
  double max_excess = -1e300;  // max over checks of (measured - bound)
};

/// For x in region & H^+ and y in region & H^- drawn from one sample of the
/// region: d(x, sigma y) <= d(x, y), and every pair of points of the
/// symmetrized region lies within `diameter_bound` (+1e-9).
PairCheck symmetrization_pair_check(const Space& space, const Hyperplane& h, const Region& region,
                                    double diameter_bound, std::size_t pairs, std::uint64_t seed);

}  // namespace isodiam

#pragma once

// Campaigns that test the isodiametric inequality and the symmetrization
// flow numerically, with per-trial seeds and CSV/JSON reports.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "isodiam/geometry.hpp"
#include "isodiam/region.hpp"
#include "isodiam/sampling.hpp"
#include "isodiam/symmetrize.hpp"

namespace isodiam {

struct CampaignConfig {
  Space space = Space::sphere(2);
  double D = 1.0;                    // diameter bound
  std::size_t trials = 100;
  std::size_t samples = 100000;      // volume samples per trial
  std::size_t witness_points = 1500; // target sample size for diameter trimming
  int complexity = 4;                // balls per random region
  std::uint64_t seed = 0;
  double sigmas = 3.0;               // violation threshold in standard errors
  // Symmetrization battery.
  Strategy::Kind strategy = Strategy::Kind::MassTransfer;
  FlowConfig flow;
  double flow_threshold = 0.1;       // Hausdorff goal for the convergent fixtures
  std::size_t random_flows = 2;      // random admissible regions in the battery
  std::optional<std::filesystem::path> csv_path;
  std::optional<std::filesystem::path> json_path;

  /// Throws InvalidGeometry on out-of-range values.
  void validate() const;
};

/// Reads a config document; unknown keys are rejected. Errors are
/// DocumentError with a JSON pointer.
CampaignConfig campaign_config_from_json(const nlohmann::json& doc);
nlohmann::json campaign_config_to_json(const CampaignConfig& config);

struct AdmissibleRegion {
  Region region;
  double sampled_diameter = 0.0;  // over the final check sample
  int trim_rounds = 0;
  std::size_t witnesses = 0;      // balls B(w, D) added by trimming
  int attempts = 1;
};

/// Random CSG region (unions, differences and intersections of up to
/// `complexity` balls around a random point), intersected with B(w, D) for
/// sampled points w until its sampled diameter is at most D.
AdmissibleRegion random_admissible_region(const Space& space, double D, int complexity, std::uint64_t seed,
                                          std::size_t witness_points = 1500);

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t digest = 0;
  int complexity = 0;  // 0 marks the exact ball of radius D/2
  VolumeEstimate volume;
  double sampled_diameter = 0.0;
  double margin = 0.0;         // volume - ball volume
  double margin_sigmas = 0.0;  // margin / std error (0 when the error is 0)
  bool violation = false;
  int trim_rounds = 0;
  std::size_t witnesses = 0;
};

struct CampaignReport {
  CampaignConfig config;
  double ball_volume = 0.0;  // V(B(D/2))
  std::vector<TrialRecord> trials;

  std::size_t violations() const;
  double max_margin() const;
};

/// Trial 0 is the ball of radius D/2 itself, estimated inside B(pole, 1.25 D/2)
/// (capped below pi); the rest are random admissible regions.
CampaignReport verify_isodiametric(const CampaignConfig& config);
std::string campaign_csv(const CampaignReport& report);
nlohmann::json campaign_json(const CampaignReport& report);

struct GreedyResult {
  PointCloud accepted;
  std::size_t candidates = 0;
  double volume = 0.0;     // accepted fraction times the envelope volume
  double std_error = 0.0;  // binomial
  double ball_volume = 0.0;
  double deficit = 0.0;    // ball_volume - volume

  bool exceeds_ball(double sigmas = 3.0) const { return deficit < -sigmas * std_error; }
};

/// Uniform candidates in B(pole, D) kept when within D of every kept point.
/// With `seed_with_ball` the candidates inside B(pole, D/2) are offered first.
GreedyResult greedy_maximal(const Space& space, double D, std::size_t candidate_count, std::uint64_t seed,
                            bool seed_with_ball = false);

struct FlowCase {
  std::string name;
  Region initial;
  bool expect_convergence = false;
  FlowReport report;
  bool volume_ok = false;
  bool diameter_ok = false;
  bool converged_ok = false;  // true when convergence is not expected

  bool passed() const { return volume_ok && diameter_ok && converged_ok && report.identity_failures() == 0; }
};

/// Two balls of radius 0.18 D centered 0.32 D from the pole on opposite sides.
Region two_caps_fixture(const Space& space, double D);
/// Ball B(pole, 0.42 D) minus a ball of radius 0.16 D centered 0.39 D away.
Region dented_ball_fixture(const Space& space, double D);

/// The fixtures of the symmetrization battery for `space` and `D`: exact cap,
/// two caps, dented ball, then random admissible regions.
std::vector<std::pair<std::string, Region>> flow_fixtures(const CampaignConfig& config);

std::vector<FlowCase> symmetrization_campaign(const CampaignConfig& config);
nlohmann::json symmetrization_json(const std::vector<FlowCase>& cases);

}  // namespace isodiam

#include "isodiam/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "isodiam/csv.hpp"
#include "isodiam/errors.hpp"
#include "isodiam/parallel.hpp"
#include "isodiam/random.hpp"
#include "isodiam/region_io.hpp"

namespace isodiam {

namespace {

using nlohmann::json;

constexpr int kMaxAttempts = 16;
constexpr int kMaxTrimRounds = 12;
constexpr std::size_t kWitnessesPerRound = 24;

void require_diameter_bound(const Space& space, double D) {
  if (!(D > 0.0) || !std::isfinite(D)) throw InvalidGeometry("diameter bound D must be positive");
  if (space.spherical() && !(D < std::numbers::pi)) throw InvalidGeometry("spherical diameter bound D must be below pi");
}

Point along_axis(const Space& space, double t) {
  const Point e = space.pole();
  return geodesic_point(space, Tangent{e, Vec::unit(space.ambient_dim(), 0)}, t);
}

// Monotone key of distance D, comparable with distance_key.
double key_of(const Space& space, double D) {
  switch (space.curvature()) {
    case Curvature::Spherical: return -std::cos(D);
    case Curvature::Hyperbolic: return std::cosh(D);
    case Curvature::Euclidean: return D * D;
  }
  return 0.0;
}

bool within(const Space& space, const Point& a, const Point& b, double D, double key_D) {
  const double k = distance_key(space, a.coords(), b.coords());
  if (std::abs(k - key_D) > 1e-9 * (1.0 + std::abs(key_D))) return k < key_D;
  return distance(space, a, b) <= D;
}

// Sample of about `target` points of the region.
PointCloud witness_sample(const Space& space, const Region& region, std::size_t target, std::uint64_t seed) {
  const Ball bound = bounding_ball(space, region);
  const double env = ball_volume(space, bound.radius);
  double density = static_cast<double>(target) / env;
  PointCloud cloud = sample_in(space, region, bound, density, seed);
  if (cloud.size() < target / 2 && !cloud.empty()) {
    density *= std::min(64.0, static_cast<double>(target) / static_cast<double>(cloud.size()));
    cloud = sample_in(space, region, bound, density, seed);
  }
  return cloud;
}

// Violating points of the cloud, spread out by farthest-point order.
std::vector<Point> pick_witnesses(const Space& space, const PointCloud& cloud, double D, const DiameterResult& diam) {
  const double key_D = key_of(space, D);
  std::vector<std::size_t> violators;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t j = 0; j < cloud.size(); ++j) {
      if (distance_key(space, cloud.points[i].coords(), cloud.points[j].coords()) > key_D) {
        violators.push_back(i);
        break;
      }
    }
  }
  std::vector<std::size_t> chosen{diam.first, diam.second};
  std::vector<double> gap(violators.size(), std::numeric_limits<double>::infinity());
  while (chosen.size() < kWitnessesPerRound) {
    std::size_t best = violators.size();
    double best_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < violators.size(); ++v) {
      const Point& p = cloud.points[violators[v]];
      gap[v] = std::min(gap[v], distance_key(space, p.coords(), cloud.points[chosen.back()].coords()));
      if (chosen.size() == 2) {
        gap[v] = std::min(gap[v], distance_key(space, p.coords(), cloud.points[chosen.front()].coords()));
      }
      if (gap[v] > best_gap) {
        best_gap = gap[v];
        best = v;
      }
    }
    if (best == violators.size() || std::find(chosen.begin(), chosen.end(), violators[best]) != chosen.end()) break;
    chosen.push_back(violators[best]);
  }
  std::vector<Point> out;
  for (std::size_t i : chosen) out.push_back(cloud.points[i]);
  return out;
}

Region random_csg(const Space& space, double D, int complexity, Engine& rng) {
  const double half = 0.5 * D;
  const Point anchor = uniform_in_ball(space, Ball{space.pole(), 0.5}, rng);
  if (complexity == 1) return Region::ball(Ball{anchor, half * (0.3 + 0.7 * rng.uniform())});
  // Parts reach past B(anchor, D/2), so trimming usually has work to do.
  Region region = Region::ball(Ball{anchor, half * (0.6 + 0.4 * rng.uniform())});
  for (int i = 1; i < complexity; ++i) {
    const Point c = uniform_in_ball(space, Ball{anchor, half}, rng);
    const double u = rng.uniform();
    if (u < 0.55) {
      region = Region::unite({region, Region::ball(Ball{c, half * (0.2 + 0.6 * rng.uniform())})});
    } else if (u < 0.85) {
      region = Region::difference(region, Region::ball(Ball{c, half * (0.1 + 0.3 * rng.uniform())}));
    } else {
      region = Region::intersect({region, Region::ball(Ball{c, half * (1.0 + 0.6 * rng.uniform())})});
    }
  }
  return region;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 15];
  return s;
}

json space_json(const Space& space) { return {{"space", std::string(to_string(space.curvature()))}, {"dim", space.dim()}}; }

json ball_json(const Ball& b) {
  json c = json::array();
  for (int i = 0; i < b.center.size(); ++i) c.push_back(b.center[i]);
  return {{"center", c}, {"radius", b.radius}};
}

}  // namespace

void CampaignConfig::validate() const {
  require_diameter_bound(space, D);
  if (trials < 1) throw InvalidGeometry("campaign needs at least one trial");
  if (samples < 100) throw InvalidGeometry("campaign needs at least 100 volume samples per trial");
  if (witness_points < 16) throw InvalidGeometry("campaign needs at least 16 witness points");
  if (complexity < 1) throw InvalidGeometry("complexity must be at least 1");
  if (!(sigmas > 0.0)) throw InvalidGeometry("violation threshold must be positive");
  if (strategy == Strategy::Kind::FixedSchedule) throw InvalidGeometry("campaigns cannot use a fixed schedule");
  if (!(flow_threshold > 0.0)) throw InvalidGeometry("flow threshold must be positive");
}

CampaignConfig campaign_config_from_json(const json& doc) {
  if (!doc.is_object()) throw DocumentError("", "campaign config must be an object");
  static const std::set<std::string> known{"space",   "dim",      "D",       "trials",         "samples",
                                           "witness_points", "complexity", "seed", "sigmas", "strategy",
                                           "flow",    "flow_threshold", "random_flows", "csv", "json"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw DocumentError("/" + key, "unknown campaign setting");
  }
  auto number = [&](const json& node, const char* key, const std::string& where) -> const json& {
    const json& v = node.at(key);
    if (!v.is_number()) throw DocumentError(where + "/" + key, "expected a number");
    return v;
  };
  auto count = [&](const json& node, const char* key, const std::string& where) -> std::size_t {
    const json& v = node.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) throw DocumentError(where + "/" + key, "expected a non-negative integer");
    return v.get<std::size_t>();
  };

  CampaignConfig c;
  c.space = space_from_json(doc);
  if (!doc.contains("D")) throw DocumentError("/D", "missing required field");
  c.D = number(doc, "D", "").get<double>();
  if (!doc.contains("seed")) throw DocumentError("/seed", "missing required field");
  if (!doc["seed"].is_number_unsigned()) throw DocumentError("/seed", "expected a non-negative integer");
  c.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("trials")) c.trials = count(doc, "trials", "");
  if (doc.contains("samples")) c.samples = count(doc, "samples", "");
  if (doc.contains("witness_points")) c.witness_points = count(doc, "witness_points", "");
  if (doc.contains("complexity")) c.complexity = static_cast<int>(count(doc, "complexity", ""));
  if (doc.contains("sigmas")) c.sigmas = number(doc, "sigmas", "").get<double>();
  if (doc.contains("flow_threshold")) c.flow_threshold = number(doc, "flow_threshold", "").get<double>();
  if (doc.contains("random_flows")) c.random_flows = count(doc, "random_flows", "");
  if (doc.contains("strategy")) {
    if (!doc["strategy"].is_string()) throw DocumentError("/strategy", "expected a string");
    try {
      c.strategy = strategy_kind_from_string(doc["strategy"].get<std::string>());
    } catch (const Error& e) {
      throw DocumentError("/strategy", e.what());
    }
  }
  if (doc.contains("flow")) {
    const json& f = doc["flow"];
    if (!f.is_object()) throw DocumentError("/flow", "expected an object");
    static const std::set<std::string> flow_keys{"max_steps", "cloud_points", "volume_samples", "identity_points",
                                                 "depth_cap", "hole_candidates"};
    for (const auto& [key, value] : f.items()) {
      if (!flow_keys.count(key)) throw DocumentError("/flow/" + key, "unknown flow setting");
    }
    if (f.contains("max_steps")) c.flow.max_steps = count(f, "max_steps", "/flow");
    if (f.contains("cloud_points")) c.flow.cloud_points = count(f, "cloud_points", "/flow");
    if (f.contains("volume_samples")) c.flow.volume_samples = count(f, "volume_samples", "/flow");
    if (f.contains("identity_points")) c.flow.identity_points = count(f, "identity_points", "/flow");
    if (f.contains("depth_cap")) c.flow.depth_cap = static_cast<int>(count(f, "depth_cap", "/flow"));
    if (f.contains("hole_candidates")) c.flow.hole_candidates = count(f, "hole_candidates", "/flow");
  }
  for (const char* key : {"csv", "json"}) {
    if (!doc.contains(key)) continue;
    if (!doc[key].is_string()) throw DocumentError(std::string("/") + key, "expected a path string");
    (std::string(key) == "csv" ? c.csv_path : c.json_path) = doc[key].get<std::string>();
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw DocumentError("", e.what());
  }
  return c;
}

json campaign_config_to_json(const CampaignConfig& c) {
  json j = space_json(c.space);
  j["D"] = c.D;
  j["trials"] = c.trials;
  j["samples"] = c.samples;
  j["witness_points"] = c.witness_points;
  j["complexity"] = c.complexity;
  j["seed"] = c.seed;
  j["sigmas"] = c.sigmas;
  j["strategy"] = std::string(to_string(c.strategy));
  j["flow"] = {{"max_steps", c.flow.max_steps},
               {"cloud_points", c.flow.cloud_points},
               {"volume_samples", c.flow.volume_samples},
               {"identity_points", c.flow.identity_points},
               {"depth_cap", c.flow.depth_cap},
               {"hole_candidates", c.flow.hole_candidates}};
  j["flow_threshold"] = c.flow_threshold;
  j["random_flows"] = c.random_flows;
  if (c.csv_path) j["csv"] = c.csv_path->string();
  if (c.json_path) j["json"] = c.json_path->string();
  return j;
}

AdmissibleRegion random_admissible_region(const Space& space, double D, int complexity, std::uint64_t seed,
                                          std::size_t witness_points) {
  require_diameter_bound(space, D);
  if (complexity < 1) throw InvalidGeometry("complexity must be at least 1");
  if (witness_points < 16) throw InvalidGeometry("diameter trimming needs at least 16 witness points");
  const Stream stream(seed, streams::kTrial);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Engine rng = stream.engine(static_cast<std::uint64_t>(attempt));
    const Region base = random_csg(space, D, complexity, rng);
    std::vector<Region> parts{base};
    for (int round = 0; round <= kMaxTrimRounds; ++round) {
      const Region current = parts.size() == 1 ? base : Region::intersect(parts);
      const std::uint64_t sample_seed = derived_seed(seed, streams::kSample,
                                                     static_cast<std::uint64_t>(attempt) * 64 + static_cast<std::uint64_t>(round));
      const PointCloud cloud = witness_sample(space, current, witness_points, sample_seed);
      if (cloud.size() < 2) break;
      const DiameterResult diam = diameter(space, cloud);
      if (diam.value <= D) {
        return AdmissibleRegion{current, diam.value, round, parts.size() - 1, attempt + 1};
      }
      if (round == kMaxTrimRounds) break;
      for (const Point& w : pick_witnesses(space, cloud, D, diam)) parts.push_back(Region::ball(Ball{w, D}));
    }
  }
  throw DegenerateInput("could not generate an admissible region within the retry budget");
}

std::size_t CampaignReport::violations() const {
  return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [](const TrialRecord& r) { return r.violation; }));
}

double CampaignReport::max_margin() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const TrialRecord& r : trials) m = std::max(m, r.margin);
  return m;
}

CampaignReport verify_isodiametric(const CampaignConfig& config) {
  config.validate();
  const Space& space = config.space;
  CampaignReport report;
  report.config = config;
  report.ball_volume = ball_volume(space, 0.5 * config.D);
  for (std::size_t t = 0; t < config.trials; ++t) {
    const std::uint64_t trial_seed = derived_seed(config.seed, streams::kTrial, t);
    TrialRecord rec;
    rec.trial = t;
    Region region = Region::ball(make_ball(space, space.pole(), 0.5 * config.D));
    if (t == 0) {
      rec.complexity = 0;
      const PointCloud cloud = witness_sample(space, region, config.witness_points, trial_seed);
      rec.sampled_diameter = diameter(space, cloud).value;
    } else {
      rec.complexity = 1 + static_cast<int>((t - 1) % static_cast<std::size_t>(config.complexity));
      const AdmissibleRegion adm =
          random_admissible_region(space, config.D, rec.complexity, trial_seed, config.witness_points);
      region = adm.region;
      rec.sampled_diameter = adm.sampled_diameter;
      rec.trim_rounds = adm.trim_rounds;
      rec.witnesses = adm.witnesses;
    }
    rec.digest = region_digest(space, region);
    if (t == 0) {
      // A wider envelope than the ball itself, so the equality check has a nonzero error bar.
      double reach = 0.625 * config.D;
      if (space.spherical()) reach = std::min(reach, 0.5 * (0.5 * config.D + std::numbers::pi));
      rec.volume = volume_estimate_in(space, region, Ball{space.pole(), reach}, config.samples, trial_seed);
    } else {
      rec.volume = volume_estimate(space, region, config.samples, trial_seed);
    }
    rec.margin = rec.volume.value - report.ball_volume;
    rec.margin_sigmas = rec.volume.std_error > 0.0 ? rec.margin / rec.volume.std_error : 0.0;
    rec.violation = rec.margin > config.sigmas * rec.volume.std_error + 1e-12 * report.ball_volume;
    report.trials.push_back(rec);
  }
  return report;
}

std::string campaign_csv(const CampaignReport& report) {
  CsvTable table({"trial", "digest", "complexity", "volume", "volume_stderr", "sampled_diameter", "ball_volume",
                  "margin", "margin_sigmas", "violation", "trim_rounds", "witnesses"});
  for (const TrialRecord& r : report.trials) {
    table.add_row({std::to_string(r.trial), hex64(r.digest), std::to_string(r.complexity),
                   format_real(r.volume.value), format_real(r.volume.std_error), format_real(r.sampled_diameter),
                   format_real(report.ball_volume), format_real(r.margin), format_real(r.margin_sigmas),
                   r.violation ? "1" : "0", std::to_string(r.trim_rounds), std::to_string(r.witnesses)});
  }
  return table.str();
}

json campaign_json(const CampaignReport& report) {
  json j;
  j["config"] = campaign_config_to_json(report.config);
  j["ball_volume"] = report.ball_volume;
  j["trials"] = report.trials.size();
  j["violations"] = report.violations();
  j["max_margin"] = report.max_margin();
  double worst_sigmas = -std::numeric_limits<double>::infinity();
  std::set<std::uint64_t> digests;
  for (const TrialRecord& r : report.trials) {
    worst_sigmas = std::max(worst_sigmas, r.margin_sigmas);
    digests.insert(r.digest);
  }
  j["max_margin_sigmas"] = worst_sigmas;
  j["distinct_regions"] = digests.size();
  j["admissibility"] = "sampled-admissible";
  j["equality_trial"] = report.trials.empty() ? json() : json{{"margin", report.trials[0].margin},
                                                               {"std_error", report.trials[0].volume.std_error}};
  return j;
}

GreedyResult greedy_maximal(const Space& space, double D, std::size_t candidate_count, std::uint64_t seed,
                            bool seed_with_ball) {
  require_diameter_bound(space, D);
  if (candidate_count < 1) throw InvalidGeometry("greedy construction needs at least one candidate");
  const Ball envelope{space.pole(), D};
  const BallSampler sampler(space, envelope);
  const Stream stream(seed, streams::kGreedy);
  std::vector<Point> candidates(candidate_count, space.pole());
  parallel_for(candidate_count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Engine engine = stream.engine(i);
      candidates[i] = sampler.draw(engine);
    }
  });
  if (seed_with_ball) {
    const double half = 0.5 * D;
    std::stable_partition(candidates.begin(), candidates.end(),
                          [&](const Point& x) { return distance(space, space.pole(), x) <= half; });
  }
  const double key_D = key_of(space, D);
  std::vector<Point> accepted;
  for (const Point& x : candidates) {
    const bool ok = std::all_of(accepted.begin(), accepted.end(),
                                [&](const Point& a) { return within(space, x, a, D, key_D); });
    if (ok) accepted.push_back(x);
  }
  GreedyResult out;
  out.candidates = candidate_count;
  const double n = static_cast<double>(candidate_count);
  const double p = static_cast<double>(accepted.size()) / n;
  out.volume = p * sampler.volume();
  out.std_error = sampler.volume() * std::sqrt(p * (1.0 - p) / n);
  out.ball_volume = ball_volume(space, 0.5 * D);
  out.deficit = out.ball_volume - out.volume;
  out.accepted = make_cloud(std::move(accepted), n / sampler.volume(), seed);
  return out;
}

Region two_caps_fixture(const Space& space, double D) {
  return Region::unite({Region::ball(make_ball(space, along_axis(space, 0.32 * D), 0.18 * D)),
                        Region::ball(make_ball(space, along_axis(space, -0.32 * D), 0.18 * D))});
}

Region dented_ball_fixture(const Space& space, double D) {
  return Region::difference(Region::ball(make_ball(space, space.pole(), 0.42 * D)),
                            Region::ball(make_ball(space, along_axis(space, 0.39 * D), 0.16 * D)));
}

std::vector<std::pair<std::string, Region>> flow_fixtures(const CampaignConfig& config) {
  const Space& space = config.space;
  std::vector<std::pair<std::string, Region>> out;
  out.emplace_back("cap", Region::ball(make_ball(space, space.pole(), 0.4 * config.D)));
  out.emplace_back("two_caps", two_caps_fixture(space, config.D));
  out.emplace_back("dented_ball", dented_ball_fixture(space, config.D));
  for (std::size_t i = 0; i < config.random_flows; ++i) {
    const AdmissibleRegion adm = random_admissible_region(space, config.D, config.complexity,
                                                          derived_seed(config.seed, streams::kFlow, i),
                                                          config.witness_points);
    out.emplace_back("random_" + std::to_string(i), adm.region);
  }
  return out;
}

std::vector<FlowCase> symmetrization_campaign(const CampaignConfig& config) {
  config.validate();
  std::vector<FlowCase> cases;
  const auto fixtures = flow_fixtures(config);
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    FlowConfig fc = config.flow;
    fc.seed = derived_seed(config.seed, streams::kStrategy, i);
    fc.stop_epsilon = config.flow_threshold;
    const bool expect = fixtures[i].first.rfind("random_", 0) != 0;
    FlowReport report = run_flow(config.space, fixtures[i].second, Strategy{config.strategy, std::nullopt, {}}, fc);
    FlowCase c{fixtures[i].first, fixtures[i].second, expect, std::move(report)};
    c.volume_ok = c.report.volume_drift_sigmas() <= config.sigmas;
    c.diameter_ok = c.report.diameter_excess() <= 0.0;
    c.converged_ok = !c.expect_convergence || c.report.converged();
    cases.push_back(std::move(c));
  }
  return cases;
}

json symmetrization_json(const std::vector<FlowCase>& cases) {
  json out = json::array();
  for (const FlowCase& c : cases) {
    json j;
    j["name"] = c.name;
    j["digest"] = hex64(region_digest(c.report.space, c.initial));
    j["expect_convergence"] = c.expect_convergence;
    j["passed"] = c.passed();
    j["volume_ok"] = c.volume_ok;
    j["diameter_ok"] = c.diameter_ok;
    j["converged_ok"] = c.converged_ok;
    j["flow"] = flow_json(c.report);
    j["reference_ball"] = ball_json(c.report.reference);
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace isodiam

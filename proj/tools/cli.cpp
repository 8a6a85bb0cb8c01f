#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "isodiam/convexity.hpp"
#include "isodiam/csv.hpp"
#include "isodiam/errors.hpp"
#include "isodiam/experiments.hpp"
#include "isodiam/region_io.hpp"
#include "isodiam/sampling.hpp"
#include "isodiam/symmetrize.hpp"

namespace isodiam::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr const char* kUnits =
    "Units: distances, radii and D are geodesic lengths for curvature +1 (sphere), -1 (hyperbolic) or 0 "
    "(euclidean). Volumes are n-dimensional Riemannian volumes in the same units. Points are ambient coordinates: "
    "n+1 numbers on the quadrics with the pole as the last axis, n numbers in euclidean space.";

const std::vector<std::string> kSpaceNames{"sphere", "hyperbolic", "euclidean"};

struct Options {
  std::string space = "sphere";
  int dim = 2;
  std::uint64_t seed = 0;
  double radius = 0.0;
  double D = 0.0;
  fs::path region;
  fs::path cloud;
  fs::path config;
  fs::path out;
  fs::path json_out;
  std::size_t volume_samples = 100000;
  std::size_t diameter_samples = 100000;
  std::size_t flow_samples = 20000;
  std::size_t verify_samples = 100000;
  std::size_t hull_samples = 20000;
  std::size_t steps = 200;
  double epsilon = 0.0;
  std::string strategy = "mass-transfer";
  std::size_t points = 3000;
  std::size_t identity_points = 1000;
  int depth_cap = 8;
  std::size_t trials = 100;
  std::size_t probe_trials = 10000;
  int complexity = 4;
  std::size_t witness_points = 1500;
  double sigmas = 3.0;
  std::size_t candidates = 20000;
  bool seed_with_ball = false;
};

struct Flags {
  CLI::Option* space = nullptr;
  CLI::Option* dim = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* radius = nullptr;
  CLI::Option* region = nullptr;
  CLI::Option* config = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* json_out = nullptr;
  CLI::Option* samples = nullptr;
};

Space space_of(const Options& o) { return Space(curvature_from_string(o.space), o.dim); }

/// Rejects output paths whose directory is missing, before any work is done.
void check_output(const fs::path& path) {
  if (path.empty()) return;
  if (fs::is_directory(path)) throw UsageError("output path " + path.string() + " is a directory");
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  if (!fs::is_directory(dir)) throw UsageError("output directory " + dir.string() + " does not exist");
}

void require_seed(const CLI::Option* seed, const std::string& what) {
  if (seed->count() == 0) throw UsageError(what + " is stochastic: --seed is required");
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json vec_json(const Vec& v) {
  json a = json::array();
  for (double x : v.values()) a.push_back(x);
  return a;
}

void add_space_flags(CLI::App* sub, Options& o, Flags& f) {
  f.space = sub->add_option("--space", o.space, "Model space")->check(CLI::IsMember(kSpaceNames));
  f.dim = sub->add_option("--dim", o.dim, "Dimension n of the space (default 2)")->check(CLI::Range(1, 64));
}

CLI::Option* add_seed(CLI::App* sub, Options& o) {
  return sub->add_option("--seed", o.seed, "Seed (unsigned 64-bit) of every random stream used by the run");
}

// ---------------------------------------------------------------------------

int cmd_volume(const Options& o, const Flags& f, std::ostream& out) {
  if (f.radius->count() > 0) {
    if (f.seed->count() > 0 || f.samples->count() > 0) throw UsageError("--radius is exact: --seed/--samples do not apply");
    const Space space = space_of(o);
    if (!(o.radius >= 0.0) || (space.spherical() && o.radius > std::numbers::pi)) {
      throw UsageError("--radius must lie in [0, pi] on the sphere and be nonnegative otherwise");
    }
    out << format_real(ball_volume(space, o.radius)) << '\n';
    return kExitOk;
  }
  if (f.region->count() == 0) throw UsageError("volume needs --radius or --region");
  require_seed(f.seed, "volume --region");
  const std::optional<Space> fallback = f.space->count() > 0 ? std::optional(space_of(o)) : std::nullopt;
  const RegionDocument doc = load_region(o.region, fallback);
  const VolumeEstimate v = volume_estimate(doc.space, doc.region, o.volume_samples, o.seed);
  out << format_real(v.value) << ' ' << format_real(v.std_error) << '\n';
  return kExitOk;
}

int cmd_diameter(const Options& o, const Flags& f, std::ostream& out) {
  require_seed(f.seed, "diameter");
  const std::optional<Space> fallback = f.space->count() > 0 ? std::optional(space_of(o)) : std::nullopt;
  const RegionDocument doc = load_region(o.region, fallback);
  const Ball env = bounding_ball(doc.space, doc.region);
  const double density = static_cast<double>(o.diameter_samples) / ball_volume(doc.space, env.radius);
  const PointCloud cloud = sample_in(doc.space, doc.region, env, density, o.seed);
  json j{{"samples", cloud.size()}, {"proposals", o.diameter_samples}};
  if (cloud.size() >= 2) {
    const DiameterResult d = diameter(doc.space, cloud);
    j["diameter"] = d.value;
    j["pair"] = {vec_json(cloud.points[d.first].coords()), vec_json(cloud.points[d.second].coords())};
  } else {
    j["diameter"] = 0.0;
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

FlowConfig flow_config_of(const Options& o) {
  FlowConfig c;
  c.max_steps = o.steps;
  c.stop_epsilon = o.epsilon;
  c.seed = o.seed;
  c.volume_samples = o.flow_samples;
  c.cloud_points = o.points;
  c.identity_points = o.identity_points;
  c.depth_cap = o.depth_cap;
  return c;
}

CampaignConfig load_campaign(const Options& o, const Flags& f) {
  std::ifstream in(o.config);
  if (!in) throw DocumentError("", "cannot open config " + o.config.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  CampaignConfig c = campaign_config_from_json(parse_json_text(buf.str(), o.config.string()));
  if (f.seed->count() > 0) c.seed = o.seed;
  if (f.out->count() > 0) c.csv_path = o.out;
  if (f.json_out->count() > 0) c.json_path = o.json_out;
  if (c.csv_path) check_output(*c.csv_path);
  if (c.json_path) check_output(*c.json_path);
  c.validate();
  return c;
}

int cmd_flow_battery(const Options& o, const Flags& f, std::ostream& out) {
  const CampaignConfig config = load_campaign(o, f);
  const std::vector<FlowCase> cases = symmetrization_campaign(config);
  CsvTable table({"name", "steps", "stop_reason", "final_hausdorff", "volume_drift_sigmas", "diameter_excess",
                  "identity_failures", "rebases", "passed"});
  bool all = true;
  for (const FlowCase& c : cases) {
    all = all && c.passed();
    table.add_row({c.name, std::to_string(c.report.steps.size() - 1), c.report.stop_reason,
                   format_real(c.report.steps.back().hausdorff), format_real(c.report.volume_drift_sigmas()),
                   format_real(c.report.diameter_excess()), std::to_string(c.report.identity_failures()),
                   std::to_string(c.report.rebases), c.passed() ? "1" : "0"});
  }
  if (config.csv_path) write_file_atomically(*config.csv_path, table.str());
  if (config.json_path) {
    json doc{{"config", campaign_config_to_json(config)}, {"flows", symmetrization_json(cases)}};
    write_file_atomically(*config.json_path, doc.dump(2) + "\n");
  }
  out << table.str();
  return all ? kExitOk : kExitFinding;
}

int cmd_flow(const Options& o, const Flags& f, std::ostream& out) {
  if (f.config->count() > 0) return cmd_flow_battery(o, f, out);
  if (f.region->count() == 0) throw UsageError("flow needs --region or --config");
  require_seed(f.seed, "flow");
  const Strategy::Kind kind = strategy_kind_from_string(o.strategy);
  if (kind == Strategy::Kind::FixedSchedule) throw UsageError("fixed-schedule needs a schedule; use the library API");
  check_output(o.out);
  check_output(o.json_out);
  const std::optional<Space> fallback = f.space->count() > 0 ? std::optional(space_of(o)) : std::nullopt;
  const RegionDocument doc = load_region(o.region, fallback);
  const FlowConfig config = flow_config_of(o);

  const FlowReport report = run_flow(doc.space, doc.region, Strategy{kind, std::nullopt, {}}, config);
  if (!o.out.empty()) write_file_atomically(o.out, flow_csv(report));
  if (!o.json_out.empty()) write_file_atomically(o.json_out, flow_json(report).dump(2) + "\n");

  const double excess = report.diameter_excess();
  const double drift = report.volume_drift_sigmas();
  json summary{{"stop_reason", report.stop_reason},
               {"steps", report.steps.size() - 1},
               {"final_hausdorff", report.steps.back().hausdorff},
               {"volume_drift_sigmas", finite_or_null(drift)},
               {"diameter_excess", finite_or_null(excess)},
               {"identity_failures", report.identity_failures()},
               {"rebases", report.rebases}};
  out << summary.dump(2) << '\n';
  const bool finding = report.identity_failures() > 0 || excess > 0.0 || drift > 3.0;
  return finding ? kExitFinding : kExitOk;
}

int cmd_verify(const Options& o, const Flags& f, std::ostream& out) {
  CampaignConfig config;
  if (f.config->count() > 0) {
    config = load_campaign(o, f);
  } else {
    require_seed(f.seed, "verify");
    config.space = space_of(o);
    config.D = o.D;
    config.trials = o.trials;
    config.samples = o.verify_samples;
    config.complexity = o.complexity;
    config.witness_points = o.witness_points;
    config.sigmas = o.sigmas;
    config.seed = o.seed;
    if (!o.out.empty()) config.csv_path = o.out;
    if (!o.json_out.empty()) config.json_path = o.json_out;
    check_output(o.out);
    check_output(o.json_out);
    config.validate();
  }
  const CampaignReport report = verify_isodiametric(config);
  const json summary = campaign_json(report);
  if (config.csv_path) write_file_atomically(*config.csv_path, campaign_csv(report));
  if (config.json_path) write_file_atomically(*config.json_path, summary.dump(2) + "\n");
  out << summary.dump(2) << '\n';
  return report.violations() > 0 ? kExitFinding : kExitOk;
}

int cmd_greedy(const Options& o, const Flags& f, std::ostream& out) {
  require_seed(f.seed, "greedy");
  check_output(o.out);
  const Space space = space_of(o);
  const GreedyResult g = greedy_maximal(space, o.D, o.candidates, o.seed, o.seed_with_ball);
  if (!o.out.empty()) {
    std::vector<std::string> header;
    for (int i = 0; i < space.ambient_dim(); ++i) header.push_back("x_" + std::to_string(i));
    CsvTable table(std::move(header));
    for (const Point& p : g.accepted.points) {
      std::vector<std::string> row;
      for (double x : p.coords().values()) row.push_back(format_real(x));
      table.add_row(std::move(row));
    }
    write_file_atomically(o.out, table.str());
  }
  const json summary{{"accepted", g.accepted.size()}, {"candidates", g.candidates},
                     {"volume", g.volume},            {"std_error", g.std_error},
                     {"ball_volume", g.ball_volume},  {"deficit", g.deficit},
                     {"deficit_sigmas", g.std_error > 0.0 ? json(g.deficit / g.std_error) : json(nullptr)},
                     {"exceeds_ball", g.exceeds_ball(o.sigmas)}};
  out << summary.dump(2) << '\n';
  return g.exceeds_ball(o.sigmas) ? kExitFinding : kExitOk;
}

int cmd_hemisphere(const Options& o, std::ostream& out) {
  const CloudDocument doc = load_cloud(o.cloud);
  if (!doc.space.spherical()) throw UsageError("hemisphere needs a spherical cloud");
  const auto cert = hemisphere_center(std::span<const Point>(doc.points));
  json j{{"points", doc.points.size()}, {"in_open_hemisphere", cert.has_value()}};
  if (cert) {
    j["center"] = vec_json(cert->z / norm(cert->z));
    j["min_margin"] = cert->min_margin / norm(cert->z);
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_hull_check(const Options& o, const Flags& f, std::ostream& out) {
  require_seed(f.seed, "hull-check");
  const CloudDocument doc = load_cloud(o.cloud);
  const HullDiameter h = hull_diameter_check(doc.space, doc.points, o.hull_samples, o.seed);
  const json j{{"points", doc.points.size()},
               {"hull_samples", o.hull_samples},
               {"cloud_diameter", h.cloud},
               {"hull_diameter", h.hull},
               {"gap", h.cloud - h.hull}};
  out << j.dump(2) << '\n';
  return h.hull > h.cloud + 1e-9 ? kExitFinding : kExitOk;
}

int cmd_ball_probe(const Options& o, const Flags& f, std::ostream& out) {
  require_seed(f.seed, "ball-probe");
  const Space space = space_of(o);
  const Ball ball = make_ball(space, space.pole(), o.radius);
  const bool expect_convex = !space.spherical() || o.radius < 0.5 * std::numbers::pi;
  const ConvexityProbe p = ball_convexity_probe(space, ball, o.probe_trials, o.seed);
  json j{{"radius", o.radius}, {"trials", p.trials}, {"violations", p.violations}, {"convex_expected", expect_convex}};
  if (p.witness) j["witness"] = {vec_json(p.witness->first.coords()), vec_json(p.witness->second.coords())};
  out << j.dump(2) << '\n';
  return expect_convex && p.violations > 0 ? kExitFinding : kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-point symmetrization and isodiametric checks in spaces of constant curvature.", "isodiam"};
  app.require_subcommand(1);
  app.footer(kUnits);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Options o;
  Flags f;

  auto* volume = app.add_subcommand("volume", "Volume of a ball (closed form) or of a region (Monte Carlo)");
  add_space_flags(volume, o, f);
  f.radius = volume->add_option("--radius", o.radius, "Ball radius; prints the exact volume of the ball");
  f.region = volume->add_option("--region", o.region, "Region document (JSON)")->check(CLI::ExistingFile);
  f.radius->excludes(f.region);
  f.samples = volume->add_option("--samples", o.volume_samples, "Monte Carlo proposals in the bounding ball (default 100000)")
                  ->check(CLI::PositiveNumber);
  f.seed = add_seed(volume, o);
  volume->footer(std::string("Output: the volume; with --region a second column holds its standard error.\n") +
                 kUnits);

  Flags fd;
  auto* diam = app.add_subcommand("diameter", "Sampled diameter of a region");
  add_space_flags(diam, o, fd);
  fd.region = diam->add_option("--region", o.region, "Region document (JSON)")->required()->check(CLI::ExistingFile);
  fd.samples = diam->add_option("--samples", o.diameter_samples, "Proposals in the bounding ball (default 100000)")
                   ->check(CLI::PositiveNumber);
  fd.seed = add_seed(diam, o);
  diam->footer(std::string("Output: JSON with the accepted sample count, the diameter and the farthest pair.\n") +
               kUnits);

  Flags ff;
  auto* flow = app.add_subcommand("flow", "Run a symmetrization flow, or the flow battery of a campaign config");
  add_space_flags(flow, o, ff);
  ff.region = flow->add_option("--region", o.region, "Initial region document (JSON)")->check(CLI::ExistingFile);
  ff.config = flow->add_option("--config", o.config, "Campaign config (JSON); runs the fixture battery")
                  ->check(CLI::ExistingFile);
  ff.region->excludes(ff.config);
  auto* steps = flow->add_option("--steps", o.steps, "Maximum symmetrization steps (default 200)");
  auto* eps = flow->add_option("--epsilon", o.epsilon, "Stop once the Hausdorff distance to the cap is below this (default 0: never)");
  auto* strat = flow->add_option("--strategy", o.strategy, "Hyperplane choice (default mass-transfer)")
                    ->check(CLI::IsMember({"mass-transfer", "farthest-pair", "random-through-pole"}));
  ff.samples = flow->add_option("--samples", o.flow_samples, "Volume samples per step (default 20000)")
                   ->check(CLI::PositiveNumber);
  auto* pts = flow->add_option("--points", o.points, "Target cloud size per step (default 3000)")->check(CLI::PositiveNumber);
  auto* idp = flow->add_option("--identity-points", o.identity_points, "Counting-identity checks per step (default 1000)");
  auto* cap = flow->add_option("--depth-cap", o.depth_cap, "Rebase once the nesting depth exceeds this (default 8)")
                  ->check(CLI::PositiveNumber);
  for (CLI::Option* opt : {steps, eps, strat, ff.samples, pts, idp, cap}) opt->excludes(ff.config);
  ff.seed = add_seed(flow, o);
  ff.out = flow->add_option("--out", o.out, "CSV output path");
  ff.json_out = flow->add_option("--json", o.json_out, "JSON output path");
  flow->footer(std::string(
                   "Single flow CSV: one row per step, step 0 included. Columns: step, volume, volume_stderr, "
                   "diameter, hausdorff, normal_0..normal_m (ambient coordinates of the step's hyperplane normal), "
                   "offset, orientation, spacing, cloud_size, depth, rebased, rebase_radius, identity_checks, "
                   "identity_failures. hausdorff is measured against the pole-centered ball of equal volume.\n"
                   "Battery CSV: name, steps, stop_reason, final_hausdorff, volume_drift_sigmas, diameter_excess, "
                   "identity_failures, rebases, passed.\n"
                   "Exit 1 when a counting-identity check fails, the diameter grows beyond sampling slack or the "
                   "volume drifts more than 3 standard errors (battery: any fixture fails).\n") +
               kUnits);

  Flags fv;
  auto* verify = app.add_subcommand("verify", "Isodiametric campaign: V(X) <= V(B(D/2)) on random admissible regions");
  add_space_flags(verify, o, fv);
  auto* dflag = verify->add_option("--D", o.D, "Diameter bound (below pi on the sphere)");
  auto* trials = verify->add_option("--trials", o.trials, "Trials, the first being the exact ball (default 100)");
  fv.samples = verify->add_option("--samples", o.verify_samples, "Volume samples per trial (default 100000)");
  auto* cx = verify->add_option("--complexity", o.complexity, "Maximum balls per random region (default 4)");
  auto* wp = verify->add_option("--witness-points", o.witness_points, "Sample size of the diameter trimming (default 1500)");
  auto* sg = verify->add_option("--sigmas", o.sigmas, "Violation threshold in standard errors (default 3)");
  fv.config = verify->add_option("--config", o.config, "Campaign config (JSON)")->check(CLI::ExistingFile);
  for (CLI::Option* opt : {dflag, trials, fv.samples, cx, wp, sg, fv.space, fv.dim}) opt->excludes(fv.config);
  fv.seed = add_seed(verify, o);
  fv.out = verify->add_option("--out", o.out, "CSV output path (one row per trial)");
  fv.json_out = verify->add_option("--json", o.json_out, "JSON summary output path");
  verify->footer(std::string("CSV columns: trial, digest (hex region digest), complexity (0 = exact ball), volume, "
                             "volume_stderr, sampled_diameter, ball_volume, margin (volume - ball_volume), "
                             "margin_sigmas, violation, trim_rounds, witnesses.\n"
                             "Exit 1 when any trial exceeds the ball volume by more than --sigmas standard errors.\n") +
                 kUnits);

  Flags fg;
  auto* greedy = app.add_subcommand("greedy", "Greedy D-bounded point set inside B(pole, D)");
  add_space_flags(greedy, o, fg);
  greedy->add_option("--D", o.D, "Diameter bound")->required();
  greedy->add_option("--candidates", o.candidates, "Uniform candidates in B(pole, D) (default 20000)")
      ->check(CLI::PositiveNumber);
  greedy->add_flag("--seed-with-ball", o.seed_with_ball, "Offer the candidates inside B(pole, D/2) first");
  greedy->add_option("--sigmas", o.sigmas, "Threshold for exceeding the ball volume (default 3)");
  fg.seed = add_seed(greedy, o);
  fg.out = greedy->add_option("--out", o.out, "CSV of accepted points (columns x_0..x_m)");
  greedy->footer(std::string("Volume = accepted fraction times V(B(pole, D)). Exit 1 when it exceeds V(B(D/2)) by "
                             "more than --sigmas standard errors.\n") +
                 kUnits);

  auto* hemi = app.add_subcommand("hemisphere", "Open-hemisphere certificate for a spherical point cloud");
  hemi->add_option("--cloud", o.cloud, "Cloud document {\"space\", \"dim\", \"points\"}")->required()->check(CLI::ExistingFile);
  hemi->footer(std::string("Output: JSON with in_open_hemisphere, the hemisphere center and the smallest "
                           "inner product of a point with it.\n") +
               kUnits);

  Flags fh;
  auto* hull = app.add_subcommand("hull-check", "Compare the diameter of a cloud with that of its convex hull");
  hull->add_option("--cloud", o.cloud, "Cloud document {\"space\", \"dim\", \"points\"}")->required()->check(CLI::ExistingFile);
  fh.samples = hull->add_option("--samples", o.hull_samples, "Random hull points (default 20000)");
  fh.seed = add_seed(hull, o);
  hull->footer(std::string("Spherical clouds need diameter at most pi/2. Exit 1 when the hull diameter exceeds "
                           "the cloud diameter by more than 1e-9.\n") +
               kUnits);

  Flags fb;
  auto* probe = app.add_subcommand("ball-probe", "Midpoint convexity probe of the ball B(pole, radius)");
  add_space_flags(probe, o, fb);
  probe->add_option("--radius", o.radius, "Ball radius")->required()->check(CLI::PositiveNumber);
  probe->add_option("--trials", o.probe_trials, "Random pairs (default 10000)")->check(CLI::PositiveNumber);
  fb.seed = add_seed(probe, o);
  probe->footer(std::string("Exit 1 when a violation is found for a ball expected to be convex (any hyperbolic or "
                            "euclidean ball, spherical radius below pi/2).\n") +
                kUnits);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "isodiam: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }

  try {
    if (volume->parsed()) return cmd_volume(o, f, out);
    if (diam->parsed()) return cmd_diameter(o, fd, out);
    if (flow->parsed()) return cmd_flow(o, ff, out);
    if (verify->parsed()) {
      if (fv.config->count() == 0 && dflag->count() == 0) throw UsageError("verify needs --D or --config");
      return cmd_verify(o, fv, out);
    }
    if (greedy->parsed()) return cmd_greedy(o, fg, out);
    if (hemi->parsed()) return cmd_hemisphere(o, out);
    if (hull->parsed()) return cmd_hull_check(o, fh, out);
    if (probe->parsed()) return cmd_ball_probe(o, fb, out);
  } catch (const UsageError& e) {
    err << "isodiam: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "isodiam: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "isodiam: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace isodiam::cli

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "doctest.h"
#include "isodiam/experiments.hpp"
#include "isodiam/region_io.hpp"
#include "test_support.hpp"

using namespace isodiam;
using isodiam::testing::all_spaces;

namespace {

CampaignConfig quick_config(const Space& space, double D, std::uint64_t seed) {
  CampaignConfig c;
  c.space = space;
  c.D = D;
  c.seed = seed;
  c.trials = 100;
  c.samples = 20000;
  c.witness_points = 800;
  return c;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("random_admissible_region: complexity one is a ball of radius at most D/2") {
  for (const Space& space : all_spaces(2)) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const AdmissibleRegion adm = random_admissible_region(space, 1.2, 1, seed);
      REQUIRE(adm.region.kind() == Region::Kind::Ball);
      CHECK(adm.region.as_ball().radius <= 0.6);
      CHECK(adm.witnesses == 0);
    }
  }
}

TEST_CASE("random_admissible_region: sampled diameter never exceeds D") {
  for (const Space& space : {Space::sphere(2), Space::hyperbolic(2), Space::euclidean(2), Space::sphere(3)}) {
    int trimmed = 0;
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const double D = space.spherical() ? 2.0 : 1.5;
      const AdmissibleRegion adm = random_admissible_region(space, D, 2 + static_cast<int>(seed % 4), seed, 600);
      CHECK(adm.sampled_diameter <= D + 1e-9);
      if (adm.witnesses > 0) ++trimmed;
    }
    CHECK(trimmed > 0);
  }
  CHECK_THROWS_AS(random_admissible_region(Space::sphere(2), 3.2, 2, 1), InvalidGeometry);
  CHECK_THROWS_AS(random_admissible_region(Space::euclidean(2), 1.0, 0, 1), InvalidGeometry);
}

TEST_CASE("random_admissible_region: 100 seeds give 100 distinct regions") {
  const Space s2 = Space::sphere(2);
  std::set<std::uint64_t> digests;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    digests.insert(region_digest(s2, random_admissible_region(s2, 1.5, 3, seed, 300).region));
  }
  CHECK(digests.size() == 100);
}

TEST_CASE("verify_isodiametric: no violations on S^2 (D = 2) and H^2 (D = 1.5)") {
  for (const auto& [space, D] : {std::pair{Space::sphere(2), 2.0}, std::pair{Space::hyperbolic(2), 1.5}}) {
    const CampaignReport report = verify_isodiametric(quick_config(space, D, 5));
    CHECK(report.trials.size() == 100);
    CHECK(report.violations() == 0);
    CHECK(report.ball_volume == doctest::Approx(ball_volume(space, D / 2)));
    // Exact ball: equality within 3 standard errors.
    const TrialRecord& eq = report.trials.front();
    CHECK(eq.complexity == 0);
    CHECK(eq.volume.std_error > 0.0);
    CHECK(std::abs(eq.margin) <= 3.0 * eq.volume.std_error);
    std::size_t flagged = 0;
    for (const TrialRecord& r : report.trials) {
      CHECK(r.sampled_diameter <= D + 1e-9);
      if (r.violation) ++flagged;
    }
    CHECK(flagged == report.violations());
  }
}

TEST_CASE("verify_isodiametric: reports are reproducible") {
  CampaignConfig c = quick_config(Space::euclidean(2), 1.0, 9);
  c.trials = 12;
  const CampaignReport a = verify_isodiametric(c);
  const CampaignReport b = verify_isodiametric(c);
  const std::string csv = campaign_csv(a);
  CHECK(csv == campaign_csv(b));
  CHECK(campaign_json(a).dump() == campaign_json(b).dump());
  CHECK(count_lines(csv) == 13);
  CHECK(csv.rfind("trial,digest,complexity,volume,volume_stderr,sampled_diameter,ball_volume,margin", 0) == 0);
  const nlohmann::json j = campaign_json(a);
  CHECK(j["violations"] == 0);
  CHECK(j["trials"] == 12);
  CHECK(j["admissibility"] == "sampled-admissible");
  CHECK(j["config"]["seed"] == 9);
}

TEST_CASE("campaign config documents") {
  const nlohmann::json doc = nlohmann::json::parse(R"({"space": "hyperbolic", "dim": 2, "D": 1.5, "seed": 7,
      "trials": 20, "samples": 5000, "strategy": "farthest-pair", "flow": {"max_steps": 50},
      "csv": "out.csv"})");
  const CampaignConfig c = campaign_config_from_json(doc);
  CHECK(c.space == Space::hyperbolic(2));
  CHECK(c.trials == 20);
  CHECK(c.flow.max_steps == 50);
  CHECK(c.strategy == Strategy::Kind::FarthestPairBisector);
  CHECK(c.csv_path->string() == "out.csv");
  const CampaignConfig again = campaign_config_from_json(campaign_config_to_json(c));
  CHECK(campaign_config_to_json(again) == campaign_config_to_json(c));

  auto error_at = [](const char* text) {
    try {
      campaign_config_from_json(nlohmann::json::parse(text));
    } catch (const DocumentError& e) {
      return e.where();
    }
    return std::string("no error");
  };
  CHECK(error_at(R"({"space": "sphere", "dim": 2, "D": 1.0, "seed": 1, "trails": 3})") == "/trails");
  CHECK(error_at(R"({"space": "sphere", "dim": 2, "D": 1.0})") == "/seed");
  CHECK(error_at(R"({"space": "sphere", "dim": 2, "D": 3.5, "seed": 1})") == "");
  CHECK(error_at(R"({"space": "sphere", "dim": 2, "D": 1.0, "seed": 1, "flow": {"steps": 3}})") == "/flow/steps");
  CHECK(error_at(R"({"space": "sphere", "dim": 2, "D": 1.0, "seed": 1, "trials": -2})") == "/trials");
}

TEST_CASE("greedy_maximal") {
  const Space s2 = Space::sphere(2);
  SUBCASE("seeded with the ball: the ball volume within 3 sigma") {
    for (const Space& space : all_spaces(2)) {
      const GreedyResult g = greedy_maximal(space, space.spherical() ? 2.0 : 1.5, 20000, 3, true);
      CHECK(std::abs(g.deficit) <= 3.0 * g.std_error);
    }
  }
  SUBCASE("unseeded on S^2 with D = 2 never significantly exceeds the ball") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const GreedyResult g = greedy_maximal(s2, 2.0, 20000, seed);
      CHECK_FALSE(g.exceeds_ball());
      CHECK(g.deficit >= -3.0 * g.std_error);
    }
  }
  SUBCASE("small D: close to the ball of radius D/2") {
    const GreedyResult g = greedy_maximal(s2, 0.2, 20000, 1);
    const double ratio = g.volume / g.ball_volume;
    CHECK(ratio >= 0.8);
    CHECK(ratio <= 1.0 + 3.0 * g.std_error / g.ball_volume);
    CHECK(g.ball_volume == doctest::Approx(2 * std::numbers::pi * (1 - std::cos(0.1))));
  }
  SUBCASE("accepted points are pairwise within D") {
    const GreedyResult g = greedy_maximal(s2, 1.0, 3000, 4);
    CHECK(diameter(s2, g.accepted).value <= 1.0);
  }
}

TEST_CASE("symmetrization_campaign on S^2") {
  CampaignConfig c = quick_config(Space::sphere(2), 1.9, 11);
  c.flow.cloud_points = 2000;
  c.flow.volume_samples = 10000;
  c.flow.identity_points = 300;
  c.random_flows = 1;
  const std::vector<FlowCase> cases = symmetrization_campaign(c);
  REQUIRE(cases.size() == 4);
  CHECK(cases[0].name == "cap");
  CHECK(cases[0].report.steps.size() == 1);
  for (const FlowCase& fc : cases) {
    INFO(fc.name);
    CHECK(fc.volume_ok);
    CHECK(fc.diameter_ok);
    CHECK(fc.passed());
    if (fc.expect_convergence) CHECK(fc.report.steps.back().hausdorff < 0.1);
  }
  const nlohmann::json j = symmetrization_json(cases);
  CHECK(j.size() == 4);
  CHECK(j[1]["name"] == "two_caps");
  CHECK(j[1]["flow"]["stop_reason"] == "converged");
}

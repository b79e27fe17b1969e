#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aloha2/analytic.hpp"
#include "aloha2/experiments.hpp"
#include "aloha2/text.hpp"

using namespace aloha2;
using namespace aloha2::experiments;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> cells_of(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  return cells;
}

SweepSpec quick_spec() {
  SweepSpec spec;
  spec.p_pairs = {{0.5, 0.5}};
  spec.lambda_grid = {0.1};
  spec.sim_slots = 20000;
  spec.seeds = {1, 2};
  return spec;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("sweep validation names the broken field") {
  CHECK_NOTHROW(validate_spec(quick_spec()));

  SweepSpec spec = quick_spec();
  spec.p_pairs.clear();
  CHECK_THROWS_WITH_AS(validate_spec(spec), "p_pairs is empty", std::domain_error);

  spec = quick_spec();
  spec.p_pairs = {{0.5, 1.5}};
  CHECK_THROWS_WITH_AS(validate_spec(spec), "p not in (0, 1]", std::domain_error);

  spec = quick_spec();
  spec.lambda_grid = {0.3, 0.1};
  CHECK_THROWS_WITH_AS(validate_spec(spec), "lambda grid not sorted", std::domain_error);

  spec = quick_spec();
  spec.lambda_grid = {-0.1};
  CHECK_THROWS_WITH_AS(validate_spec(spec), "lambda grid value not in [0, 1]",
                       std::domain_error);

  spec = quick_spec();
  spec.seeds.clear();
  CHECK_THROWS_WITH_AS(validate_spec(spec), "seeds is empty", std::domain_error);

  spec = quick_spec();
  spec.sim_slots = 0;
  CHECK_THROWS_WITH_AS(validate_spec(spec), "sim_slots is 0", std::domain_error);

  spec = quick_spec();
  spec.warmup = 20000;
  CHECK_THROWS_WITH_AS(validate_spec(spec), "warmup must be smaller than sim_slots",
                       std::domain_error);

  spec = quick_spec();
  spec.detector_threshold = 1.0;
  CHECK_THROWS_WITH_AS(validate_spec(spec), "detector_threshold must exceed 1",
                       std::domain_error);

  spec = quick_spec();
  spec.detector_resolution = 0.0;
  CHECK_THROWS_WITH_AS(validate_spec(spec), "detector_resolution must be positive",
                       std::domain_error);
}

TEST_CASE("sweep specs round-trip through JSON") {
  SweepSpec spec;
  spec.p_pairs = {{0.5, 0.5}, {0.2, 0.7}};
  spec.lambda_grid = {0.0, 0.1, 0.25};
  spec.sim_slots = 12345;
  spec.seeds = {9, 8, 7};
  spec.output_path = "figure.csv";
  spec.detector_threshold = 1.05;
  spec.detector_resolution = 0.01;

  const nlohmann::json j = nlohmann::json::parse(spec_to_json(spec));
  CHECK(j.at("warmup").is_null());  // unset means "derive from sim_slots"

  const SweepSpec parsed = spec_from_json(spec_to_json(spec));
  CHECK(parsed.p_pairs == spec.p_pairs);
  CHECK(parsed.lambda_grid == spec.lambda_grid);
  CHECK(parsed.sim_slots == spec.sim_slots);
  CHECK(!parsed.warmup.has_value());
  CHECK(parsed.seeds == spec.seeds);
  CHECK(parsed.output_path == spec.output_path);
  CHECK(parsed.detector_threshold == spec.detector_threshold);
  CHECK(parsed.detector_resolution == spec.detector_resolution);

  spec.warmup = 555;
  const SweepSpec warm = spec_from_json(spec_to_json(spec));
  REQUIRE(warm.warmup.has_value());
  CHECK(*warm.warmup == 555);

  const SweepSpec defaults = spec_from_json("{}");
  CHECK(defaults.sim_slots == 200000);
  CHECK(defaults.seeds == std::vector<std::uint64_t>{1, 2, 3, 4, 5});
}

TEST_CASE("area figure tabulates both closed forms") {
  SweepSpec spec = quick_spec();
  spec.p_pairs = {{0.5, 0.5}, {0.2, 0.2}, {1.0, 1.0}};

  const AreaFigure figure = run_area_figure(spec);
  REQUIRE(figure.rows.size() == 3);
  CHECK(figure.rows[0].area_hd == analytic::hd_region_area(0.5, 0.5));
  CHECK(figure.rows[0].area_fd == analytic::fd_region_area(0.5, 0.5));
  CHECK(figure.rows[1].area_hd == doctest::Approx(1.0 / 42.0).epsilon(1e-14));
  CHECK(figure.rows[2].area_hd == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(figure.rows[2].area_fd == 0.0);

  const auto lines = lines_of(figure.csv());
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "p1,p2,area_hd,area_fd");
  // numeric cells round-trip exactly through the CSV
  const auto cells = cells_of(lines[1]);
  REQUIRE(cells.size() == 4);
  CHECK(parse_real(cells[2]) == figure.rows[0].area_hd);
  CHECK(parse_real(cells[3]) == figure.rows[0].area_fd);
}

TEST_CASE("figure runners write the CSV and a manifest") {
  const std::string path = "/tmp/aloha2_area_figure_test.csv";
  SweepSpec spec = quick_spec();
  spec.p_pairs = {{0.4, 0.6}};
  spec.output_path = path;

  const AreaFigure figure = run_area_figure(spec);
  CHECK(slurp(path) == figure.csv());

  const nlohmann::json manifest = nlohmann::json::parse(slurp(path + ".manifest.json"));
  CHECK(manifest.at("kind") == "area");
  CHECK(manifest.at("generator") == "aloha2 0.1.0");
  CHECK(manifest.at("columns") == std::string(AreaFigure::header));
  CHECK(manifest.at("spec").at("sim_slots") == 20000);
  CHECK(manifest.at("spec").at("output_path") == path);

  std::remove(path.c_str());
  std::remove((path + ".manifest.json").c_str());
}

TEST_CASE("delay figure marks undefined and unstable grid points") {
  SweepSpec spec;
  spec.p_pairs = {{0.5, 0.5}};
  spec.lambda_grid = {0.0, 0.1, 0.3, 0.45};
  spec.sim_slots = 30000;
  spec.seeds = {1, 2};

  const DelayFigure figure = run_delay_figure(spec);
  REQUIRE(figure.rows.size() == 4);

  CHECK(figure.rows[0].mark == DelayMark::undefined);
  CHECK(!figure.rows[0].d_sim_hd.has_value());

  CHECK(figure.rows[1].mark == DelayMark::ok);
  CHECK(figure.rows[1].d_analytic == doctest::Approx(10.0 / 3.0).epsilon(1e-14));
  REQUIRE(figure.rows[1].d_sim_hd.has_value());
  CHECK(*figure.rows[1].d_sim_hd == doctest::Approx(10.0 / 3.0).epsilon(0.15));
  CHECK(figure.rows[1].d_sim_hd_stderr.has_value());  // two seeds give a spread
  CHECK(figure.rows[1].d_sim_fd.has_value());

  // rho = 0.3 / (0.5 * 0.4) = 1.5
  CHECK(figure.rows[2].mark == DelayMark::unstable);
  CHECK(!figure.rows[2].d_sim_hd.has_value());
  CHECK(figure.rows[3].mark == DelayMark::unstable);

  const auto lines = lines_of(figure.csv());
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "p,lambda_per_node,d_analytic,d_sim_hd,d_sim_hd_stderr,d_sim_fd");
  CHECK(lines[1] == "0.5,0,undefined,nan,nan,nan");
  CHECK(cells_of(lines[3]) ==
        std::vector<std::string>{"0.5", "0.3", "unstable", "nan", "nan", "nan"});

  SweepSpec asymmetric = spec;
  asymmetric.p_pairs = {{0.5, 0.6}};
  CHECK_THROWS_WITH_AS(run_delay_figure(asymmetric),
                       "delay sweep needs symmetric p pairs", std::domain_error);

  SweepSpec saturated = spec;
  saturated.p_pairs = {{1.0, 1.0}};
  CHECK_THROWS_AS(run_delay_figure(saturated), std::domain_error);
}

TEST_CASE("region figure pairs the analytic boundary with the detector") {
  SweepSpec spec;
  spec.p_pairs = {{0.5, 0.5}};
  spec.lambda_grid = {0.0, 0.2};
  spec.sim_slots = 40000;
  spec.seeds = {1};
  spec.detector_resolution = 0.005;

  const RegionFigure figure = run_region_figure(spec);
  REQUIRE(figure.rows.size() == 2);

  CHECK(figure.rows[0].lambda2_analytic == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  REQUIRE(figure.rows[0].lambda2_simulated.has_value());
  CHECK(std::abs(*figure.rows[0].lambda2_simulated - 1.0 / 3.0) <= 0.05);

  CHECK(figure.rows[1].lambda2_analytic == doctest::Approx(0.8 / 3.0).epsilon(1e-14));
  REQUIRE(figure.rows[1].lambda2_simulated.has_value());
  CHECK(std::abs(*figure.rows[1].lambda2_simulated - 0.8 / 3.0) <= 0.05);
  REQUIRE(figure.rows[1].bracket_halfwidth.has_value());
  CHECK(*figure.rows[1].bracket_halfwidth <= spec.detector_resolution);

  const auto lines = lines_of(figure.csv());
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "p1,p2,lambda1,lambda2_analytic,lambda2_simulated,bracket_halfwidth");
}

TEST_CASE("region figure skips simulation past the axis intercept") {
  SweepSpec spec;
  spec.p_pairs = {{0.5, 0.5}};
  spec.lambda_grid = {0.35};  // intercept is 1/3
  spec.seeds = {1};

  const RegionFigure figure = run_region_figure(spec);
  REQUIRE(figure.rows.size() == 1);
  CHECK(figure.rows[0].lambda2_analytic == 0.0);
  CHECK(!figure.rows[0].lambda2_simulated.has_value());

  const auto lines = lines_of(figure.csv());
  const auto cells = cells_of(lines[1]);
  REQUIRE(cells.size() == 6);
  CHECK(cells[4] == "nan");
  CHECK(cells[5] == "nan");

  // analytic cells do not depend on the seed
  SweepSpec reseeded = spec;
  reseeded.seeds = {77};
  const RegionFigure again = run_region_figure(reseeded);
  CHECK(again.rows[0].lambda2_analytic == figure.rows[0].lambda2_analytic);

  SweepSpec saturated = spec;
  saturated.p_pairs = {{1.0, 1.0}};
  CHECK_THROWS_WITH_AS(run_region_figure(saturated),
                       "region sweep simulates: p must be inside (0, 1)",
                       std::domain_error);
}

TEST_CASE("verification suite cross-checks identity and truncated chain") {
  const std::vector<NetworkParams> params_list = {
      NetworkParams(0.1, 0.1, 0.5, 0.5), NetworkParams(0.2, 0.1, 0.6, 0.4)};

  const VerificationReport report = run_verification_suite(params_list, 15);
  CHECK(report.pass);
  REQUIRE(report.cases.size() == 2);
  for (const VerificationCase& c : report.cases) {
    CHECK(c.pass);
    CHECK(c.identity.max_abs_error <= 1e-12);
    CHECK(c.identity.nu_consistent);
    CHECK(c.truncation >= 8);
    CHECK(c.tv_distance <= 1e-6);
  }

  const nlohmann::json j = nlohmann::json::parse(report.to_json());
  CHECK(j.at("window") == 15);
  CHECK(j.at("identity_tol") == 1e-12);
  CHECK(j.at("pass") == true);
  REQUIRE(j.at("cases").size() == 2);
  CHECK(j.at("cases")[0].at("params").at("lambda1") == 0.1);
  CHECK(j.at("cases")[0].at("worst_pair").contains("movement"));

  CHECK_THROWS_WITH_AS(run_verification_suite({}, 10), "no parameter sets",
                       std::domain_error);
}

TEST_CASE("fault injection makes the verification suite fail") {
  const std::vector<NetworkParams> params_list = {NetworkParams(0.2, 0.1, 0.6, 0.4)};

  chain::VerifyOptions bump;
  bump.nu_perturb = 1e-6;
  const VerificationReport perturbed = run_verification_suite(params_list, 10, 1e-6, bump);
  CHECK(!perturbed.pass);
  CHECK(perturbed.cases[0].identity.max_abs_error > 1e-12);

  chain::VerifyOptions swapped;
  swapped.swap_p_in_nu = true;
  CHECK(!run_verification_suite(params_list, 10, 1e-6, swapped).pass);
}

TEST_CASE("the parameter sampler stays inside the stability region") {
  const auto params_list = sample_stable_params(50, 123);
  REQUIRE(params_list.size() == 50);
  for (const NetworkParams& params : params_list) {
    const analytic::StabilityResult stability = analytic::check_stability(params);
    CHECK(stability.stable);
    CHECK(std::max(stability.rho.rho1, stability.rho.rho2) <= 0.85);
    CHECK(params.p1() >= 0.1);
    CHECK(params.p2() <= 0.95);
  }

  const auto repeat = sample_stable_params(50, 123);
  CHECK(params_list == repeat);
  CHECK(sample_stable_params(5, 124) != std::vector<NetworkParams>(params_list.begin(),
                                                                   params_list.begin() + 5));
  CHECK_THROWS_AS(sample_stable_params(1, 1, 1.5), std::domain_error);
}

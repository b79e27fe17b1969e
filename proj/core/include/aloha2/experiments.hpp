#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aloha2/chain.hpp"
#include "aloha2/params.hpp"

namespace aloha2::experiments {

// Shared description of a sweep. lambda_grid is interpreted per figure:
// lambda1 values for the region figure, per-node symmetric rates for the
// delay figure; the area figure only uses p_pairs. When output_path is
// nonempty the figure runners write the CSV there plus a JSON run manifest
// at "<output_path>.manifest.json".
struct SweepSpec {
  std::vector<std::pair<double, double>> p_pairs;
  std::vector<double> lambda_grid;
  std::uint64_t sim_slots = 200000;
  std::optional<std::uint64_t> warmup;  // default: sim_slots / 10
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string output_path;
  double detector_threshold = 1.02;
  double detector_resolution = 0.005;
};

// Throws std::domain_error (grids must be finite, sorted, nonnegative;
// seeds nonempty; warmup below the horizon).
void validate_spec(const SweepSpec& spec);

std::string spec_to_json(const SweepSpec& spec);
SweepSpec spec_from_json(std::string_view json_text);

// Analytic vs simulated half-duplex stability boundary, one row per
// (p1, p2, lambda1) grid point. Rows where the simulated search is
// impossible (lambda1 at or past the axis intercept) or where the detector
// errors carry empty simulated cells (rendered "nan").
struct RegionRow {
  double p1 = 0.0;
  double p2 = 0.0;
  double lambda1 = 0.0;
  double lambda2_analytic = 0.0;
  std::optional<double> lambda2_simulated;
  std::optional<double> bracket_halfwidth;
};
struct RegionFigure {
  static constexpr std::string_view header =
      "p1,p2,lambda1,lambda2_analytic,lambda2_simulated,bracket_halfwidth";
  std::vector<RegionRow> rows;
  std::string csv() const;
};
RegionFigure run_region_figure(const SweepSpec& spec);

// Closed-form region areas per (p1, p2) pair; no simulation.
struct AreaRow {
  double p1 = 0.0;
  double p2 = 0.0;
  double area_hd = 0.0;
  double area_fd = 0.0;
};
struct AreaFigure {
  static constexpr std::string_view header = "p1,p2,area_hd,area_fd";
  std::vector<AreaRow> rows;
  std::string csv() const;
};
AreaFigure run_area_figure(const SweepSpec& spec);

// Symmetric-load delay: p_pairs must satisfy p1 == p2; lambda_grid holds
// per-node arrival rates. d_analytic is numeric for strictly stable points,
// "unstable" at or beyond the boundary, "undefined" at lambda = 0.
// Simulated delays average Little's-law estimates across seeds (half
// duplex with standard error, full duplex mean only).
enum class DelayMark { ok, unstable, undefined };
struct DelayRow {
  double p = 0.0;
  double lambda_per_node = 0.0;
  DelayMark mark = DelayMark::ok;
  double d_analytic = 0.0;  // meaningful only when mark == ok
  std::optional<double> d_sim_hd;
  std::optional<double> d_sim_hd_stderr;
  std::optional<double> d_sim_fd;
};
struct DelayFigure {
  static constexpr std::string_view header =
      "p,lambda_per_node,d_analytic,d_sim_hd,d_sim_hd_stderr,d_sim_fd";
  std::vector<DelayRow> rows;
  std::string csv() const;
};
DelayFigure run_delay_figure(const SweepSpec& spec);

// One theorem-identity check plus one truncated-chain cross-validation per
// parameter set. identity_tol is fixed at 1e-12; the truncation per case
// comes from chain::suggest_truncation.
struct VerificationCase {
  NetworkParams params;
  chain::TheoremReport identity;
  int truncation = 0;
  double tv_distance = 0.0;
  bool pass = false;
};
struct VerificationReport {
  std::vector<VerificationCase> cases;
  int window = 0;
  double identity_tol = 1e-12;
  double tv_tol = 1e-6;
  bool pass = false;
  std::string to_json() const;
};
VerificationReport run_verification_suite(std::span<const NetworkParams> params_list,
                                          int window, double trunc_tol = 1e-6,
                                          const chain::VerifyOptions& options = {});

// Reproducible rejection sampler over the interior of the half-duplex
// stability region; draws with max(rho1, rho2) above max_rho are rejected
// so the truncation rule stays well inside its cap.
std::vector<NetworkParams> sample_stable_params(std::size_t count, std::uint64_t seed,
                                                double max_rho = 0.85);

}  // namespace aloha2::experiments

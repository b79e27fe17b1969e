#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aloha2/errors.hpp"
#include "aloha2/movement.hpp"
#include "aloha2/params.hpp"

namespace aloha2::analytic {

// Per-queue load rho_i = lambda_i / (p_i (1 - lambda)). The denominator is
// the service opportunity rate: a backlogged node only transmits in
// arrival-free slots (an arriving node may not transmit, and arrivals are
// mutually exclusive across the network).
struct Utilization {
  double rho1 = 0.0;
  double rho2 = 0.0;

  double rho(int node) const { return node == 1 ? rho1 : rho2; }
};

// Throws std::domain_error when lambda1 + lambda2 = 1 (no arrival-free
// slots, loads diverge).
Utilization utilization(const NetworkParams& params);

struct StabilityResult {
  bool stable = false;
  Utilization rho;          // +inf components when lambda_total = 1
  std::string diagnostic;   // names the violated condition; empty when stable

  explicit operator bool() const noexcept { return stable; }
};

// Never throws: instability is a result, not an error.
StabilityResult check_stability(const NetworkParams& params) noexcept;
bool is_stable(const NetworkParams& params) noexcept;

// c = (1 - rho1)(1 - rho2). Throws UnstableError outside the stability
// region.
double normalization_constant(const NetworkParams& params);

// pi(n1, n2) = (1-rho1) rho1^n1 (1-rho2) rho2^n2, the product of the two
// geometric marginals. Throws UnstableError outside the region.
double joint_pmf(const NetworkParams& params, NetworkState state);
double marginal_pmf(const NetworkParams& params, int node, std::int64_t n);

struct DelayResult {
  // Mean slots from arrival to departure; empty when the node has no
  // traffic (lambda_i = 0).
  std::optional<double> delay1;
  std::optional<double> delay2;
  // Mean queue length at slot boundaries.
  double mean_queue1 = 0.0;
  double mean_queue2 = 0.0;
};

// Little's law on the geometric marginals: D_i = rho_i / (lambda_i (1 - rho_i)).
// Throws UnstableError outside the region.
DelayResult average_delay(const NetworkParams& params);

struct Point {
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

enum class RegionKind { half_duplex, full_duplex };

// Stability region in the (lambda1, lambda2) plane, counterclockwise from
// the origin. Convex by construction.
struct RegionPolygon {
  RegionKind kind = RegionKind::half_duplex;
  std::vector<Point> vertices;
};

// Half-duplex region: (0,0), (p1/(1+p1), 0), (p1/S, p2/S), (0, p2/(1+p2))
// with S = 1 + p1 + p2. Accepts p in (0, 1]; p = 1 kept for area studies.
RegionPolygon hd_region_vertices(double p1, double p2);

// Full-duplex counterpart: (0,0), (p1, 0), (p1(1-p2), p2(1-p1)), (0, p2).
// Degenerates at p = 1 (inner vertex collapses onto an axis).
RegionPolygon fd_region_vertices(double p1, double p2);

// Largest lambda2 keeping (lambda1, lambda2) inside the half-duplex region:
// min(p2 (1-lambda1) / (1+p2), (p1 - lambda1 (1+p1)) / p1), clamped at 0.
// Throws std::domain_error when lambda1 is not in [0, 1].
double hd_boundary_lambda2(double p1, double p2, double lambda1);

// Closed-form areas of the two regions.
double hd_region_area(double p1, double p2);
double fd_region_area(double p1, double p2);

// Shoelace area of a simple polygon; polygons with fewer than 3 vertices
// have area 0. Independent cross-check of the closed forms.
double polygon_area(const RegionPolygon& polygon);

// Strict interior test (convex polygon, counterclockwise vertices).
bool contains(const RegionPolygon& polygon, Point point);

}  // namespace aloha2::analytic

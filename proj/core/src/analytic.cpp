#include "aloha2/analytic.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "aloha2/text.hpp"

namespace aloha2::analytic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_p_range(double p1, double p2) {
  if (!(p1 > 0 && p1 <= 1) || !(p2 > 0 && p2 <= 1)) {
    throw std::domain_error("p not in (0, 1]");
  }
}

}  // namespace

Utilization utilization(const NetworkParams& params) {
  const double lambda = params.lambda_total();
  if (lambda >= 1) {
    throw std::domain_error("lambda1 + lambda2 = 1: no arrival-free slots");
  }
  return Utilization{params.lambda1() / (params.p1() * (1 - lambda)),
                     params.lambda2() / (params.p2() * (1 - lambda))};
}

StabilityResult check_stability(const NetworkParams& params) noexcept {
  StabilityResult result;
  if (params.lambda_total() >= 1) {
    result.stable = false;
    result.rho = Utilization{params.lambda1() > 0 ? kInf : 0.0,
                             params.lambda2() > 0 ? kInf : 0.0};
    result.diagnostic = "lambda1 + lambda2 = 1: no arrival-free slots";
    return result;
  }
  result.rho = utilization(params);
  if (result.rho.rho1 >= 1) {
    result.diagnostic = "rho1 = " + format_double(result.rho.rho1) + " >= 1";
  } else if (result.rho.rho2 >= 1) {
    result.diagnostic = "rho2 = " + format_double(result.rho.rho2) + " >= 1";
  } else {
    result.stable = true;
  }
  return result;
}

bool is_stable(const NetworkParams& params) noexcept {
  return check_stability(params).stable;
}

namespace {

Utilization stable_utilization_or_throw(const NetworkParams& params) {
  const StabilityResult s = check_stability(params);
  if (!s.stable) {
    throw UnstableError("unstable: " + s.diagnostic);
  }
  return s.rho;
}

}  // namespace

double normalization_constant(const NetworkParams& params) {
  const Utilization u = stable_utilization_or_throw(params);
  return (1 - u.rho1) * (1 - u.rho2);
}

double marginal_pmf(const NetworkParams& params, int node, std::int64_t n) {
  if (node != 1 && node != 2) throw std::domain_error("node must be 1 or 2");
  if (n < 0) throw std::domain_error("queue length < 0");
  const Utilization u = stable_utilization_or_throw(params);
  const double rho = u.rho(node);
  return (1 - rho) * std::pow(rho, static_cast<double>(n));
}

double joint_pmf(const NetworkParams& params, NetworkState state) {
  return marginal_pmf(params, 1, state.n1) * marginal_pmf(params, 2, state.n2);
}

DelayResult average_delay(const NetworkParams& params) {
  const Utilization u = stable_utilization_or_throw(params);
  DelayResult result;
  result.mean_queue1 = u.rho1 / (1 - u.rho1);
  result.mean_queue2 = u.rho2 / (1 - u.rho2);
  if (params.lambda1() > 0) {
    result.delay1 = u.rho1 / (params.lambda1() * (1 - u.rho1));
  }
  if (params.lambda2() > 0) {
    result.delay2 = u.rho2 / (params.lambda2() * (1 - u.rho2));
  }
  return result;
}

RegionPolygon hd_region_vertices(double p1, double p2) {
  check_p_range(p1, p2);
  const double s = 1 + p1 + p2;
  return RegionPolygon{RegionKind::half_duplex,
                       {Point{0, 0},
                        Point{p1 / (1 + p1), 0},
                        Point{p1 / s, p2 / s},
                        Point{0, p2 / (1 + p2)}}};
}

RegionPolygon fd_region_vertices(double p1, double p2) {
  check_p_range(p1, p2);
  return RegionPolygon{RegionKind::full_duplex,
                       {Point{0, 0},
                        Point{p1, 0},
                        Point{p1 * (1 - p2), p2 * (1 - p1)},
                        Point{0, p2}}};
}

double hd_boundary_lambda2(double p1, double p2, double lambda1) {
  check_p_range(p1, p2);
  if (!(lambda1 >= 0 && lambda1 <= 1)) {
    throw std::domain_error("lambda1 not in [0, 1]");
  }
  const double node2_cap = p2 * (1 - lambda1) / (1 + p2);
  const double node1_cap = (p1 - lambda1 * (1 + p1)) / p1;
  const double bound = std::min(node2_cap, node1_cap);
  return bound > 0 ? bound : 0.0;
}

double hd_region_area(double p1, double p2) {
  check_p_range(p1, p2);
  return p1 * p2 * (2 + p1 + p2) /
         (2 * (1 + p1) * (1 + p2) * (1 + p1 + p2));
}

double fd_region_area(double p1, double p2) {
  check_p_range(p1, p2);
  return p1 * p2 * (2 - p1 - p2) / 2;
}

double polygon_area(const RegionPolygon& polygon) {
  const auto& v = polygon.vertices;
  if (v.size() < 3) return 0.0;
  double twice_area = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % v.size()];
    twice_area += a.lambda1 * b.lambda2 - b.lambda1 * a.lambda2;
  }
  return std::abs(twice_area) / 2;
}

bool contains(const RegionPolygon& polygon, Point point) {
  const auto& v = polygon.vertices;
  if (v.size() < 3) return false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % v.size()];
    const double cross = (b.lambda1 - a.lambda1) * (point.lambda2 - a.lambda2) -
                         (b.lambda2 - a.lambda2) * (point.lambda1 - a.lambda1);
    if (cross <= 0) return false;
  }
  return true;
}

}  // namespace aloha2::analytic

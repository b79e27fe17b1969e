#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aloha2/movement.hpp"
#include "aloha2/params.hpp"

namespace aloha2::sim {

enum class Mode {
  // A node never transmits in a slot in which it receives; the two arrival
  // streams are mutually exclusive (one uniform draw per slot).
  half_duplex,
  // Departures resolved first, then independent Bernoulli arrivals at both
  // nodes; receiving does not block transmission.
  full_duplex,
};

struct SimConfig {
  NetworkParams params;
  std::uint64_t slots = 200000;
  std::uint64_t seed = 1;
  std::uint64_t warmup = 0;  // slots excluded from measured statistics
  Mode mode = Mode::half_duplex;
};

// Counters over one run. Totals cover every slot; the measured_* fields and
// the qsum/sojourn accumulators cover only slots at or after warmup.
// Queue lengths are sampled at slot boundaries, before the slot's events.
struct SimStats {
  std::array<std::uint64_t, 2> arrivals{};
  std::array<std::uint64_t, 2> departures{};
  std::uint64_t collisions = 0;
  std::array<double, 2> qsum{};
  std::array<double, 2> sojourn_sum{};  // departure slot minus arrival slot
  std::array<std::uint64_t, 2> measured_arrivals{};
  std::array<std::uint64_t, 2> measured_departures{};
  std::uint64_t measured_slots = 0;
  NetworkState final_state;

  friend bool operator==(const SimStats&, const SimStats&) = default;
};

std::string to_json(const SimStats& stats);
std::string csv_header();
std::string to_csv_row(const SimStats& stats);

// Per-slot trace for instrumented runs.
struct SlotEvent {
  std::uint64_t slot = 0;
  bool arrival1 = false;
  bool arrival2 = false;
  bool attempt1 = false;
  bool attempt2 = false;
  int departed_node = 0;  // 0 = none
  bool collision = false;
};
using SlotObserver = std::function<void(const SlotEvent&)>;

// Deterministic across platforms for a fixed config: the stream comes from
// std::mt19937_64 (sequence pinned by the standard) scaled to [0,1) by an
// explicit 53-bit mantissa shift; no library distributions are used.
SimStats simulate(const SimConfig& config);
SimStats simulate(const SimConfig& config, const SlotObserver& observer);

struct DelayEstimate {
  // Little's law: time-averaged queue over the measured empirical arrival
  // rate. Empty when the node saw no measured arrivals.
  std::optional<double> littles1;
  std::optional<double> littles2;
  // Mean sojourn of packets departing inside the measured window.
  std::optional<double> sojourn1;
  std::optional<double> sojourn2;
};

// Throws std::domain_error when the run has no measured slots.
DelayEstimate empirical_delay(const SimStats& stats, const SimConfig& config);

// (arrivals1 + arrivals2) / (departures1 + departures2); +inf when packets
// arrived but none departed, and 1 for an empty run. Values above 1 signal
// a growing backlog.
double stability_ratio(const SimStats& stats);

struct DetectorConfig {
  std::uint64_t slots = 200000;
  double threshold = 1.02;   // ratio above this classifies as unstable
  double resolution = 0.005; // target half-width of the final bracket
  std::uint64_t seed = 1;
};

struct BoundaryProbe {
  double lambda2 = 0.0;
  double ratio = 0.0;
  std::uint64_t slots = 0;
  bool unstable = false;
};

class DetectorError : public std::runtime_error {
 public:
  DetectorError(const std::string& what, std::vector<BoundaryProbe> probes)
      : std::runtime_error(what), probes_(std::move(probes)) {}
  const std::vector<BoundaryProbe>& probes() const noexcept { return probes_; }

 private:
  std::vector<BoundaryProbe> probes_;
};

struct BoundaryEstimate {
  double lambda2 = 0.0;
  double half_width = 0.0;
  std::vector<BoundaryProbe> probes;
};

// Bisects lambda2 between 0 and 1 - lambda1 with the ratio detector. A
// probe counts as unstable only when the ratio exceeds the threshold at
// both the configured horizon and a confirming 2x horizon. Throws
// std::domain_error when lambda1 reaches the region's lambda1-axis
// intercept p1/(1+p1), and DetectorError (with the probe history) when the
// initial bracket misclassifies.
BoundaryEstimate find_boundary_lambda2(double p1, double p2, double lambda1,
                                       const DetectorConfig& config = {});

// splitmix64 mix of (base, index); used to give sweep points and probes
// independent, reproducible seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

}  // namespace aloha2::sim

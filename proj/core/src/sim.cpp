#include "aloha2/sim.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include <json.hpp>

#include "aloha2/text.hpp"

namespace aloha2::sim {

namespace {

class SlotRng {
 public:
  explicit SlotRng(std::uint64_t seed) : engine_(seed) {}

  // 53 random mantissa bits, uniform on [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

SimStats run(const SimConfig& config, const SlotObserver* observer) {
  if (config.warmup >= config.slots && config.slots > 0) {
    throw std::domain_error("warmup must be smaller than the horizon");
  }
  const double l1 = config.params.lambda1();
  const double l2 = config.params.lambda2();
  const double p1 = config.params.p1();
  const double p2 = config.params.p2();

  SlotRng rng(config.seed);
  std::deque<std::uint64_t> queue1;
  std::deque<std::uint64_t> queue2;
  SimStats stats;

  for (std::uint64_t k = 0; k < config.slots; ++k) {
    const bool measured = k >= config.warmup;
    if (measured) {
      stats.qsum[0] += static_cast<double>(queue1.size());
      stats.qsum[1] += static_cast<double>(queue2.size());
      ++stats.measured_slots;
    }

    bool arrival1 = false;
    bool arrival2 = false;
    bool attempt1 = false;
    bool attempt2 = false;

    if (config.mode == Mode::half_duplex) {
      const double u = rng.uniform();
      arrival1 = u < l1;
      arrival2 = !arrival1 && u < l1 + l2;
      attempt1 = !arrival1 && !queue1.empty() && rng.uniform() < p1;
      attempt2 = !arrival2 && !queue2.empty() && rng.uniform() < p2;
    } else {
      attempt1 = !queue1.empty() && rng.uniform() < p1;
      attempt2 = !queue2.empty() && rng.uniform() < p2;
    }

    int departed = 0;
    bool collision = false;
    if (attempt1 && attempt2) {
      collision = true;
      ++stats.collisions;
    } else if (attempt1) {
      departed = 1;
    } else if (attempt2) {
      departed = 2;
    }

    if (departed != 0) {
      std::deque<std::uint64_t>& queue = departed == 1 ? queue1 : queue2;
      const std::uint64_t arrived_at = queue.front();
      queue.pop_front();
      ++stats.departures[departed - 1];
      if (measured) {
        ++stats.measured_departures[departed - 1];
        stats.sojourn_sum[departed - 1] += static_cast<double>(k - arrived_at);
      }
    }

    if (config.mode == Mode::full_duplex) {
      arrival1 = rng.uniform() < l1;
      arrival2 = rng.uniform() < l2;
    }
    if (arrival1) {
      queue1.push_back(k);
      ++stats.arrivals[0];
      if (measured) ++stats.measured_arrivals[0];
    }
    if (arrival2) {
      queue2.push_back(k);
      ++stats.arrivals[1];
      if (measured) ++stats.measured_arrivals[1];
    }

    if (observer != nullptr && *observer) {
      (*observer)(SlotEvent{k, arrival1, arrival2, attempt1, attempt2,
                            departed, collision});
    }
  }

  stats.final_state = NetworkState{static_cast<std::int64_t>(queue1.size()),
                                   static_cast<std::int64_t>(queue2.size())};
  return stats;
}

}  // namespace

SimStats simulate(const SimConfig& config) { return run(config, nullptr); }

SimStats simulate(const SimConfig& config, const SlotObserver& observer) {
  return run(config, &observer);
}

std::string to_json(const SimStats& stats) {
  nlohmann::ordered_json j;
  j["arrivals"] = stats.arrivals;
  j["departures"] = stats.departures;
  j["collisions"] = stats.collisions;
  j["qsum"] = stats.qsum;
  j["sojourn_sum"] = stats.sojourn_sum;
  j["measured_arrivals"] = stats.measured_arrivals;
  j["measured_departures"] = stats.measured_departures;
  j["measured_slots"] = stats.measured_slots;
  j["final_state"] = {{"n1", stats.final_state.n1}, {"n2", stats.final_state.n2}};
  return j.dump();
}

std::string csv_header() {
  return "arrivals1,arrivals2,departures1,departures2,collisions,"
         "qsum1,qsum2,sojourn_sum1,sojourn_sum2,"
         "measured_arrivals1,measured_arrivals2,"
         "measured_departures1,measured_departures2,measured_slots,"
         "final_n1,final_n2";
}

std::string to_csv_row(const SimStats& s) {
  std::string row;
  row += std::to_string(s.arrivals[0]) + ',' + std::to_string(s.arrivals[1]) + ',';
  row += std::to_string(s.departures[0]) + ',' + std::to_string(s.departures[1]) + ',';
  row += std::to_string(s.collisions) + ',';
  row += format_double(s.qsum[0]) + ',' + format_double(s.qsum[1]) + ',';
  row += format_double(s.sojourn_sum[0]) + ',' + format_double(s.sojourn_sum[1]) + ',';
  row += std::to_string(s.measured_arrivals[0]) + ',' + std::to_string(s.measured_arrivals[1]) + ',';
  row += std::to_string(s.measured_departures[0]) + ',' + std::to_string(s.measured_departures[1]) + ',';
  row += std::to_string(s.measured_slots) + ',';
  row += std::to_string(s.final_state.n1) + ',' + std::to_string(s.final_state.n2);
  return row;
}

DelayEstimate empirical_delay(const SimStats& stats, const SimConfig& config) {
  if (stats.measured_slots == 0 || config.slots <= config.warmup) {
    throw std::domain_error("no measured slots");
  }
  DelayEstimate estimate;
  if (stats.measured_arrivals[0] > 0) {
    estimate.littles1 = stats.qsum[0] / static_cast<double>(stats.measured_arrivals[0]);
  }
  if (stats.measured_arrivals[1] > 0) {
    estimate.littles2 = stats.qsum[1] / static_cast<double>(stats.measured_arrivals[1]);
  }
  if (stats.measured_departures[0] > 0) {
    estimate.sojourn1 = stats.sojourn_sum[0] / static_cast<double>(stats.measured_departures[0]);
  }
  if (stats.measured_departures[1] > 0) {
    estimate.sojourn2 = stats.sojourn_sum[1] / static_cast<double>(stats.measured_departures[1]);
  }
  return estimate;
}

double stability_ratio(const SimStats& stats) {
  const std::uint64_t arrivals = stats.arrivals[0] + stats.arrivals[1];
  const std::uint64_t departures = stats.departures[0] + stats.departures[1];
  if (departures == 0) {
    return arrivals == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(arrivals) / static_cast<double>(departures);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

BoundaryEstimate find_boundary_lambda2(double p1, double p2, double lambda1,
                                       const DetectorConfig& config) {
  if (!(p1 > 0 && p1 < 1) || !(p2 > 0 && p2 < 1)) {
    throw std::domain_error("p not in (0, 1)");
  }
  if (!(lambda1 >= 0)) throw std::domain_error("lambda1 < 0");
  const double intercept = p1 / (1 + p1);
  if (lambda1 >= intercept) {
    throw std::domain_error(
        "lambda1 at or above the stability-region axis intercept p1/(1+p1)");
  }
  if (!(config.resolution > 0) || !(config.threshold > 1) || config.slots == 0) {
    throw std::domain_error("invalid detector configuration");
  }

  std::vector<BoundaryProbe> probes;
  std::uint64_t counter = 0;

  const auto classify = [&](double lambda2, std::uint64_t slots) {
    const SimConfig run_config{NetworkParams(lambda1, lambda2, p1, p2), slots,
                               derive_seed(config.seed, counter++), 0,
                               Mode::half_duplex};
    const double ratio = stability_ratio(simulate(run_config));
    probes.push_back(BoundaryProbe{lambda2, ratio, slots, ratio > config.threshold});
    return probes.back().unstable;
  };
  // unstable only when the 2x-horizon rerun agrees
  const auto confirmed_unstable = [&](double lambda2) {
    return classify(lambda2, config.slots) && classify(lambda2, 2 * config.slots);
  };

  double lo = 0.0;
  double hi = 1.0 - lambda1;
  if (confirmed_unstable(lo)) {
    throw DetectorError("detector classifies lambda2 = 0 as unstable", probes);
  }
  if (!confirmed_unstable(hi)) {
    throw DetectorError("detector classifies lambda2 = 1 - lambda1 as stable",
                        probes);
  }
  while (hi - lo > 2 * config.resolution) {
    const double mid = (lo + hi) / 2;
    if (confirmed_unstable(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return BoundaryEstimate{(lo + hi) / 2, (hi - lo) / 2, std::move(probes)};
}

}  // namespace aloha2::sim

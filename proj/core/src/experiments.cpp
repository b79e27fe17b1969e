#include "aloha2/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "aloha2/analytic.hpp"
#include "aloha2/sim.hpp"
#include "aloha2/text.hpp"

namespace aloha2::experiments {

namespace {

constexpr std::string_view kVersion = "0.1.0";

std::string cell(std::optional<double> v) {
  return v ? format_double(*v) : "nan";
}

// Runs fn(0..count-1) on a small worker pool; results land in index order.
// The first exception a worker raises is rethrown on the calling thread.
template <typename Fn>
void for_each_index(std::size_t count, Fn&& fn) {
  if (count == 0) return;
  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hardware, count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          fn(i);
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void write_output(const SweepSpec& spec, std::string_view kind,
                  const std::string& csv, std::string_view header) {
  if (spec.output_path.empty()) return;
  {
    std::ofstream out(spec.output_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + spec.output_path);
    out << csv;
  }
  nlohmann::ordered_json manifest;
  manifest["kind"] = kind;
  manifest["generator"] = std::string("aloha2 ") + std::string(kVersion);
  manifest["columns"] = header;
  manifest["spec"] = nlohmann::ordered_json::parse(spec_to_json(spec));
  const std::string manifest_path = spec.output_path + ".manifest.json";
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + manifest_path);
  out << manifest.dump(2) << '\n';
}

std::uint64_t effective_warmup(const SweepSpec& spec) {
  return spec.warmup.value_or(spec.sim_slots / 10);
}

}  // namespace

void validate_spec(const SweepSpec& spec) {
  if (spec.p_pairs.empty()) throw std::domain_error("p_pairs is empty");
  for (const auto& [p1, p2] : spec.p_pairs) {
    if (!(p1 > 0 && p1 <= 1 && p2 > 0 && p2 <= 1)) {
      throw std::domain_error("p not in (0, 1]");
    }
  }
  double previous = -1.0;
  for (const double lambda : spec.lambda_grid) {
    if (!std::isfinite(lambda) || lambda < 0 || lambda > 1) {
      throw std::domain_error("lambda grid value not in [0, 1]");
    }
    if (lambda < previous) throw std::domain_error("lambda grid not sorted");
    previous = lambda;
  }
  if (spec.seeds.empty()) throw std::domain_error("seeds is empty");
  if (spec.sim_slots == 0) throw std::domain_error("sim_slots is 0");
  if (effective_warmup(spec) >= spec.sim_slots) {
    throw std::domain_error("warmup must be smaller than sim_slots");
  }
  if (!(spec.detector_threshold > 1)) {
    throw std::domain_error("detector_threshold must exceed 1");
  }
  if (!(spec.detector_resolution > 0)) {
    throw std::domain_error("detector_resolution must be positive");
  }
}

std::string spec_to_json(const SweepSpec& spec) {
  nlohmann::ordered_json j;
  j["p_pairs"] = spec.p_pairs;
  j["lambda_grid"] = spec.lambda_grid;
  j["sim_slots"] = spec.sim_slots;
  if (spec.warmup) {
    j["warmup"] = *spec.warmup;
  } else {
    j["warmup"] = nullptr;
  }
  j["seeds"] = spec.seeds;
  j["output_path"] = spec.output_path;
  j["detector_threshold"] = spec.detector_threshold;
  j["detector_resolution"] = spec.detector_resolution;
  return j.dump();
}

SweepSpec spec_from_json(std::string_view json_text) {
  const auto j = nlohmann::json::parse(json_text);
  SweepSpec spec;
  if (j.contains("p_pairs")) {
    spec.p_pairs = j.at("p_pairs").get<std::vector<std::pair<double, double>>>();
  }
  if (j.contains("lambda_grid")) {
    spec.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
  }
  if (j.contains("sim_slots")) spec.sim_slots = j.at("sim_slots").get<std::uint64_t>();
  if (j.contains("warmup") && !j.at("warmup").is_null()) {
    spec.warmup = j.at("warmup").get<std::uint64_t>();
  }
  if (j.contains("seeds")) spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("output_path")) spec.output_path = j.at("output_path").get<std::string>();
  if (j.contains("detector_threshold")) {
    spec.detector_threshold = j.at("detector_threshold").get<double>();
  }
  if (j.contains("detector_resolution")) {
    spec.detector_resolution = j.at("detector_resolution").get<double>();
  }
  return spec;
}

std::string RegionFigure::csv() const {
  std::string out{header};
  out += '\n';
  for (const RegionRow& row : rows) {
    out += format_double(row.p1) + ',' + format_double(row.p2) + ',';
    out += format_double(row.lambda1) + ',';
    out += format_double(row.lambda2_analytic) + ',';
    out += cell(row.lambda2_simulated) + ',' + cell(row.bracket_halfwidth) + '\n';
  }
  return out;
}

RegionFigure run_region_figure(const SweepSpec& spec) {
  validate_spec(spec);
  for (const auto& [p1, p2] : spec.p_pairs) {
    if (p1 >= 1 || p2 >= 1) {
      throw std::domain_error("region sweep simulates: p must be inside (0, 1)");
    }
  }
  RegionFigure figure;
  figure.rows.resize(spec.p_pairs.size() * spec.lambda_grid.size());
  const std::uint64_t seed0 = spec.seeds.front();

  for_each_index(figure.rows.size(), [&](std::size_t i) {
    const auto& [p1, p2] = spec.p_pairs[i / spec.lambda_grid.size()];
    const double lambda1 = spec.lambda_grid[i % spec.lambda_grid.size()];
    RegionRow row;
    row.p1 = p1;
    row.p2 = p2;
    row.lambda1 = lambda1;
    row.lambda2_analytic = analytic::hd_boundary_lambda2(p1, p2, lambda1);
    if (lambda1 < p1 / (1 + p1)) {
      sim::DetectorConfig detector;
      detector.slots = spec.sim_slots;
      detector.threshold = spec.detector_threshold;
      detector.resolution = spec.detector_resolution;
      detector.seed = sim::derive_seed(seed0, i);
      try {
        const sim::BoundaryEstimate estimate =
            sim::find_boundary_lambda2(p1, p2, lambda1, detector);
        row.lambda2_simulated = estimate.lambda2;
        row.bracket_halfwidth = estimate.half_width;
      } catch (const sim::DetectorError&) {
        // leave the simulated cells empty; the analytic column stands
      }
    }
    figure.rows[i] = row;
  });

  write_output(spec, "region", figure.csv(), RegionFigure::header);
  return figure;
}

std::string AreaFigure::csv() const {
  std::string out{header};
  out += '\n';
  for (const AreaRow& row : rows) {
    out += format_double(row.p1) + ',' + format_double(row.p2) + ',';
    out += format_double(row.area_hd) + ',' + format_double(row.area_fd) + '\n';
  }
  return out;
}

AreaFigure run_area_figure(const SweepSpec& spec) {
  validate_spec(spec);
  AreaFigure figure;
  figure.rows.reserve(spec.p_pairs.size());
  for (const auto& [p1, p2] : spec.p_pairs) {
    figure.rows.push_back(AreaRow{p1, p2, analytic::hd_region_area(p1, p2),
                                  analytic::fd_region_area(p1, p2)});
  }
  write_output(spec, "area", figure.csv(), AreaFigure::header);
  return figure;
}

std::string DelayFigure::csv() const {
  std::string out{header};
  out += '\n';
  for (const DelayRow& row : rows) {
    out += format_double(row.p) + ',' + format_double(row.lambda_per_node) + ',';
    switch (row.mark) {
      case DelayMark::ok:
        out += format_double(row.d_analytic);
        break;
      case DelayMark::unstable:
        out += "unstable";
        break;
      case DelayMark::undefined:
        out += "undefined";
        break;
    }
    out += ',' + cell(row.d_sim_hd) + ',' + cell(row.d_sim_hd_stderr) + ',' +
           cell(row.d_sim_fd) + '\n';
  }
  return out;
}

namespace {

// Symmetric two-node run: Little's-law estimate averaged over both nodes.
std::optional<double> littles_both_nodes(const sim::SimConfig& config) {
  const sim::DelayEstimate estimate =
      sim::empirical_delay(sim::simulate(config), config);
  double sum = 0.0;
  int nodes = 0;
  if (estimate.littles1) {
    sum += *estimate.littles1;
    ++nodes;
  }
  if (estimate.littles2) {
    sum += *estimate.littles2;
    ++nodes;
  }
  if (nodes == 0) return std::nullopt;
  return sum / nodes;
}

struct SeedAverage {
  std::optional<double> mean;
  std::optional<double> stderr_of_mean;
};

SeedAverage average_over_seeds(const std::vector<std::optional<double>>& values) {
  std::vector<double> present;
  for (const auto& v : values) {
    if (v) present.push_back(*v);
  }
  if (present.empty()) return {};
  double mean = 0.0;
  for (const double v : present) mean += v;
  mean /= static_cast<double>(present.size());
  SeedAverage out;
  out.mean = mean;
  if (present.size() >= 2) {
    double ss = 0.0;
    for (const double v : present) ss += (v - mean) * (v - mean);
    const double variance = ss / static_cast<double>(present.size() - 1);
    out.stderr_of_mean = std::sqrt(variance / static_cast<double>(present.size()));
  }
  return out;
}

}  // namespace

DelayFigure run_delay_figure(const SweepSpec& spec) {
  validate_spec(spec);
  for (const auto& [p1, p2] : spec.p_pairs) {
    if (p1 != p2) throw std::domain_error("delay sweep needs symmetric p pairs");
    if (p1 >= 1) throw std::domain_error("delay sweep simulates: p must be inside (0, 1)");
  }
  const std::uint64_t warmup = effective_warmup(spec);

  DelayFigure figure;
  figure.rows.resize(spec.p_pairs.size() * spec.lambda_grid.size());

  for_each_index(figure.rows.size(), [&](std::size_t i) {
    const double p = spec.p_pairs[i / spec.lambda_grid.size()].first;
    const double lambda = spec.lambda_grid[i % spec.lambda_grid.size()];
    DelayRow row;
    row.p = p;
    row.lambda_per_node = lambda;

    if (lambda == 0) {
      row.mark = DelayMark::undefined;
      figure.rows[i] = row;
      return;
    }
    if (2 * lambda > 1) {
      row.mark = DelayMark::unstable;
      figure.rows[i] = row;
      return;
    }
    const NetworkParams params(lambda, lambda, p, p);
    if (!analytic::is_stable(params)) {
      row.mark = DelayMark::unstable;
      figure.rows[i] = row;
      return;
    }
    row.d_analytic = *analytic::average_delay(params).delay1;

    std::vector<std::optional<double>> hd(spec.seeds.size());
    std::vector<std::optional<double>> fd(spec.seeds.size());
    for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
      sim::SimConfig config{params, spec.sim_slots,
                            sim::derive_seed(spec.seeds[s], i), warmup,
                            sim::Mode::half_duplex};
      hd[s] = littles_both_nodes(config);
      config.mode = sim::Mode::full_duplex;
      config.seed = sim::derive_seed(spec.seeds[s], i + 0x766400000000ull);
      fd[s] = littles_both_nodes(config);
    }
    const SeedAverage hd_avg = average_over_seeds(hd);
    row.d_sim_hd = hd_avg.mean;
    row.d_sim_hd_stderr = hd_avg.stderr_of_mean;
    row.d_sim_fd = average_over_seeds(fd).mean;
    figure.rows[i] = row;
  });

  write_output(spec, "delay", figure.csv(), DelayFigure::header);
  return figure;
}

VerificationReport run_verification_suite(std::span<const NetworkParams> params_list,
                                          int window, double trunc_tol,
                                          const chain::VerifyOptions& options) {
  if (params_list.empty()) throw std::domain_error("no parameter sets");
  if (!(trunc_tol > 0)) throw std::domain_error("trunc_tol must be positive");
  VerificationReport report;
  report.window = window;
  report.tv_tol = trunc_tol;
  report.pass = true;
  report.cases.reserve(params_list.size());
  for (const NetworkParams& params : params_list) {
    VerificationCase c{params, chain::verify_theorem_identity(params, window, options),
                       0, 0.0, false};
    c.truncation = chain::suggest_truncation(params);
    c.tv_distance = chain::compare_to_product_form(params, c.truncation);
    c.pass = c.identity.max_abs_error <= report.identity_tol &&
             c.identity.nu_consistent && c.tv_distance <= trunc_tol;
    report.pass = report.pass && c.pass;
    report.cases.push_back(std::move(c));
  }
  return report;
}

std::string VerificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["window"] = window;
  j["identity_tol"] = identity_tol;
  j["tv_tol"] = tv_tol;
  j["pass"] = pass;
  j["cases"] = nlohmann::ordered_json::array();
  for (const VerificationCase& c : cases) {
    nlohmann::ordered_json jc;
    jc["params"] = {{"lambda1", c.params.lambda1()},
                    {"lambda2", c.params.lambda2()},
                    {"p1", c.params.p1()},
                    {"p2", c.params.p2()}};
    jc["window"] = c.identity.window;
    jc["max_abs_error"] = c.identity.max_abs_error;
    jc["worst_pair"] = {{"state", {c.identity.worst_state.n1, c.identity.worst_state.n2}},
                        {"movement", std::string(c.identity.worst_movement.name())}};
    jc["nu_consistency_ok"] = c.identity.nu_consistent;
    jc["truncation"] = c.truncation;
    jc["tv_distance"] = c.tv_distance;
    jc["pass"] = c.pass;
    j["cases"].push_back(std::move(jc));
  }
  return j.dump(2);
}

std::vector<NetworkParams> sample_stable_params(std::size_t count, std::uint64_t seed,
                                                double max_rho) {
  if (!(max_rho > 0 && max_rho < 1)) {
    throw std::domain_error("max_rho not in (0, 1)");
  }
  std::mt19937_64 engine(seed);
  const auto uniform = [&engine] {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
  };
  std::vector<NetworkParams> out;
  out.reserve(count);
  while (out.size() < count) {
    const double p1 = 0.1 + 0.85 * uniform();
    const double p2 = 0.1 + 0.85 * uniform();
    const double lambda1 = uniform() * 0.98 * p1 / (1 + p1);
    const double cap = analytic::hd_boundary_lambda2(p1, p2, lambda1);
    const double lambda2 = uniform() * 0.98 * cap;
    const NetworkParams params(lambda1, lambda2, p1, p2);
    const analytic::StabilityResult stability = analytic::check_stability(params);
    if (!stability.stable) continue;
    if (std::max(stability.rho.rho1, stability.rho.rho2) > max_rho) continue;
    out.push_back(params);
  }
  return out;
}

}  // namespace aloha2::experiments

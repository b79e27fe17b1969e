// Command-line front end for the two-node random-access queueing toolkit:
// closed-form analysis, kernel verification, slot-level simulation and the
// figure sweeps, sharing one deterministic RNG convention.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aloha2/analytic.hpp"
#include "aloha2/chain.hpp"
#include "aloha2/errors.hpp"
#include "aloha2/experiments.hpp"
#include "aloha2/params.hpp"
#include "aloha2/sim.hpp"
#include "aloha2/text.hpp"

namespace {

using namespace aloha2;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUnstable = 2;
constexpr int kExitVerifyFailed = 3;

struct ParamArgs {
  std::string lambda1;
  std::string lambda2;
  std::string p1;
  std::string p2;
};

// All rate options take decimals or fractions ("2/3").
void add_param_options(CLI::App* cmd, ParamArgs& args) {
  cmd->add_option("--lambda1", args.lambda1, "arrival rate at node 1")->required();
  cmd->add_option("--lambda2", args.lambda2, "arrival rate at node 2")->required();
  cmd->add_option("--p1", args.p1, "transmission probability of node 1")->required();
  cmd->add_option("--p2", args.p2, "transmission probability of node 2")->required();
}

NetworkParams to_params(const ParamArgs& args) {
  return NetworkParams(parse_real(args.lambda1), parse_real(args.lambda2),
                       parse_real(args.p1), parse_real(args.p2));
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) values.push_back(parse_real(token));
  return values;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) seeds.push_back(std::stoull(token));
  return seeds;
}

std::string yes_no(bool v) { return v ? "yes" : "no"; }

std::string optional_cell(std::optional<double> v) {
  return v ? format_double(*v) : "undefined";
}

int run_analyze(const ParamArgs& args, const std::string& format) {
  const NetworkParams params = to_params(args);
  const analytic::StabilityResult stability = analytic::check_stability(params);

  if (format == "json") {
    nlohmann::ordered_json j;
    j["lambda1"] = params.lambda1();
    j["lambda2"] = params.lambda2();
    j["p1"] = params.p1();
    j["p2"] = params.p2();
    j["rho1"] = stability.rho.rho1;
    j["rho2"] = stability.rho.rho2;
    j["stable"] = stability.stable;
    j["diagnostic"] = stability.diagnostic;
    if (stability.stable) {
      const analytic::DelayResult delay = analytic::average_delay(params);
      j["normalization"] = analytic::normalization_constant(params);
      j["mean_queue1"] = delay.mean_queue1;
      j["mean_queue2"] = delay.mean_queue2;
      j["delay1"] = delay.delay1 ? nlohmann::json(*delay.delay1) : nlohmann::json();
      j["delay2"] = delay.delay2 ? nlohmann::json(*delay.delay2) : nlohmann::json();
    }
    std::cout << j.dump() << '\n';
    return stability.stable ? kExitOk : kExitUnstable;
  }

  std::cout << "lambda1 = " << format_double(params.lambda1()) << '\n'
            << "lambda2 = " << format_double(params.lambda2()) << '\n'
            << "p1 = " << format_double(params.p1()) << '\n'
            << "p2 = " << format_double(params.p2()) << '\n'
            << "rho1 = " << format_double(stability.rho.rho1) << '\n'
            << "rho2 = " << format_double(stability.rho.rho2) << '\n'
            << "stable = " << yes_no(stability.stable) << '\n';
  if (!stability.stable) {
    std::cout << "diagnostic = " << stability.diagnostic << '\n';
    return kExitUnstable;
  }
  const analytic::DelayResult delay = analytic::average_delay(params);
  std::cout << "normalization = " << format_double(analytic::normalization_constant(params))
            << '\n'
            << "mean_queue1 = " << format_double(delay.mean_queue1) << '\n'
            << "mean_queue2 = " << format_double(delay.mean_queue2) << '\n'
            << "delay1 = " << optional_cell(delay.delay1) << '\n'
            << "delay2 = " << optional_cell(delay.delay2) << '\n';
  return kExitOk;
}

struct SimulateArgs {
  ParamArgs params;
  std::uint64_t slots = 200000;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> warmup;
  std::string mode = "hd";
  std::string format = "plain";
};

int run_simulate(const SimulateArgs& args) {
  sim::SimConfig config{to_params(args.params), args.slots, args.seed,
                        args.warmup.value_or(args.slots / 10),
                        args.mode == "fd" ? sim::Mode::full_duplex
                                          : sim::Mode::half_duplex};
  const sim::SimStats stats = sim::simulate(config);
  const double ratio = sim::stability_ratio(stats);
  const sim::DelayEstimate delay = sim::empirical_delay(stats, config);

  if (args.format == "csv") {
    std::cout << sim::csv_header() << '\n' << sim::to_csv_row(stats) << '\n';
    return kExitOk;
  }
  if (args.format == "json") {
    nlohmann::ordered_json j;
    j["config"] = {{"lambda1", config.params.lambda1()},
                   {"lambda2", config.params.lambda2()},
                   {"p1", config.params.p1()},
                   {"p2", config.params.p2()},
                   {"slots", config.slots},
                   {"seed", config.seed},
                   {"warmup", config.warmup},
                   {"mode", args.mode == "fd" ? "full_duplex" : "half_duplex"}};
    j["stats"] = nlohmann::ordered_json::parse(sim::to_json(stats));
    j["stability_ratio"] = ratio;
    j["delay1"] = delay.littles1 ? nlohmann::json(*delay.littles1) : nlohmann::json();
    j["delay2"] = delay.littles2 ? nlohmann::json(*delay.littles2) : nlohmann::json();
    std::cout << j.dump() << '\n';
    return kExitOk;
  }

  const double measured = static_cast<double>(stats.measured_slots);
  std::cout << "mode = " << (args.mode == "fd" ? "full_duplex" : "half_duplex") << '\n'
            << "slots = " << config.slots << '\n'
            << "warmup = " << config.warmup << '\n'
            << "seed = " << config.seed << '\n'
            << "arrivals1 = " << stats.arrivals[0] << '\n'
            << "arrivals2 = " << stats.arrivals[1] << '\n'
            << "departures1 = " << stats.departures[0] << '\n'
            << "departures2 = " << stats.departures[1] << '\n'
            << "collisions = " << stats.collisions << '\n'
            << "final_n1 = " << stats.final_state.n1 << '\n'
            << "final_n2 = " << stats.final_state.n2 << '\n'
            << "stability_ratio = " << format_double(ratio) << '\n'
            << "mean_queue1 = " << format_double(stats.qsum[0] / measured) << '\n'
            << "mean_queue2 = " << format_double(stats.qsum[1] / measured) << '\n'
            << "delay1 = " << optional_cell(delay.littles1) << '\n'
            << "delay2 = " << optional_cell(delay.littles2) << '\n';
  return kExitOk;
}

struct VerifyArgs {
  ParamArgs params;
  bool has_params = false;
  std::size_t random_count = 0;
  std::uint64_t seed = 1;
  int window = 20;
  double perturb_nu = 0.0;
  bool swap_p = false;
  std::string format = "plain";
};

int run_verify(const VerifyArgs& args) {
  std::vector<NetworkParams> params_list;
  if (args.has_params) params_list.push_back(to_params(args.params));
  if (args.random_count > 0) {
    const auto sampled = experiments::sample_stable_params(args.random_count, args.seed);
    params_list.insert(params_list.end(), sampled.begin(), sampled.end());
  }
  if (params_list.empty()) {
    throw std::domain_error("verify needs --lambda1/--lambda2/--p1/--p2 or --random");
  }

  chain::VerifyOptions options;
  options.nu_perturb = args.perturb_nu;
  options.swap_p_in_nu = args.swap_p;

  const experiments::VerificationReport report =
      experiments::run_verification_suite(params_list, args.window, 1e-6, options);

  if (args.format == "json") {
    std::cout << report.to_json() << '\n';
  } else {
    for (std::size_t i = 0; i < report.cases.size(); ++i) {
      const experiments::VerificationCase& c = report.cases[i];
      std::cout << "case " << (i + 1) << ": lambda = ("
                << format_double(c.params.lambda1()) << ", "
                << format_double(c.params.lambda2()) << "), p = ("
                << format_double(c.params.p1()) << ", "
                << format_double(c.params.p2()) << "): max_error = "
                << format_double(c.identity.max_abs_error) << ", nu = "
                << (c.identity.nu_consistent ? "consistent" : "inconsistent")
                << ", truncation = " << c.truncation << ", tv = "
                << format_double(c.tv_distance) << ": "
                << (c.pass ? "pass" : "FAIL") << '\n';
    }
    std::cout << "verification: " << (report.pass ? "PASS" : "FAIL") << " ("
              << report.cases.size() << " case"
              << (report.cases.size() == 1 ? "" : "s") << ", window "
              << report.window << ")\n";
  }
  return report.pass ? kExitOk : kExitVerifyFailed;
}

struct RegionArgs {
  std::string p1;
  std::string p2;
  std::string grid = "0,0.05,0.1,0.15,0.2,0.25,0.3";
  std::uint64_t slots = 200000;
  std::uint64_t seed = 1;
  double threshold = 1.02;
  double resolution = 0.005;
  std::string out;
};

int run_region(const RegionArgs& args) {
  experiments::SweepSpec spec;
  spec.p_pairs = {{parse_real(args.p1), parse_real(args.p2)}};
  spec.lambda_grid = parse_real_list(args.grid);
  spec.sim_slots = args.slots;
  spec.seeds = {args.seed};
  spec.detector_threshold = args.threshold;
  spec.detector_resolution = args.resolution;
  spec.output_path = args.out;
  std::cout << experiments::run_region_figure(spec).csv();
  return kExitOk;
}

struct AreaArgs {
  std::string p_list = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
  std::string out;
};

int run_area(const AreaArgs& args) {
  experiments::SweepSpec spec;
  for (const double p : parse_real_list(args.p_list)) {
    spec.p_pairs.emplace_back(p, p);
  }
  spec.lambda_grid = {};
  spec.output_path = args.out;
  std::cout << experiments::run_area_figure(spec).csv();
  return kExitOk;
}

struct DelayArgs {
  std::string p;
  std::string grid;
  std::uint64_t slots = 200000;
  std::optional<std::uint64_t> warmup;
  std::string seeds = "1,2,3,4,5";
  std::string out;
};

int run_delay(const DelayArgs& args) {
  experiments::SweepSpec spec;
  const double p = parse_real(args.p);
  spec.p_pairs = {{p, p}};
  if (args.grid.empty()) {
    // default: eleven per-node rates from 0 to 80% of the symmetric
    // capacity p/(1+2p)
    const double cap = p / (1 + 2 * p);
    for (int k = 0; k <= 10; ++k) {
      spec.lambda_grid.push_back(0.08 * k * cap);
    }
  } else {
    spec.lambda_grid = parse_real_list(args.grid);
  }
  spec.sim_slots = args.slots;
  spec.warmup = args.warmup;
  spec.seeds = parse_seed_list(args.seeds);
  spec.output_path = args.out;
  std::cout << experiments::run_delay_figure(spec).csv();
  return kExitOk;
}

struct SweepArgs {
  std::string spec_path;
  std::string figure;
  std::string out;
};

int run_sweep(const SweepArgs& args) {
  std::ifstream in(args.spec_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + args.spec_path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  experiments::SweepSpec spec = experiments::spec_from_json(buffer.str());
  if (!args.out.empty()) spec.output_path = args.out;

  if (args.figure == "region") {
    std::cout << experiments::run_region_figure(spec).csv();
  } else if (args.figure == "area") {
    std::cout << experiments::run_area_figure(spec).csv();
  } else {
    std::cout << experiments::run_delay_figure(spec).csv();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-node random-access network: closed-form analysis, exact\n"
               "kernel verification, slot-level simulation and figure sweeps"};
  app.require_subcommand(1);
  int exit_code = kExitOk;

  ParamArgs analyze_params;
  std::string analyze_format = "plain";
  CLI::App* analyze = app.add_subcommand(
      "analyze", "closed-form loads, stability, queue means and delays");
  add_param_options(analyze, analyze_params);
  analyze->add_option("--format", analyze_format, "plain or json")
      ->check(CLI::IsMember({"plain", "json"}));
  analyze->callback([&] { exit_code = run_analyze(analyze_params, analyze_format); });

  SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand("simulate", "one slot-level simulation run");
  add_param_options(simulate, sim_args.params);
  simulate->add_option("--slots", sim_args.slots, "horizon in slots");
  simulate->add_option("--seed", sim_args.seed, "RNG seed")->envname("ALOHA2_SEED");
  simulate->add_option("--warmup", sim_args.warmup,
                       "slots excluded from measurements (default slots/10)");
  simulate->add_option("--mode", sim_args.mode, "hd (arrivals block sending) or fd")
      ->check(CLI::IsMember({"hd", "fd"}));
  simulate->add_option("--format", sim_args.format, "plain, json or csv")
      ->check(CLI::IsMember({"plain", "json", "csv"}));
  simulate->callback([&] { exit_code = run_simulate(sim_args); });

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand(
      "verify", "check the stationary product form against the slot kernel");
  CLI::Option* vl1 = verify->add_option("--lambda1", verify_args.params.lambda1,
                                        "arrival rate at node 1");
  verify->add_option("--lambda2", verify_args.params.lambda2, "arrival rate at node 2")
      ->needs(vl1);
  verify->add_option("--p1", verify_args.params.p1, "transmission probability of node 1")
      ->needs(vl1);
  verify->add_option("--p2", verify_args.params.p2, "transmission probability of node 2")
      ->needs(vl1);
  verify->add_option("--random", verify_args.random_count,
                     "verify this many sampled stable parameter sets");
  verify->add_option("--seed", verify_args.seed, "sampler seed")->envname("ALOHA2_SEED");
  verify->add_option("--window", verify_args.window, "identity check window");
  verify->add_option("--perturb-nu", verify_args.perturb_nu,
                     "fault injection: offset added to transfer-class nu");
  verify->add_flag("--swap-p", verify_args.swap_p,
                   "fault injection: evaluate nu with p1 and p2 exchanged");
  verify->add_option("--format", verify_args.format, "plain or json")
      ->check(CLI::IsMember({"plain", "json"}));
  verify->callback([&] {
    verify_args.has_params = vl1->count() > 0;
    if (verify_args.has_params &&
        (verify_args.params.lambda2.empty() || verify_args.params.p1.empty() ||
         verify_args.params.p2.empty())) {
      throw CLI::ValidationError("verify", "--lambda1 needs --lambda2, --p1 and --p2");
    }
    exit_code = run_verify(verify_args);
  });

  RegionArgs region_args;
  CLI::App* region = app.add_subcommand(
      "region", "stability boundary: closed form vs bisection with the ratio detector");
  region->add_option("--p1", region_args.p1, "transmission probability of node 1")
      ->required();
  region->add_option("--p2", region_args.p2, "transmission probability of node 2")
      ->required();
  region->add_option("--grid", region_args.grid, "comma-separated lambda1 values");
  region->add_option("--slots", region_args.slots, "detector horizon per probe");
  region->add_option("--seed", region_args.seed, "detector seed")->envname("ALOHA2_SEED");
  region->add_option("--threshold", region_args.threshold, "backlog ratio threshold");
  region->add_option("--resolution", region_args.resolution, "bracket half-width target");
  region->add_option("--out", region_args.out, "CSV path (also writes <out>.manifest.json)");
  region->callback([&] { exit_code = run_region(region_args); });

  AreaArgs area_args;
  CLI::App* area = app.add_subcommand(
      "area", "closed-form region areas for symmetric attempt probabilities");
  area->add_option("--p-list", area_args.p_list, "comma-separated p values");
  area->add_option("--out", area_args.out, "CSV path (also writes <out>.manifest.json)");
  area->callback([&] { exit_code = run_area(area_args); });

  DelayArgs delay_args;
  CLI::App* delay = app.add_subcommand(
      "delay", "mean delay under symmetric load: closed form vs simulation");
  delay->add_option("--p", delay_args.p, "transmission probability of both nodes")
      ->required();
  delay->add_option("--grid", delay_args.grid,
                    "comma-separated per-node arrival rates (default: up to 80% of "
                    "capacity)");
  delay->add_option("--slots", delay_args.slots, "simulation horizon per run");
  delay->add_option("--warmup", delay_args.warmup,
                    "slots excluded from measurements (default slots/10)");
  delay->add_option("--seeds", delay_args.seeds, "comma-separated seed list");
  delay->add_option("--out", delay_args.out, "CSV path (also writes <out>.manifest.json)");
  delay->callback([&] { exit_code = run_delay(delay_args); });

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "run a figure from a JSON sweep spec");
  sweep->add_option("--spec", sweep_args.spec_path, "path to the spec JSON")->required();
  sweep->add_option("--figure", sweep_args.figure, "region, area or delay")
      ->required()
      ->check(CLI::IsMember({"region", "area", "delay"}));
  sweep->add_option("--out", sweep_args.out, "override the spec's output path");
  sweep->callback([&] { exit_code = run_sweep(sweep_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UnstableError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnstable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return exit_code;
}

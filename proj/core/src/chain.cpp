#include "aloha2/chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "aloha2/text.hpp"

namespace aloha2::chain {

namespace {

bool movement_valid(NetworkState state, MovementVector m) {
  return state.n1 >= m.departures(1) && state.n2 >= m.departures(2);
}

}  // namespace

double RateTable::rate(NetworkState state, MovementVector m) const noexcept {
  if (!movement_valid(state, m)) return 0.0;
  const double l1 = params_.lambda1();
  const double l2 = params_.lambda2();
  const double p1 = params_.p1();
  const double p2 = params_.p2();
  const double idle = 1 - params_.lambda_total();
  const bool busy1 = state.n1 > 0;
  const bool busy2 = state.n2 > 0;
  const double hold1 = busy1 ? 1 - p1 : 1.0;  // node 1 stays silent
  const double hold2 = busy2 ? 1 - p2 : 1.0;

  switch (m.departing_node() * 10 + m.arriving_node()) {
    case 1:   // (0,1) arrival joins node 1, nothing leaves
      return l1 * hold2;
    case 10:  // (1,0) node 1 transmits alone in an arrival-free slot
      return idle * p1 * hold2;
    case 2:   // (0,2)
      return l2 * hold1;
    case 20:  // (2,0)
      return idle * hold1 * p2;
    case 12:  // (1,2) node 2 receives (and cannot transmit), node 1 transmits
      return l2 * p1;
    case 21:  // (2,1)
      return l1 * p2;
    default:  // (0,0) all idle, or both transmit and collide
      return idle * hold1 * hold2 +
             (busy1 && busy2 ? idle * p1 * p2 : 0.0);
  }
}

double RateTable::row_sum(NetworkState state) const noexcept {
  double sum = 0.0;
  for (const MovementVector m : movement_set()) {
    sum += rate(state, m);
  }
  return sum;
}

double slot_rate(const NetworkParams& params, NetworkState state, MovementVector m) {
  if (!movement_valid(state, m)) {
    throw std::domain_error("departure from empty queue");
  }
  return RateTable(params).rate(state, m);
}

ProductFormWitness::ProductFormWitness(const NetworkParams& params, VerifyOptions options)
    : params_(params), options_(options) {
  const double lambda = params.lambda_total();
  if (lambda >= 1) {
    throw std::domain_error("lambda1 + lambda2 = 1: no arrival-free slots");
  }
  rho1_ = params.lambda1() / (params.p1() * (1 - lambda));
  rho2_ = params.lambda2() / (params.p2() * (1 - lambda));
}

double ProductFormWitness::phi(NetworkState state) const {
  return std::pow(rho1_, static_cast<double>(state.n1)) *
         std::pow(rho2_, static_cast<double>(state.n2));
}

double ProductFormWitness::nu_formula(MovementVector canonical, bool node1_busy,
                                      bool node2_busy) const {
  const double l1 = params_.lambda1();
  const double l2 = params_.lambda2();
  const double p1 = options_.swap_p_in_nu ? params_.p2() : params_.p1();
  const double p2 = options_.swap_p_in_nu ? params_.p1() : params_.p2();
  const double idle = 1 - params_.lambda_total();
  const double hold1 = node1_busy ? 1 - p1 : 1.0;
  const double hold2 = node2_busy ? 1 - p2 : 1.0;

  switch (canonical.departing_node() * 10 + canonical.arriving_node()) {
    case 1:   // (0,1)
      return l1 * hold2;
    case 2:   // (0,2)
      return l2 * hold1;
    case 12:  // (1,2)
      return l1 * l2 / (1 - params_.lambda_total()) + options_.nu_perturb;
    default:  // (0,0)
      return idle * hold1 * hold2 +
             (node1_busy && node2_busy ? idle * p1 * p2 : 0.0);
  }
}

double ProductFormWitness::nu(const MovementClass& cls) const {
  return nu_formula(cls.canonical, cls.base.n1 > 0, cls.base.n2 > 0);
}

double ProductFormWitness::nu_at(NetworkState state, MovementVector m) const {
  if (!movement_valid(state, m)) {
    throw std::domain_error("departure from empty queue");
  }
  // reduce the tag without shifting to the class base; the sign structure
  // a class's nu depends on is untouched by the departing packet
  int dep = m.departing_node();
  int arr = m.arriving_node();
  if (m.norm() == 1 && dep != 0) {
    arr = dep;
    dep = 0;
  } else if (m.norm() == 2 && dep == 2) {
    dep = 1;
    arr = 2;
  }
  return nu_formula(MovementVector::from_tag(dep, arr), state.n1 > 0, state.n2 > 0);
}

double ProductFormWitness::phi_sum() const {
  if (rho1_ >= 1 || rho2_ >= 1) {
    throw UnstableError("unstable: rho = (" + format_double(rho1_) + ", " +
                        format_double(rho2_) + ")");
  }
  return 1.0 / ((1 - rho1_) * (1 - rho2_));
}

ProductFormWitness witness(const NetworkParams& params) {
  return ProductFormWitness(params);
}

TheoremReport verify_theorem_identity(const NetworkParams& params, int window,
                                      const VerifyOptions& options) {
  if (window < 0) throw std::domain_error("window < 0");
  const ProductFormWitness w(params, options);
  const RateTable rates(params);
  TheoremReport report;
  report.window = window;
  for (std::int64_t n1 = 0; n1 <= window; ++n1) {
    for (std::int64_t n2 = 0; n2 <= window; ++n2) {
      const NetworkState state{n1, n2};
      for (const MovementVector m : movement_set()) {
        if (!movement_valid(state, m)) continue;
        const MovementClass cls = movement_class(state, m);
        const double lhs = rates.rate(state, m) * w.phi(state);
        const double rhs = w.psi(cls) * w.nu(cls);
        const double error = std::abs(lhs - rhs);
        if (error > report.max_abs_error) {
          report.max_abs_error = error;
          report.worst_state = state;
          report.worst_movement = m;
        }
        const double gap = std::abs(w.nu_at(state, m) - w.nu(cls));
        if (gap != 0.0) {
          report.nu_consistent = false;
          report.max_nu_gap = std::max(report.max_nu_gap, gap);
        }
        ++report.pairs_checked;
      }
    }
  }
  return report;
}

TruncatedChain::TruncatedChain(const NetworkParams& params, int truncation)
    : params_(params), truncation_(truncation) {
  if (truncation < 0 || truncation > 1023) {
    throw std::domain_error("truncation not in [0, 1023]");
  }
  const std::size_t side = static_cast<std::size_t>(truncation) + 1;
  const std::size_t states = side * side;
  const RateTable rates(params);

  entries_.reserve(states * 5);
  row_offsets_.reserve(states + 1);
  row_offsets_.push_back(0);

  for (std::size_t index = 0; index < states; ++index) {
    const NetworkState state = state_of(index);
    // at most 7 distinct targets per row
    Entry local[7];
    int count = 0;
    for (const MovementVector m : movement_set()) {
      const double probability = rates.rate(state, m);
      if (probability == 0.0) continue;
      std::uint32_t column = static_cast<std::uint32_t>(index);
      if (movement_valid(state, m)) {
        const NetworkState target = apply_movement(state, m);
        if (target.n1 <= truncation && target.n2 <= truncation) {
          column = static_cast<std::uint32_t>(index_of(target));
        }
        // else: reflect the overflow into the self-loop
      }
      bool merged = false;
      for (int k = 0; k < count; ++k) {
        if (local[k].column == column) {
          local[k].probability += probability;
          merged = true;
          break;
        }
      }
      if (!merged) local[count++] = Entry{column, probability};
    }
    for (int k = 1; k < count; ++k) {
      const Entry e = local[k];
      int j = k;
      for (; j > 0 && local[j - 1].column > e.column; --j) local[j] = local[j - 1];
      local[j] = e;
    }
    entries_.insert(entries_.end(), local, local + count);
    row_offsets_.push_back(static_cast<std::uint32_t>(entries_.size()));
  }
}

std::size_t TruncatedChain::state_count() const noexcept {
  const std::size_t side = static_cast<std::size_t>(truncation_) + 1;
  return side * side;
}

std::size_t TruncatedChain::index_of(NetworkState state) const {
  if (state.n1 < 0 || state.n2 < 0 || state.n1 > truncation_ || state.n2 > truncation_) {
    throw std::domain_error("state outside the truncation window");
  }
  const std::size_t side = static_cast<std::size_t>(truncation_) + 1;
  return static_cast<std::size_t>(state.n1) * side + static_cast<std::size_t>(state.n2);
}

NetworkState TruncatedChain::state_of(std::size_t index) const {
  const std::size_t side = static_cast<std::size_t>(truncation_) + 1;
  if (index >= side * side) {
    throw std::domain_error("state index outside the truncation window");
  }
  return NetworkState{static_cast<std::int64_t>(index / side),
                      static_cast<std::int64_t>(index % side)};
}

std::span<const TruncatedChain::Entry> TruncatedChain::row(std::size_t index) const {
  if (index + 1 >= row_offsets_.size()) {
    throw std::domain_error("state index outside the truncation window");
  }
  return std::span<const Entry>(entries_.data() + row_offsets_[index],
                                entries_.data() + row_offsets_[index + 1]);
}

double TruncatedChain::row_sum(std::size_t index) const {
  double sum = 0.0;
  for (const Entry& e : row(index)) sum += e.probability;
  return sum;
}

void TruncatedChain::multiply(std::span<const double> x, std::span<double> y) const {
  const std::size_t states = state_count();
  if (x.size() != states || y.size() != states) {
    throw std::invalid_argument("vector size does not match state count");
  }
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < states; ++i) {
    const double mass = x[i];
    if (mass == 0.0) continue;
    for (std::uint32_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      y[entries_[k].column] += mass * entries_[k].probability;
    }
  }
}

TruncatedChain build_truncated_kernel(const NetworkParams& params, int truncation) {
  return TruncatedChain(params, truncation);
}

int suggest_truncation(const NetworkParams& params) {
  const ProductFormWitness w(params);
  const double max_rho = std::max(w.rho1(), w.rho2());
  if (max_rho >= 1) {
    throw UnstableError("unstable: rho = (" + format_double(w.rho1()) + ", " +
                        format_double(w.rho2()) + ")");
  }
  if (max_rho <= 0) return 8;
  const double n = std::ceil(std::log(1e-10) / std::log(max_rho));
  return static_cast<int>(std::clamp(n, 8.0, 512.0));
}

std::vector<double> stationary_distribution(const TruncatedChain& chain,
                                            double tolerance,
                                            std::uint64_t max_iterations) {
  if (!(tolerance > 0)) throw std::domain_error("tolerance must be positive");
  if (max_iterations == 0) throw std::domain_error("max_iterations must be positive");
  const std::size_t states = chain.state_count();
  std::vector<double> pi(states, 1.0 / static_cast<double>(states));
  std::vector<double> next(states, 0.0);
  double residual = 0.0;
  for (std::uint64_t iteration = 0; iteration < max_iterations; ++iteration) {
    chain.multiply(pi, next);
    double sum = 0.0;
    for (const double v : next) sum += v;
    residual = 0.0;
    for (std::size_t i = 0; i < states; ++i) {
      next[i] /= sum;
      residual += std::abs(next[i] - pi[i]);
    }
    pi.swap(next);
    if (residual <= tolerance) return pi;
  }
  throw ConvergenceError("stationary distribution did not reach tolerance " +
                             format_double(tolerance) + " (residual " +
                             format_double(residual) + ")",
                         residual);
}

double compare_to_product_form(const NetworkParams& params, int truncation,
                               double solver_tolerance) {
  const ProductFormWitness w(params);
  if (w.rho1() >= 1 || w.rho2() >= 1) {
    throw UnstableError("unstable: rho = (" + format_double(w.rho1()) + ", " +
                        format_double(w.rho2()) + ")");
  }
  const double max_rho = std::max(w.rho1(), w.rho2());
  if (std::pow(max_rho, static_cast<double>(truncation)) > 1e-8) {
    throw std::domain_error("truncation too small: max(rho)^N > 1e-8");
  }
  const TruncatedChain chain = build_truncated_kernel(params, truncation);
  const std::vector<double> pi = stationary_distribution(chain, solver_tolerance);

  const std::size_t states = chain.state_count();
  std::vector<double> closed(states);
  double total = 0.0;
  for (std::size_t i = 0; i < states; ++i) {
    closed[i] = w.phi(chain.state_of(i));
    total += closed[i];
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < states; ++i) {
    tv += std::abs(pi[i] - closed[i] / total);
  }
  return tv / 2;
}

}  // namespace aloha2::chain

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aloha2/errors.hpp"
#include "aloha2/movement.hpp"
#include "aloha2/params.hpp"

namespace aloha2::chain {

// Probability that one slot starting in `state` realizes movement `m`.
// For backlogged, non-receiving nodes a transmission attempt fires with
// probability p_i; simultaneous attempts collide and move nothing. The
// empty movement therefore collects both the all-idle and the collision
// outcomes. Rows sum to 1 over the valid movements of a state.
class RateTable {
 public:
  explicit RateTable(const NetworkParams& params) : params_(params) {}

  // 0 when the movement departs from an empty queue.
  double rate(NetworkState state, MovementVector m) const noexcept;

  double row_sum(NetworkState state) const noexcept;

  const NetworkParams& params() const noexcept { return params_; }

 private:
  NetworkParams params_;
};

// Same as RateTable::rate but throws std::domain_error for invalid pairs.
double slot_rate(const NetworkParams& params, NetworkState state, MovementVector m);

// Fault-injection knobs for the verifier (CLI --perturb-nu and tests).
struct VerifyOptions {
  // Added to nu of every transfer class (canonical movement (1,2)).
  double nu_perturb = 0.0;
  // Evaluate nu with p1 and p2 exchanged.
  bool swap_p_in_nu = false;
};

// The product-form candidate and its class measure. phi is the unnormalized
// geometric weight rho1^n1 rho2^n2; psi evaluates phi at a class's base
// state; nu is the class measure whose product with psi must reproduce
// rate * phi pointwise.
class ProductFormWitness {
 public:
  explicit ProductFormWitness(const NetworkParams& params, VerifyOptions options = {});

  double phi(NetworkState state) const;
  double psi(const MovementClass& cls) const { return phi(cls.base); }
  double nu(const MovementClass& cls) const;

  // nu evaluated from a member's own state (sign structure taken from the
  // member, not the class base). Must agree with nu(class) exactly.
  double nu_at(NetworkState state, MovementVector m) const;

  // sum of phi over all states = 1/((1-rho1)(1-rho2)).
  // Throws UnstableError outside the stability region.
  double phi_sum() const;

  double rho1() const noexcept { return rho1_; }
  double rho2() const noexcept { return rho2_; }
  const NetworkParams& params() const noexcept { return params_; }

 private:
  double nu_formula(MovementVector canonical, bool node1_busy, bool node2_busy) const;

  NetworkParams params_;
  VerifyOptions options_;
  double rho1_;
  double rho2_;
};

ProductFormWitness witness(const NetworkParams& params);

struct TheoremReport {
  double max_abs_error = 0.0;
  NetworkState worst_state;
  MovementVector worst_movement = MovementVector::all()[6];
  bool nu_consistent = true;
  double max_nu_gap = 0.0;
  int window = 0;
  std::uint64_t pairs_checked = 0;
};

// Checks rate(n, a) * phi(n) == psi(<n,a>) * nu(<n,a>) for every state with
// n_i <= window and every movement valid there, and that nu evaluates
// identically from every member of each class. Products are compared, not
// quotients, so zero rates are handled uniformly.
TheoremReport verify_theorem_identity(const NetworkParams& params, int window,
                                      const VerifyOptions& options = {});

// Row-stochastic kernel of the chain truncated to the window n_i <= N.
// Transitions leaving the window are redirected into the self-loop
// ("reflect to self"), preserving row sums exactly.
class TruncatedChain {
 public:
  struct Entry {
    std::uint32_t column;
    double probability;
  };

  TruncatedChain(const NetworkParams& params, int truncation);

  int truncation() const noexcept { return truncation_; }
  std::size_t state_count() const noexcept;
  std::size_t index_of(NetworkState state) const;
  NetworkState state_of(std::size_t index) const;

  std::span<const Entry> row(std::size_t index) const;
  double row_sum(std::size_t index) const;

  // y = x K for a row vector x.
  void multiply(std::span<const double> x, std::span<double> y) const;

  const NetworkParams& params() const noexcept { return params_; }

 private:
  NetworkParams params_;
  int truncation_;
  std::vector<Entry> entries_;
  std::vector<std::uint32_t> row_offsets_;
};

TruncatedChain build_truncated_kernel(const NetworkParams& params, int truncation);

// Smallest N with max(rho)^N <= 1e-10, clamped to [8, 512]. Requires stable
// parameters.
int suggest_truncation(const NetworkParams& params);

// Stationary pmf of the truncated kernel by power iteration, indexed by
// TruncatedChain::index_of. Stops when |pi K - pi|_1 <= tolerance; throws
// ConvergenceError (carrying the last residual) at the iteration cap.
std::vector<double> stationary_distribution(const TruncatedChain& chain,
                                            double tolerance = 1e-12,
                                            std::uint64_t max_iterations = 1000000);

// Total-variation distance between the truncated chain's stationary pmf and
// the closed-form product pmf restricted to the window and renormalized.
// solver_tolerance is passed through to stationary_distribution.
double compare_to_product_form(const NetworkParams& params, int truncation,
                               double solver_tolerance = 1e-12);

}  // namespace aloha2::chain

#pragma once

namespace aloha2 {

// Per-slot probabilities of the two-node network. lambda1/lambda2 are the
// arrival probabilities of the two exogenous streams; the streams are
// mutually exclusive (at most one packet enters the network per slot), so
// lambda1 + lambda2 <= 1. p1/p2 are the transmission-attempt probabilities
// of a backlogged node in a slot where it is not receiving.
class NetworkParams {
 public:
  // Throws std::domain_error naming the violated constraint.
  NetworkParams(double lambda1, double lambda2, double p1, double p2);

  double lambda1() const noexcept { return lambda1_; }
  double lambda2() const noexcept { return lambda2_; }
  double p1() const noexcept { return p1_; }
  double p2() const noexcept { return p2_; }

  // node is 1 or 2
  double lambda(int node) const;
  double p(int node) const;

  double lambda_total() const noexcept { return lambda1_ + lambda2_; }

  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;

 private:
  double lambda1_;
  double lambda2_;
  double p1_;
  double p2_;
};

// Same checks as the constructor, as a free function.
NetworkParams validate_params(double lambda1, double lambda2, double p1, double p2);

}  // namespace aloha2

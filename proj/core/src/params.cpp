#include "aloha2/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aloha2 {

namespace {

void check_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw std::domain_error(std::string(name) + " is not finite");
  }
}

}  // namespace

NetworkParams::NetworkParams(double lambda1, double lambda2, double p1, double p2)
    : lambda1_(lambda1), lambda2_(lambda2), p1_(p1), p2_(p2) {
  check_finite(lambda1, "lambda1");
  check_finite(lambda2, "lambda2");
  check_finite(p1, "p1");
  check_finite(p2, "p2");
  if (lambda1 < 0) throw std::domain_error("lambda1 < 0");
  if (lambda2 < 0) throw std::domain_error("lambda2 < 0");
  if (lambda1 + lambda2 > 1) throw std::domain_error("lambda1 + lambda2 > 1");
  if (!(p1 > 0 && p1 < 1)) throw std::domain_error("p1 not in (0, 1)");
  if (!(p2 > 0 && p2 < 1)) throw std::domain_error("p2 not in (0, 1)");
}

double NetworkParams::lambda(int node) const {
  if (node != 1 && node != 2) throw std::domain_error("node must be 1 or 2");
  return node == 1 ? lambda1_ : lambda2_;
}

double NetworkParams::p(int node) const {
  if (node != 1 && node != 2) throw std::domain_error("node must be 1 or 2");
  return node == 1 ? p1_ : p2_;
}

NetworkParams validate_params(double lambda1, double lambda2, double p1, double p2) {
  return NetworkParams(lambda1, lambda2, p1, p2);
}

}  // namespace aloha2

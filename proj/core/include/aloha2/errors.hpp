#pragma once

#include <stdexcept>
#include <string>

namespace aloha2 {

// Thrown by quantities that only exist for stable parameters
// (normalization constant, stationary pmf, delays, ...).
class UnstableError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Thrown when an iterative solver stops short of its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace aloha2

#pragma once

#include <stdexcept>
#include <string>

namespace fracstab {

// Quadrature did not reach the requested tolerance. Carries the estimate.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double tolerance)
      : std::runtime_error(what), estimate_(estimate), tolerance_(tolerance) {}
  double estimate() const noexcept { return estimate_; }
  double tolerance() const noexcept { return tolerance_; }

 private:
  double estimate_;
  double tolerance_;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The direction map of a regraph is not a diffeomorphism.
class DiffeomorphismError : public std::runtime_error {
 public:
  DiffeomorphismError(const std::string& what, double derivative_bound)
      : std::runtime_error(what), bound_(derivative_bound) {}
  double derivative_bound() const noexcept { return bound_; }

 private:
  double bound_;
};

// Sampled data carries energy above the analysis band limit.
class AliasingError : public std::runtime_error {
 public:
  AliasingError(const std::string& what, double residual_fraction)
      : std::runtime_error(what), residual_(residual_fraction) {}
  double residual_fraction() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace fracstab

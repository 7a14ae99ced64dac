#pragma once

#include <stdexcept>
#include <string>

namespace fracstab {

// Dimension n and the two fractional orders s < t.
struct FracParams {
  int n = 2;
  double s = 0.25;
  double t = 0.75;

  static FracParams make(int n, double s, double t) {
    if (n < 2) throw std::invalid_argument("FracParams: n must be >= 2, got " + std::to_string(n));
    if (!(s > 0.0 && s < t && t < 1.0))
      throw std::invalid_argument("FracParams: need 0 < s < t < 1");
    return FracParams{n, s, t};
  }
};

inline void check_order(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("fractional order must lie in (0,1), got " + std::to_string(alpha));
}

inline void check_dimension(int n) {
  if (n < 2) throw std::invalid_argument("dimension must be >= 2, got " + std::to_string(n));
}

}  // namespace fracstab

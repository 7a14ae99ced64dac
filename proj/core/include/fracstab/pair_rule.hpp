#pragma once

#include <memory>
#include <vector>

#include "fracstab/sphere.hpp"

namespace fracstab {

// Tensor rule for  int int |x-y|^{2-n-alpha} Psi(x,y) dsigma(y) dsigma(x)  with smooth Psi.
// The weakly singular factor is folded into wy, so the rule never samples x = y.
//   n = 2: trapezoid in x, product-trigonometric weights in the angle difference.
//   n = 3: polar coordinates about x; Gauss-Jacobi in the geodesic angle, trapezoid around it.
struct PairRule {
  int n = 2;
  double alpha = 0.5;
  int resolution = 0;
  std::vector<Point> x;
  std::vector<double> wx;
  std::size_t ny = 0;         // y nodes per x node
  std::vector<Point> y;       // x.size() * ny, row-major in x
  std::vector<double> wy;     // includes the kernel |x-y|^{2-n-alpha}
  std::vector<double> dist;   // |x-y|
};

std::shared_ptr<const PairRule> pair_rule(int n, double alpha, int resolution);

/// Resolution adequate for band limit K (n = 2: circle nodes, n = 3: colatitude nodes).
int default_pair_resolution(int n, int K);
/// Companion resolution used for the a-posteriori error estimate.
int coarse_pair_resolution(int n, int resolution);

}  // namespace fracstab

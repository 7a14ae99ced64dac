#pragma once

#include <cstddef>
#include <vector>

namespace fracstab {

struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

/// Gauss-Legendre rule on [-1, 1] with m nodes (Newton on the three-term recurrence).
Rule1D gauss_legendre(int m);

/// Gauss-Jacobi rule on [-1, 1] for the weight (1-x)^a (1+x)^b, a, b > -1 (Golub-Welsch).
Rule1D gauss_jacobi(int m, double a, double b);

/// Product weights for  int_0^{2pi} |2 sin(d/2)|^{-alpha} g(d) dd  at the shifted
/// nodes d_j = 2 pi (j + 1/2) / N. Exact for trigonometric g of degree < N/2.
Rule1D circle_product_rule(int N, double alpha);

/// Fourier moments c_m = int_0^{2pi} |2 sin(d/2)|^{-alpha} cos(m d) dd, m = 0..M.
std::vector<double> circle_kernel_moments(int M, double alpha);

/// Deterministic pairwise summation.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace fracstab

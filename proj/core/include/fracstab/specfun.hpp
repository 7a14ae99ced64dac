#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace fracstab {

/// Dimension of the space of degree-k spherical harmonics on the unit sphere of R^n.
std::int64_t dim_harmonic(int n, int k);

/// Volume of the unit ball in R^n.
double ball_volume(int n);
/// Surface measure of the unit sphere in R^n (= n * ball_volume(n)).
double sphere_area(int n);

/// Eigenvalue of the order-(1+alpha)/2 Gagliardo seminorm on degree-k harmonics.
double lambda_eigenvalue(int n, double alpha, int k);

/// Fractional alpha-perimeter of the unit ball.
double perimeter_ball(int n, double alpha);

/// Normalized eigenvalue A_{alpha,k}; A_0 = 0, A_1 = alpha, A_2 = 2 n alpha / (n - alpha).
/// Equals sphere_area(n) * lambda / ((n - alpha) * perimeter_ball).
double A_coefficient(int n, double alpha, int k);

/// A_{alpha,k+1} - A_{alpha,k} in product form.
double A_increment(int n, double alpha, int k);

struct SpectralTable {
  int n = 0;
  double alpha = 0.0;
  int K = 0;
  std::vector<double> lambda;
  std::vector<double> A;
  std::vector<double> increment;  // increment[k] = A[k+1] - A[k], size K
  std::vector<std::int64_t> dim;
  double perimeter_ball = 0.0;
  double omega_n = 0.0;
};

inline constexpr int kDefaultSpectralCutoff = 256;

/// Memoized per (n, alpha, K). Thread safe. A is built by telescoping increments.
std::shared_ptr<const SpectralTable> spectral_table(int n, double alpha,
                                                    int K = kDefaultSpectralCutoff);

}  // namespace fracstab

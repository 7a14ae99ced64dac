#include "fracstab/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracstab {

using std::numbers::pi;

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

Rule1D gauss_legendre(int m) {
  if (m < 1) throw std::invalid_argument("gauss_legendre: m must be >= 1");
  Rule1D r;
  r.x.resize(m);
  r.w.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int j = 2; j <= m; ++j) {
        const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int j = 2; j <= m; ++j) {
      const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    if (m == 1) p0 = 1.0;
    dp = m * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = -z;
    r.x[m - 1 - i] = z;
    r.w[i] = w;
    r.w[m - 1 - i] = w;
  }
  if (m % 2 == 1) r.x[m / 2] = 0.0;
  return r;
}

Rule1D gauss_jacobi(int m, double a, double b) {
  if (m < 1) throw std::invalid_argument("gauss_jacobi: m must be >= 1");
  if (!(a > -1.0 && b > -1.0)) throw std::invalid_argument("gauss_jacobi: need a, b > -1");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  const double ab = a + b;
  for (int k = 0; k < m; ++k) {
    const double s = 2.0 * k + ab;
    J(k, k) = (k == 0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (k > 0) {
      const double num = 4.0 * k * (k + a) * (k + b) * (k + ab);
      const double den = s * s * (s + 1.0) * (s - 1.0);
      const double off = std::sqrt(num / den);
      J(k, k - 1) = off;
      J(k - 1, k) = off;
    }
  }
  // k = 1 with a + b = -1 makes s - 1 vanish together with k + ab; use the limit.
  if (m > 1 && std::abs(ab + 1.0) < 1e-14) {
    const double off = std::sqrt(4.0 * (1.0 + a) * (1.0 + b) / ((1.0 + ab + 1.0) * (1.0 + ab + 1.0) * (ab + 3.0)));
    J(1, 0) = J(0, 1) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                              std::lgamma(ab + 2.0));
  Rule1D r;
  r.x.resize(m);
  r.w.resize(m);
  for (int i = 0; i < m; ++i) {
    r.x[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    r.w[i] = mu0 * v0 * v0;
  }
  return r;
}

std::vector<double> circle_kernel_moments(int M, double alpha) {
  std::vector<double> c(M + 1);
  c[0] = 2.0 * pi * std::exp(std::lgamma(1.0 - alpha) - 2.0 * std::lgamma(1.0 - 0.5 * alpha));
  for (int m = 1; m <= M; ++m) c[m] = c[m - 1] * (m - 1 + 0.5 * alpha) / (m - 0.5 * alpha);
  return c;
}

Rule1D circle_product_rule(int N, double alpha) {
  if (N < 4 || N % 2 != 0) throw std::invalid_argument("circle_product_rule: N must be even and >= 4");
  const auto c = circle_kernel_moments(N / 2, alpha);
  Rule1D r;
  r.x.resize(N);
  r.w.resize(N);
  for (int j = 0; j < N; ++j) {
    const double d = 2.0 * pi * (j + 0.5) / N;
    double s = 0.0;
    for (int m = N / 2 - 1; m >= 1; --m) s += c[m] * std::cos(m * d);
    r.x[j] = d;
    r.w[j] = (c[0] + 2.0 * s) / N;
  }
  return r;
}

}  // namespace fracstab

#include "fracstab/specfun.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "fracstab/params.hpp"

namespace fracstab {

namespace bm = boost::math;
using std::numbers::pi;

namespace {

std::int64_t binom(std::int64_t a, std::int64_t b) {
  if (b < 0 || a < 0 || b > a) return 0;
  b = std::min(b, a - b);
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

// Gamma(a)/Gamma(b) for a > 0 and b > -1, b != 0.
double gamma_ratio(double a, double b) {
  if (b > 0.0) return bm::tgamma_ratio(a, b);
  // Gamma(b) = Gamma(b+1)/b
  return b * bm::tgamma_ratio(a, b + 1.0);
}

void check_degree(int k) {
  if (k < 0) throw std::invalid_argument("degree must be >= 0");
}

// Common prefactor 2^{1-a} pi^{(n-1)/2} Gamma((1-a)/2).
double seminorm_prefactor(int n, double alpha) {
  return std::pow(2.0, 1.0 - alpha) * std::pow(pi, 0.5 * (n - 1)) * std::tgamma(0.5 * (1.0 - alpha));
}

}  // namespace

std::int64_t dim_harmonic(int n, int k) {
  if (n < 1) throw std::invalid_argument("dim_harmonic: n must be >= 1");
  check_degree(k);
  if (n == 1) return k <= 1 ? 1 : 0;
  return binom(n + k - 1, k) - binom(n + k - 3, k - 2);
}

double ball_volume(int n) {
  if (n < 1) throw std::invalid_argument("ball_volume: n must be >= 1");
  return std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double sphere_area(int n) { return n * ball_volume(n); }

double lambda_eigenvalue(int n, double alpha, int k) {
  check_dimension(n);
  check_order(alpha);
  check_degree(k);
  if (k == 0) return 0.0;
  const double p = 0.5 * (n + alpha);
  const double b = 0.5 * (n - 2 - alpha);
  const double pre = seminorm_prefactor(n, alpha) / ((1.0 + alpha) * std::tgamma(p));
  return pre * (gamma_ratio(k + p, k + b) - gamma_ratio(p, b));
}

double perimeter_ball(int n, double alpha) {
  check_dimension(n);
  check_order(alpha);
  return seminorm_prefactor(n, alpha) * sphere_area(n) /
         (alpha * (n - alpha) * std::tgamma(0.5 * (n - alpha)));
}

double A_coefficient(int n, double alpha, int k) {
  check_dimension(n);
  check_order(alpha);
  check_degree(k);
  const double p = 0.5 * (n + alpha);
  const double m = 0.5 * (n - alpha);
  const double rk = gamma_ratio(k + p, k + m - 1.0);
  return alpha / (alpha + 1.0) * (bm::tgamma_ratio(m, p) * rk - (m - 1.0));
}

double A_increment(int n, double alpha, int k) {
  check_dimension(n);
  check_order(alpha);
  check_degree(k);
  const double p = 0.5 * (n + alpha);
  const double m = 0.5 * (n - alpha);
  if (k == 0) return alpha;
  return alpha * bm::tgamma_ratio(m, p) * bm::tgamma_ratio(k + p, k + m);
}

std::shared_ptr<const SpectralTable> spectral_table(int n, double alpha, int K) {
  check_dimension(n);
  check_order(alpha);
  if (K < 2) throw std::invalid_argument("spectral_table: K must be >= 2");

  static std::mutex mu;
  static std::map<std::tuple<int, double, int>, std::shared_ptr<const SpectralTable>> cache;
  const auto key = std::make_tuple(n, alpha, K);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  auto tab = std::make_shared<SpectralTable>();
  tab->n = n;
  tab->alpha = alpha;
  tab->K = K;
  tab->perimeter_ball = perimeter_ball(n, alpha);
  tab->omega_n = ball_volume(n);
  tab->lambda.resize(K + 1);
  tab->A.resize(K + 1);
  tab->dim.resize(K + 1);
  tab->increment.resize(K);

  // increment(k+1)/increment(k) = (k + p)/(k + m); restart from the Gamma
  // form every 32 steps to keep the product from drifting.
  const double p = 0.5 * (n + alpha);
  const double m = 0.5 * (n - alpha);
  double inc = alpha;
  for (int k = 0; k < K; ++k) {
    if (k > 0) inc = (k % 32 == 0) ? A_increment(n, alpha, k) : inc * (k - 1 + p) / (k - 1 + m);
    tab->increment[k] = inc;
  }
  const double to_lambda = (n - alpha) * tab->perimeter_ball / sphere_area(n);
  tab->A[0] = 0.0;
  for (int k = 1; k <= K; ++k) tab->A[k] = tab->A[k - 1] + tab->increment[k - 1];
  for (int k = 0; k <= K; ++k) {
    tab->lambda[k] = tab->A[k] * to_lambda;
    tab->dim[k] = dim_harmonic(n, k);
  }

  std::lock_guard<std::mutex> lock(mu);
  if (cache.size() > 256) cache.clear();
  auto [it, inserted] = cache.emplace(key, std::move(tab));
  (void)inserted;
  return it->second;
}

}  // namespace fracstab

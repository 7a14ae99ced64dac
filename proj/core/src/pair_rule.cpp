#include "fracstab/pair_rule.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "fracstab/params.hpp"
#include "fracstab/quadrature.hpp"

namespace fracstab {

using std::numbers::pi;

namespace {

PairRule build_circle(double alpha, int N) {
  PairRule r;
  r.n = 2;
  r.alpha = alpha;
  r.resolution = N;
  const Rule1D pr = circle_product_rule(N, alpha);
  r.ny = N;
  r.x.resize(N);
  r.wx.assign(N, 2.0 * pi / N);
  r.y.resize(static_cast<std::size_t>(N) * N);
  r.wy.resize(r.y.size());
  r.dist.resize(r.y.size());
  for (int i = 0; i < N; ++i) {
    const double th = 2.0 * pi * i / N;
    r.x[i] = {std::cos(th), std::sin(th), 0.0};
    for (int j = 0; j < N; ++j) {
      const std::size_t p = static_cast<std::size_t>(i) * N + j;
      // y sits on the half-shifted grid, index (i - j - 1) mod N
      const int m = ((i - j - 1) % N + N) % N;
      const double eta = 2.0 * pi * (m + 0.5) / N;
      r.y[p] = {std::cos(eta), std::sin(eta), 0.0};
      r.wy[p] = pr.w[j];
      r.dist[p] = 2.0 * std::abs(std::sin(0.5 * pr.x[j]));
    }
  }
  return r;
}

PairRule build_sphere(double alpha, int n_theta) {
  PairRule r;
  r.n = 3;
  r.alpha = alpha;
  r.resolution = n_theta;
  const QuadratureGrid gx = make_grid(3, n_theta);
  r.x = gx.nodes;
  r.wx = gx.weights;
  const int n_psi = n_theta + 8;
  const int n_beta = 2 * n_theta;
  const Rule1D gj = gauss_jacobi(n_psi, 0.0, -alpha);
  r.ny = static_cast<std::size_t>(n_psi) * n_beta;
  r.y.resize(r.x.size() * r.ny);
  r.wy.resize(r.y.size());
  r.dist.resize(r.y.size());

  std::vector<double> wpsi(n_psi), cpsi(n_psi), spsi(n_psi), dpsi(n_psi);
  for (int l = 0; l < n_psi; ++l) {
    const double psi = 0.5 * pi * (1.0 + gj.x[l]);
    const double d = 2.0 * std::sin(0.5 * psi);
    wpsi[l] = gj.w[l] * std::pow(0.5 * pi, 1.0 - alpha) * std::pow(d / psi, -alpha) * std::cos(0.5 * psi) *
              (2.0 * pi / n_beta);
    cpsi[l] = std::cos(psi);
    spsi[l] = std::sin(psi);
    dpsi[l] = d;
  }
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    const Point& x = r.x[i];
    const double rho = std::hypot(x[0], x[1]);
    const double ph = std::atan2(x[1], x[0]);
    const double c = x[2], s = rho;
    const Point e1{c * std::cos(ph), c * std::sin(ph), -s};
    const Point e2{-std::sin(ph), std::cos(ph), 0.0};
    for (int l = 0; l < n_psi; ++l) {
      for (int m = 0; m < n_beta; ++m) {
        const double be = 2.0 * pi * m / n_beta;
        const double cb = std::cos(be), sb = std::sin(be);
        const std::size_t p = i * r.ny + static_cast<std::size_t>(l) * n_beta + m;
        for (int d = 0; d < 3; ++d) r.y[p][d] = cpsi[l] * x[d] + spsi[l] * (cb * e1[d] + sb * e2[d]);
        r.wy[p] = wpsi[l];
        r.dist[p] = dpsi[l];
      }
    }
  }
  return r;
}

}  // namespace

std::shared_ptr<const PairRule> pair_rule(int n, double alpha, int resolution) {
  check_order(alpha);
  if (n != 2 && n != 3) throw std::invalid_argument("pair_rule: n must be 2 or 3");
  if (n == 2 && (resolution < 4 || resolution % 2 != 0))
    throw std::invalid_argument("pair_rule: circle resolution must be even and >= 4");
  if (n == 3 && resolution < 2) throw std::invalid_argument("pair_rule: sphere resolution must be >= 2");

  static std::mutex mu;
  static std::map<std::tuple<int, double, int>, std::shared_ptr<const PairRule>> cache;
  const auto key = std::make_tuple(n, alpha, resolution);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    if (cache.size() > 64) cache.clear();
  }
  auto rule = std::make_shared<const PairRule>(n == 2 ? build_circle(alpha, resolution) : build_sphere(alpha, resolution));
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, rule).first->second;
}

int default_pair_resolution(int n, int K) {
  if (n == 2) return std::max(64, 16 * std::max(K, 1));
  return std::max(12, 2 * K + 8);
}

int coarse_pair_resolution(int n, int resolution) {
  if (n == 2) {
    int h = resolution / 2;
    if (h % 2) ++h;
    return std::max(4, h);
  }
  return std::max(2, (3 * resolution) / 4);
}

}  // namespace fracstab

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracstab/experiments.hpp"
#include "fracstab/functionals.hpp"
#include "fracstab/geometry.hpp"
#include "fracstab/specfun.hpp"
#include "fracstab/sphere.hpp"

using namespace fracstab;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

SphereFunction shape2(int K = 4) {
  SphereFunction u(2, K);
  u.coeff(2, 1) = 0.02;
  u.coeff(3, 2) = -0.015;
  u.coeff(4, 1) = 0.01;
  return u;
}

SphereFunction direction2(int K = 4) {
  SphereFunction p(2, K);
  p.coeff(0, 1) = 0.3;
  p.coeff(1, 2) = -0.2;
  p.coeff(2, 2) = 0.5;
  p.coeff(4, 1) = 0.25;
  return p;
}

double P(const SphereFunction& u, double alpha) { return fractional_perimeter(NearlySphericalSet(u), alpha).value; }

SphereFunction translated_ball(double e) {
  const QuadratureGrid g = make_grid(2, 256);
  std::vector<double> s(g.size());
  for (std::size_t j = 0; j < g.size(); ++j)
    s[j] = e * g.nodes[j][0] + std::sqrt(1.0 - e * e * g.nodes[j][1] * g.nodes[j][1]) - 1.0;
  return analyze(s, g, 40);
}

}  // namespace

TEST_CASE("radial kernel equals the Euclidean kernel between scaled points") {
  const Point x{0.6, 0.8, 0.0};
  const Point y{std::cos(2.1), std::sin(2.1), 0.0};
  const double d = std::hypot(x[0] - y[0], x[1] - y[1]);
  for (int n : {2, 3})
    for (double alpha : {0.2, 0.7}) {
      const double r = 1.1, rho = 0.93;
      const double e = std::hypot(r * x[0] - rho * y[0], r * x[1] - rho * y[1]);
      CHECK(kernel_F(d, r, rho, n, alpha) == Approx(std::pow(r * rho, n - 1) * std::pow(e, -(n + alpha))).epsilon(1e-14));
    }
}

TEST_CASE("kernel derivatives") {
  const double d = 0.4, a = 1.05, b = 0.97, h = 1e-6;
  for (int n : {2, 3}) {
    const double alpha = 0.45;
    const double fd = (kernel_F(d, a + h, b, n, alpha) - kernel_F(d, a - h, b, n, alpha)) / (2 * h);
    CHECK(kernel_dF(d, a, b, n, alpha) == Approx(fd).epsilon(1e-8));
    CHECK(kernel_G(d, a, b, n, alpha) == Approx(kernel_G(d, b, a, n, alpha)).epsilon(1e-15));
    CHECK(kernel_G(d, a, b, n, alpha) ==
          Approx(kernel_dF(d, a, b, n, alpha) + kernel_dF(d, b, a, n, alpha)).epsilon(1e-15));
  }
}

TEST_CASE("perimeter of balls") {
  for (double alpha : {0.25, 0.5, 0.75}) {
    CHECK(P(SphereFunction(2, 2), alpha) == Approx(perimeter_ball(2, alpha)).epsilon(1e-12));
    const double c = 0.08;
    CHECK(P(SphereFunction::constant(2, 2, c), alpha) ==
          Approx(std::pow(1.0 + c, 2.0 - alpha) * perimeter_ball(2, alpha)).epsilon(1e-12));
  }
  CHECK(P(SphereFunction(3, 1), 0.5) == Approx(perimeter_ball(3, 0.5)).epsilon(1e-10));
  CHECK(P(SphereFunction::constant(3, 1, -0.05), 0.5) ==
        Approx(std::pow(0.95, 2.5) * perimeter_ball(3, 0.5)).epsilon(1e-10));
}

TEST_CASE("perimeter is translation and rotation invariant") {
  const SphereFunction t = translated_ball(0.04);
  QuadratureOptions opt;
  opt.resolution = 256;
  CHECK(fractional_perimeter(NearlySphericalSet(t), 0.5, opt).value == Approx(perimeter_ball(2, 0.5)).epsilon(1e-12));

  // rotating by angle g maps (cos k, sin k) coefficients through a rotation by k g
  const SphereFunction u = shape2();
  SphereFunction v = u;
  const double g = 0.7;
  for (int k = 1; k <= 4; ++k) {
    const double c = u.coeff(k, 1), s = u.coeff(k, 2);
    v.coeff(k, 1) = c * std::cos(k * g) - s * std::sin(k * g);
    v.coeff(k, 2) = c * std::sin(k * g) + s * std::cos(k * g);
  }
  CHECK(P(v, 0.4) == Approx(P(u, 0.4)).epsilon(1e-12));
}

TEST_CASE("second-order Taylor expansion leaves a cubic remainder") {
  const SphereFunction zero(2, 4), phi = direction2();
  const double alpha = 0.5, P0 = perimeter_ball(2, alpha);
  const double d1 = first_variation_P(zero, phi, alpha).value;
  const double d2 = second_variation_P(zero, phi, alpha).value;
  auto rem = [&](double e) { return std::abs(P(e * phi, alpha) - P0 - e * d1 - 0.5 * e * e * d2); };
  const double r1 = rem(0.04), r2 = rem(0.02);
  CHECK(r1 / r2 == Approx(8.0).epsilon(0.1));
}

TEST_CASE("first and second variations of P match finite differences") {
  const SphereFunction u = shape2(), phi = direction2();
  for (double alpha : {0.25, 0.75}) {
    auto f = [&](double e) { return P(u + e * phi, alpha); };
    CHECK(first_variation_P(u, phi, alpha).value == Approx(richardson_first_derivative(f, 0.0, 0.02)).epsilon(1e-8));
    CHECK(second_variation_P(u, phi, alpha).value == Approx(richardson_second_derivative(f, 0.0, 0.04)).epsilon(1e-6));
  }
}

TEST_CASE("second variation of P at the ball is diagonal in harmonics") {
  const double alpha = 0.6;
  const double area_coeff = (2 - alpha) * (1 - alpha) * perimeter_ball(2, alpha) / sphere_area(2);
  const SphereFunction zero(2, 5);
  for (int k = 0; k <= 5; ++k) {
    const auto Y = SphereFunction::harmonic(2, 5, k, 1);
    CHECK(second_variation_P(zero, Y, alpha).value == Approx(area_coeff + lambda_eigenvalue(2, alpha, k)).epsilon(1e-9));
  }
}

TEST_CASE("ratio at the ball") {
  CHECK(ratio_F_ball({2, 0.25, 0.75}) == Approx(2.35012837459302).epsilon(1e-13));
  CHECK(ratio_F(NearlySphericalSet(SphereFunction(2, 3)), {2, 0.25, 0.75}).value ==
        Approx(ratio_F_ball({2, 0.25, 0.75})).epsilon(1e-12));
  // dilation invariance
  CHECK(ratio_F(NearlySphericalSet(SphereFunction::constant(2, 3, 0.1)), {2, 0.25, 0.75}).value ==
        Approx(ratio_F_ball({2, 0.25, 0.75})).epsilon(1e-12));
  CHECK(ratio_F(NearlySphericalSet(translated_ball(0.03)), {2, 0.3, 0.6}).value ==
        Approx(ratio_F_ball({2, 0.3, 0.6})).epsilon(1e-11));
}

TEST_CASE("the ball is critical and F is scale invariant to first order") {
  const FracParams p{2, 0.25, 0.75};
  const SphereFunction zero(2, 5);
  for (int k = 0; k <= 5; ++k)
    for (int i = 1; i <= (k == 0 ? 1 : 2); ++i)
      CHECK(std::abs(first_variation_F(zero, SphereFunction::harmonic(2, 5, k, i), p).value) < 1e-10);
  // (1+u)(1+e) - 1 = u + e (1 + u) is a dilation of E_u
  const SphereFunction u = shape2();
  const SphereFunction dil = SphereFunction::constant(2, 4, 1.0) + u;
  CHECK(std::abs(first_variation_F(u, dil, p).value) < 1e-10);
  CHECK(std::abs(second_variation_F(u, dil, p).value) < 1e-8);
}

TEST_CASE("second variation of F: quadrature against spectral and finite differences") {
  const FracParams p{2, 0.25, 0.75};
  const SphereFunction zero(2, 4), phi = direction2();
  CHECK(second_variation_F(zero, phi, p).value == Approx(second_variation_F_at_zero(phi, p)).epsilon(1e-9));

  const SphereFunction u = shape2();
  auto f = [&](double e) { return ratio_F(NearlySphericalSet(u + e * phi), p).value; };
  CHECK(first_variation_F(u, phi, p).value == Approx(richardson_first_derivative(f, 0.0, 0.02)).epsilon(1e-7));
  CHECK(second_variation_F(u, phi, p).value == Approx(richardson_second_derivative(f, 0.0, 0.04)).epsilon(1e-5));
  // the one-argument form differentiates along the ray through u
  auto g = [&](double l) { return ratio_F(NearlySphericalSet(l * u), p).value; };
  CHECK(second_variation_F(u, p).value == Approx(richardson_second_derivative(g, 1.0, 0.1)).epsilon(1e-5));
}

TEST_CASE("spectral second variation ignores constants and translations") {
  const FracParams p{3, 0.3, 0.8};
  SphereFunction phi(3, 3);
  phi.coeff(0, 1) = 1.0;
  phi.coeff(1, 2) = -2.0;
  CHECK(std::abs(second_variation_F_at_zero(phi, p)) < 1e-12);
  phi.coeff(3, 4) = 0.5;
  CHECK(second_variation_F_at_zero(phi, p) > 0.0);
}

TEST_CASE("refining the pair rule converges and the estimate tracks the error") {
  const SphereFunction u = shape2();
  QuadratureOptions coarse, fine;
  coarse.resolution = 64;
  fine.resolution = 512;
  const auto a = fractional_perimeter(NearlySphericalSet(u), 0.5, coarse);
  const auto b = fractional_perimeter(NearlySphericalSet(u), 0.5, fine);
  CHECK(std::abs(a.value - b.value) <= 10.0 * a.error_estimate + 1e-12);
  CHECK(b.error_estimate <= a.error_estimate + 1e-12);
  CHECK(b.value == Approx(P(u, 0.5)).epsilon(1e-11));
}

TEST_CASE("error estimate shrinks fast under refinement") {
  const NearlySphericalSet E(shape2());
  std::vector<double> est;
  for (int res : {16, 32, 64}) {
    QuadratureOptions o;
    o.resolution = res;
    o.rel_tol = 1.0;
    est.push_back(fractional_perimeter(E, 0.5, o).error_estimate);
  }
  CHECK(std::log2(est[0] / est[1]) >= 1.5);
  CHECK(std::log2(est[1] / est[2]) >= 1.5);
}

TEST_CASE("second variation of P stays comparable along a ray") {
  const SphereFunction u = (0.05 / c1_norm_estimate(shape2())) * shape2();
  for (double alpha : {0.25, 0.75}) {
    const double h = sobolev_norm_squared(u, alpha);
    std::vector<double> r;
    for (double l : {0.0, 0.25, 0.5, 0.75, 1.0}) r.push_back(second_variation_P(l * u, u, alpha).value / h);
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    CHECK(*lo > 0.0);
    CHECK(*hi / *lo < 1.2);
  }
}

TEST_CASE("deficit of a degree-2 mode is quadratic with a cubic remainder") {
  const FracParams p{2, 0.25, 0.75};
  const SphereFunction Y = SphereFunction::harmonic(2, 2, 2, 1);
  const double F0 = ratio_F_ball(p);
  const double coeff = 0.5 * F0 / sphere_area(2) * (-(p.t - p.s) + A_coefficient(2, p.t, 2) - A_coefficient(2, p.s, 2));
  auto rem = [&](double e) {
    return std::abs(ratio_F(NearlySphericalSet(e * Y), p).value - F0 - coeff * e * e);
  };
  const double r1 = rem(0.04), r2 = rem(0.02), r3 = rem(0.01);
  CHECK(std::log2(r1 / r2) >= 2.8);
  CHECK(std::log2(r2 / r3) >= 2.8);
  CHECK(ratio_F(NearlySphericalSet(SphereFunction(2, 2)), p).value - F0 == Approx(0.0).scale(1.0));
}

TEST_CASE("variation report") {
  const FracParams p{2, 0.25, 0.75};
  const auto rep = variation_report(SphereFunction(2, 4), direction2(), p);
  CHECK(rep.has_spectral);
  CHECK(rep.second == Approx(rep.second_spectral).epsilon(1e-9));
  const auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j.contains("value"));
  CHECK(j.contains("second"));
  CHECK(j["value"]["value"].get<double>() == Approx(ratio_F_ball(p)));
  CHECK(j["value"]["method"] == "quadrature");
  CHECK(j["second_spectral"]["method"] == "spectral");
  CHECK_FALSE(variation_report(shape2(), direction2(), p).has_spectral);
}

#include "fracstab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <json.hpp>
#include <stdexcept>

#include "fracstab/error.hpp"
#include "fracstab/pair_rule.hpp"
#include "fracstab/quadrature.hpp"
#include "fracstab/specfun.hpp"

namespace fracstab {

namespace {

// Kernels scaled by dist^{n+alpha}; w2 = ((a - b)/dist)^2 is passed in already formed
// so that near-diagonal pairs never divide a small difference by a small distance twice.
struct HatKernel {
  int n;
  double p;

  double F(double a, double b, double w2) const {
    const double ab = a * b;
    return std::pow(ab, n - 1) * std::exp(-p * std::log(w2 + ab));
  }
  double G(double a, double b, double w2) const {
    const double ab = a * b;
    const double D = w2 + ab;
    return F(a, b, w2) * ((n - 1) * (a + b) / ab - p * (a + b) / D);
  }
};

struct Samples {
  std::vector<double> ux, uy, px, py;
};

Samples sample_pairs(const PairRule& rule, const SphereFunction& u, const SphereFunction* phi) {
  Samples s;
  s.ux = u.samples(rule.x);
  s.uy = u.samples(rule.y);
  if (phi) {
    s.px = phi->samples(rule.x);
    s.py = phi->samples(rule.y);
  }
  return s;
}

struct Assembled {
  double value = 0.0;
  double magnitude = 0.0;  // same sum over absolute values, sets the round-off floor
};

// sum_i wx_i [ area(i) + sum_j wy_ij pair(i, j) ]
template <class Area, class Pair>
Assembled assemble(const PairRule& rule, Area area, Pair pair) {
  std::vector<double> outer(rule.x.size()), inner(rule.ny), outer_abs(rule.x.size()), inner_abs(rule.ny);
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    for (std::size_t j = 0; j < rule.ny; ++j) {
      const std::size_t k = i * rule.ny + j;
      inner[j] = rule.wy[k] * pair(i, k, rule.dist[k]);
      inner_abs[j] = std::abs(inner[j]);
    }
    const double a = area(i);
    outer[i] = rule.wx[i] * (a + pairwise_sum(inner));
    outer_abs[i] = std::abs(rule.wx[i]) * (std::abs(a) + pairwise_sum(inner_abs));
  }
  return {pairwise_sum(outer), pairwise_sum(outer_abs)};
}

int resolve_resolution(const QuadratureOptions& opt, int n, int K) {
  return opt.resolution > 0 ? opt.resolution : default_pair_resolution(n, K);
}

template <class Eval>
ScalarResult with_estimate(const QuadratureOptions& opt, int n, int K, const char* what, Eval eval) {
  const int res = resolve_resolution(opt, n, K);
  ScalarResult r;
  const Assembled fine = eval(res);
  r.value = fine.value;
  if (opt.estimate_error) {
    r.error_estimate = std::abs(r.value - eval(coarse_pair_resolution(n, res)).value);
    const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * fine.magnitude;
    if (r.error_estimate > opt.rel_tol * std::abs(r.value) + roundoff)
      throw QuadratureError(std::string(what) + ": error estimate above tolerance", r.error_estimate, opt.rel_tol);
  }
  return r;
}

void require_same_dim(const SphereFunction& u, const SphereFunction& phi) {
  if (u.n() != phi.n()) throw std::invalid_argument("dimension mismatch between u and phi");
  if (u.n() != 2 && u.n() != 3) throw std::invalid_argument("quadrature functionals support n = 2 or 3");
}

}  // namespace

double kernel_F(double dist, double r, double rho, int n, double alpha) {
  if (dist == 0.0 && r == rho) throw std::domain_error("kernel_F: singular configuration");
  const double D = (r - rho) * (r - rho) + r * rho * dist * dist;
  return std::pow(r * rho, n - 1) / std::pow(D, 0.5 * (n + alpha));
}

double kernel_dF(double dist, double a, double b, int n, double alpha) {
  if (dist == 0.0 && a == b) throw std::domain_error("kernel_dF: singular configuration");
  const double D = (a - b) * (a - b) + a * b * dist * dist;
  const double p = 0.5 * (n + alpha);
  return kernel_F(dist, a, b, n, alpha) * ((n - 1) / a - p * (2.0 * (a - b) + b * dist * dist) / D);
}

double kernel_G(double dist, double a, double b, int n, double alpha) {
  return kernel_dF(dist, a, b, n, alpha) + kernel_dF(dist, b, a, n, alpha);
}

ScalarResult fractional_perimeter(const NearlySphericalSet& E, double alpha, const QuadratureOptions& opt) {
  check_order(alpha);
  const SphereFunction& u = E.u();
  const int n = u.n();
  const double scale = perimeter_ball(n, alpha) / sphere_area(n);
  const HatKernel H{n, 0.5 * (n + alpha)};
  const Rule1D gl = gauss_legendre(opt.box_order);
  std::vector<double> t(gl.size()), wt(gl.size());
  for (std::size_t a = 0; a < gl.size(); ++a) {
    t[a] = 0.5 * (1.0 + gl.x[a]);
    wt[a] = 0.5 * gl.w[a];
  }
  auto eval = [&](int res) {
    const auto rule = pair_rule(n, alpha, res);
    const Samples s = sample_pairs(*rule, u, nullptr);
    auto area = [&](std::size_t i) { return scale * std::pow(1.0 + s.ux[i], n - alpha); };
    auto pair = [&](std::size_t i, std::size_t k, double d) {
      const double delta = s.ux[i] - s.uy[k];
      if (delta == 0.0) return 0.0;
      const double q = delta / d;
      const double q2 = q * q;
      const double ry = 1.0 + s.uy[k];
      double box = 0.0;
      for (std::size_t a = 0; a < t.size(); ++a) {
        const double ra = ry + delta * t[a];
        double row = 0.0;
        for (std::size_t b = 0; b < t.size(); ++b) {
          const double dt = t[a] - t[b];
          row += wt[b] * H.F(ra, ry + delta * t[b], q2 * dt * dt);
        }
        box += wt[a] * row;
      }
      return 0.5 * q2 * box;
    };
    return assemble(*rule, area, pair);
  };
  return with_estimate(opt, n, u.K(), "fractional_perimeter", eval);
}

ScalarResult first_variation_P(const SphereFunction& u, const SphereFunction& phi, double alpha,
                               const QuadratureOptions& opt) {
  check_order(alpha);
  require_same_dim(u, phi);
  const int n = u.n();
  const double scale = (n - alpha) * perimeter_ball(n, alpha) / sphere_area(n);
  const HatKernel H{n, 0.5 * (n + alpha)};
  const Rule1D gl = gauss_legendre(opt.box_order);
  auto eval = [&](int res) {
    const auto rule = pair_rule(n, alpha, res);
    const Samples s = sample_pairs(*rule, u, &phi);
    auto area = [&](std::size_t i) { return scale * s.px[i] * std::pow(1.0 + s.ux[i], n - alpha - 1.0); };
    auto pair = [&](std::size_t i, std::size_t k, double d) {
      const double delta = s.ux[i] - s.uy[k];
      const double q = delta / d;
      const double q2 = q * q;
      const double rx = 1.0 + s.ux[i], ry = 1.0 + s.uy[k];
      if (delta == 0.0) {
        // the bracket reduces to (phi_x - phi_y) F(r, r) and the prefactor vanishes
        return 0.0;
      }
      double acc = 0.0;
      for (std::size_t b = 0; b < gl.size(); ++b) {
        const double tb = 0.5 * (1.0 + gl.x[b]);
        const double rb = ry + delta * tb;
        const double one = 1.0 - tb;
        acc += 0.5 * gl.w[b] * (s.px[i] * H.F(rx, rb, q2 * one * one) - s.py[k] * H.F(ry, rb, q2 * tb * tb));
      }
      return q / d * acc;
    };
    return assemble(*rule, area, pair);
  };
  return with_estimate(opt, n, std::max(u.K(), phi.K()), "first_variation_P", eval);
}

ScalarResult second_variation_P(const SphereFunction& u, const SphereFunction& phi, double alpha,
                                const QuadratureOptions& opt) {
  check_order(alpha);
  require_same_dim(u, phi);
  const int n = u.n();
  const double scale = (n - alpha) * (n - alpha - 1.0) * perimeter_ball(n, alpha) / sphere_area(n);
  const HatKernel H{n, 0.5 * (n + alpha)};
  const Rule1D gl = gauss_legendre(opt.box_order);
  auto eval = [&](int res) {
    const auto rule = pair_rule(n, alpha, res);
    const Samples s = sample_pairs(*rule, u, &phi);
    auto area = [&](std::size_t i) {
      return scale * s.px[i] * s.px[i] * std::pow(1.0 + s.ux[i], n - alpha - 2.0);
    };
    auto pair = [&](std::size_t i, std::size_t k, double d) {
      const double delta = s.ux[i] - s.uy[k];
      const double q = delta / d;
      const double q2 = q * q;
      const double rx = 1.0 + s.ux[i], ry = 1.0 + s.uy[k];
      const double dphi = (s.px[i] - s.py[k]) / d;
      double val = dphi * dphi * H.F(rx, ry, q2);
      if (delta != 0.0) {
        double gx = 0.0, gy = 0.0;
        for (std::size_t b = 0; b < gl.size(); ++b) {
          const double tb = 0.5 * (1.0 + gl.x[b]);
          const double rb = ry + delta * tb;
          const double one = 1.0 - tb;
          gx += 0.5 * gl.w[b] * H.G(rx, rb, q2 * one * one);
          gy += 0.5 * gl.w[b] * H.G(ry, rb, q2 * tb * tb);
        }
        val += q / d * (s.px[i] * s.px[i] * gx - s.py[k] * s.py[k] * gy);
      }
      return val;
    };
    return assemble(*rule, area, pair);
  };
  return with_estimate(opt, n, std::max(u.K(), phi.K()), "second_variation_P", eval);
}

double ratio_F_ball(const FracParams& p) {
  return std::pow(perimeter_ball(p.n, p.t), 1.0 / (p.n - p.t)) / std::pow(perimeter_ball(p.n, p.s), 1.0 / (p.n - p.s));
}

ScalarResult ratio_F(const NearlySphericalSet& E, const FracParams& p, const QuadratureOptions& opt) {
  if (E.n() != p.n) throw std::invalid_argument("ratio_F: dimension mismatch");
  const auto Pt = fractional_perimeter(E, p.t, opt);
  const auto Ps = fractional_perimeter(E, p.s, opt);
  ScalarResult r;
  r.value = std::pow(Pt.value, 1.0 / (p.n - p.t)) / std::pow(Ps.value, 1.0 / (p.n - p.s));
  r.error_estimate =
      r.value * (Pt.error_estimate / ((p.n - p.t) * Pt.value) + Ps.error_estimate / ((p.n - p.s) * Ps.value));
  return r;
}

ScalarResult first_variation_F(const SphereFunction& u, const SphereFunction& phi, const FracParams& p,
                               const QuadratureOptions& opt) {
  const NearlySphericalSet E(u);
  const auto F = ratio_F(E, p, opt);
  const auto Pt = fractional_perimeter(E, p.t, opt);
  const auto Ps = fractional_perimeter(E, p.s, opt);
  const auto dt = first_variation_P(u, phi, p.t, opt);
  const auto ds = first_variation_P(u, phi, p.s, opt);
  const double a = dt.value / ((p.n - p.t) * Pt.value);
  const double b = ds.value / ((p.n - p.s) * Ps.value);
  ScalarResult r;
  r.value = F.value * (a - b);
  r.error_estimate = F.value * (dt.error_estimate / ((p.n - p.t) * Pt.value) +
                                ds.error_estimate / ((p.n - p.s) * Ps.value)) +
                     std::abs(a - b) * F.error_estimate;
  return r;
}

double second_variation_F_at_zero(const SphereFunction& phi, const FracParams& p) {
  const int n = phi.n();
  if (n != p.n) throw std::invalid_argument("second_variation_F_at_zero: dimension mismatch");
  const double F0 = ratio_F_ball(p);
  const double semi_t = seminorm_gagliardo(phi, p.t, SeminormMethod::spectral).value;
  const double semi_s = seminorm_gagliardo(phi, p.s, SeminormMethod::spectral).value;
  const double area = sphere_area(n);
  const double a0 = phi.coeffs()[0];
  const double variance = (phi.l2_norm_squared() - a0 * a0) / area;
  return F0 * (semi_t / ((n - p.t) * perimeter_ball(n, p.t)) - semi_s / ((n - p.s) * perimeter_ball(n, p.s)) -
               (p.t - p.s) * variance);
}

ScalarResult second_variation_F(const SphereFunction& u, const SphereFunction& phi, const FracParams& p,
                                const QuadratureOptions& opt) {
  const NearlySphericalSet E(u);
  const auto Pt = fractional_perimeter(E, p.t, opt);
  const auto Ps = fractional_perimeter(E, p.s, opt);
  const auto dt = first_variation_P(u, phi, p.t, opt);
  const auto ds = first_variation_P(u, phi, p.s, opt);
  const auto ddt = second_variation_P(u, phi, p.t, opt);
  const auto dds = second_variation_P(u, phi, p.s, opt);
  const double nt = p.n - p.t, ns = p.n - p.s;
  const double F = std::pow(Pt.value, 1.0 / nt) / std::pow(Ps.value, 1.0 / ns);
  const double a = dt.value / (nt * Pt.value);
  const double b = ds.value / (ns * Ps.value);
  const double bracket =
      (a - b) * (a - b) + ddt.value / (nt * Pt.value) - nt * a * a - dds.value / (ns * Ps.value) + ns * b * b;
  ScalarResult r;
  r.value = F * bracket;
  const double ea = dt.error_estimate / (nt * Pt.value), eb = ds.error_estimate / (ns * Ps.value);
  r.error_estimate = F * (ddt.error_estimate / (nt * Pt.value) + dds.error_estimate / (ns * Ps.value) +
                          (2.0 * std::abs(a - b) + 2.0 * nt * std::abs(a)) * ea +
                          (2.0 * std::abs(a - b) + 2.0 * ns * std::abs(b)) * eb) +
                     std::abs(bracket) * F * (Pt.error_estimate / (nt * Pt.value) + Ps.error_estimate / (ns * Ps.value));
  return r;
}

VariationReport variation_report(const SphereFunction& u, const SphereFunction& phi, const FracParams& p,
                                 const QuadratureOptions& opt) {
  VariationReport rep;
  const NearlySphericalSet E(u);
  const auto F = ratio_F(E, p, opt);
  const auto d1 = first_variation_F(u, phi, p, opt);
  const auto d2 = second_variation_F(u, phi, p, opt);
  rep.value = F.value;
  rep.value_error = F.error_estimate;
  rep.first = d1.value;
  rep.first_error = d1.error_estimate;
  rep.second = d2.value;
  rep.second_error = d2.error_estimate;
  bool zero = true;
  for (double c : u.coeffs()) zero = zero && c == 0.0;
  if (zero) {
    rep.has_spectral = true;
    rep.second_spectral = second_variation_F_at_zero(phi, p);
  }
  return rep;
}

std::string VariationReport::to_json() const {
  nlohmann::json j;
  j["value"] = {{"value", value}, {"method", value_method}, {"error_estimate", value_error}};
  j["first"] = {{"value", first}, {"method", first_method}, {"error_estimate", first_error}};
  j["second"] = {{"value", second}, {"method", second_method}, {"error_estimate", second_error}};
  if (has_spectral) j["second_spectral"] = {{"value", second_spectral}, {"method", "spectral"}, {"error_estimate", 0.0}};
  return j.dump(2);
}

}  // namespace fracstab

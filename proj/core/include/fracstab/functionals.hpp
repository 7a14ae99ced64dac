#pragma once

#include <string>

#include "fracstab/geometry.hpp"
#include "fracstab/params.hpp"
#include "fracstab/sphere.hpp"

namespace fracstab {

/// (r rho)^{n-1} / ((r - rho)^2 + r rho dist^2)^{(n+alpha)/2}
double kernel_F(double dist, double r, double rho, int n, double alpha);
/// Partial derivative of kernel_F in its first radial argument.
double kernel_dF(double dist, double a, double b, int n, double alpha);
/// kernel_dF(a, b) + kernel_dF(b, a)
double kernel_G(double dist, double a, double b, int n, double alpha);

struct QuadratureOptions {
  int resolution = 0;      // 0 picks default_pair_resolution for the band limit
  int box_order = 12;      // Gauss-Legendre order of the inner radial integrals
  double rel_tol = 1e-7;   // on the fine/coarse difference
  bool estimate_error = true;
};

struct ScalarResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

ScalarResult fractional_perimeter(const NearlySphericalSet& E, double alpha, const QuadratureOptions& opt = {});
/// delta P_alpha(u)[phi]
ScalarResult first_variation_P(const SphereFunction& u, const SphereFunction& phi, double alpha,
                               const QuadratureOptions& opt = {});
/// delta^2 P_alpha(u)[phi, phi]
ScalarResult second_variation_P(const SphereFunction& u, const SphereFunction& phi, double alpha,
                                const QuadratureOptions& opt = {});

/// F(B) from the closed-form ball perimeters.
double ratio_F_ball(const FracParams& p);
ScalarResult ratio_F(const NearlySphericalSet& E, const FracParams& p, const QuadratureOptions& opt = {});

/// delta F(u)[phi]
ScalarResult first_variation_F(const SphereFunction& u, const SphereFunction& phi, const FracParams& p,
                               const QuadratureOptions& opt = {});
/// delta^2 F(0)[phi, phi], spectral.
double second_variation_F_at_zero(const SphereFunction& phi, const FracParams& p);
/// delta^2 F(u)[phi, phi] assembled from perimeter values and variations at u.
ScalarResult second_variation_F(const SphereFunction& u, const SphereFunction& phi, const FracParams& p,
                                const QuadratureOptions& opt = {});
/// delta^2 F(u)[u, u], the second derivative of lambda -> F(lambda u) at lambda = 1.
inline ScalarResult second_variation_F(const SphereFunction& u, const FracParams& p,
                                       const QuadratureOptions& opt = {}) {
  return second_variation_F(u, u, p, opt);
}

struct VariationReport {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
  double value_error = 0.0;
  double first_error = 0.0;
  double second_error = 0.0;
  std::string value_method = "quadrature";
  std::string first_method = "quadrature";
  std::string second_method = "quadrature";
  double second_spectral = 0.0;  // delta^2 F(0)[phi, phi]
  bool has_spectral = false;

  std::string to_json() const;
};

/// F(u), delta F(u)[phi] and delta^2 F(u)[phi, phi]; adds the spectral value when u = 0.
VariationReport variation_report(const SphereFunction& u, const SphereFunction& phi, const FracParams& p,
                                 const QuadratureOptions& opt = {});

}  // namespace fracstab

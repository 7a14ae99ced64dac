#pragma once

#include <vector>

#include "fracstab/sphere.hpp"

namespace fracstab {

// Star-shaped set whose boundary is {(1 + u(x)) x : x on the unit sphere}.
class NearlySphericalSet {
 public:
  explicit NearlySphericalSet(SphereFunction u);
  const SphereFunction& u() const { return u_; }
  int n() const { return u_.n(); }

 private:
  SphereFunction u_;
};

/// Grid on which (1+u)^{n+1} x_i is integrated exactly for band limit K.
QuadratureGrid geometry_grid(int n, int K);

double volume(const NearlySphericalSet& E);
/// First moment (1/(n+1)) int x (1+u)^{n+1}; vanishes iff the barycenter does.
Point moment(const NearlySphericalSet& E);
Point barycenter(const NearlySphericalSet& E);

struct ProjectionInfo {
  int iterations = 0;
  double volume_residual = 0.0;
  double moment_residual = 0.0;
};

/// Adjusts degree 0 and degree 1 coefficients so that |E| = |B| and the barycenter is 0.
/// Requires ||u||_inf <= 1/4. Throws ConvergenceError after 50 Newton steps.
SphereFunction project_constraints(const SphereFunction& u, ProjectionInfo* info = nullptr);

struct LowModeConstants {
  double C0 = 0.0;  // |a_0| <= C0 ||u||^2_{L2}
  double C1 = 0.0;  // |a_1^i| <= C1 ||u||^2_{L2}
  double eps0 = 0.0;
};

/// Constants of the low-mode estimate; C1 is evaluated at ||u||_inf = 1/2.
LowModeConstants low_mode_constants(int n, double linf);

struct RegraphResult {
  Point y{0.0, 0.0, 0.0};
  double r = 1.0;
  SphereFunction v;
  double c1_u = 0.0;
  double c1_v = 0.0;
  double c1_ratio = 0.0;          // c1_v / c1_u (0 when u = 0)
  double boundary_residual = 0.0; // max |r(1+v(z))z + y - (1+u)x| over the check grid
  double min_jacobian = 0.0;      // smallest Jacobian determinant of x -> z(x)
};

/// Rewrites E_u as a graph over the ball with the same volume and barycenter.
/// Throws DiffeomorphismError when x -> z(x) fails to be orientation preserving.
RegraphResult regraph(const SphereFunction& u, int Kv = 0);

struct AsymmetryResult {
  double value = 0.0;
  Point center{0.0, 0.0, 0.0};
  double tolerance = 0.0;  // simplex spread in objective value at termination
  int evaluations = 0;
};

/// inf over centers of |E delta B_c| / |E| with |B_c| = |E|, by Nelder-Mead from the barycenter.
AsymmetryResult fraenkel_asymmetry(const NearlySphericalSet& E, int directions = 0);

/// |E delta B_c| / |E| for a fixed center.
double symmetric_difference_ratio(const NearlySphericalSet& E, const Point& c, int directions = 0);

}  // namespace fracstab

#include "fracstab/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fracstab/error.hpp"
#include "fracstab/quadrature.hpp"
#include "fracstab/specfun.hpp"

namespace fracstab {

using std::numbers::pi;

namespace {

double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Point& a) { return std::sqrt(dot(a, a)); }

Point normalized(const Point& a) {
  const double r = norm(a);
  return {a[0] / r, a[1] / r, a[2] / r};
}

// Oriented tangent basis at a unit vector: n = 2 -> one vector, n = 3 -> (e_theta, e_phi).
int tangent_frame(int n, const Point& x, Point* e) {
  if (n == 2) {
    e[0] = {-x[1], x[0], 0.0};
    return 1;
  }
  const double rho = std::hypot(x[0], x[1]);
  const double ph = std::atan2(x[1], x[0]);
  const double c = x[2], s = rho;
  e[0] = {c * std::cos(ph), c * std::sin(ph), -s};
  e[1] = {-std::sin(ph), std::cos(ph), 0.0};
  return 2;
}

// Boundary point P(x) = (1 + u(x)) x - y and the derivative of z = P/|P| in tangent frames.
struct DirectionMap {
  const SphereFunction& u;
  Point y;

  Point P(const Point& x, double* ux = nullptr, Point* gu = nullptr) const {
    Point g;
    const double v = u.evaluate(x, g);
    if (ux) *ux = v;
    if (gu) *gu = g;
    return {(1.0 + v) * x[0] - y[0], (1.0 + v) * x[1] - y[1], (1.0 + v) * x[2] - y[2]};
  }

  // Jacobian of x -> z(x) mapped from the frame at x to the frame at w.
  Eigen::Matrix2d jacobian(int n, const Point& x, const Point& w) const {
    double ux;
    Point gu;
    const Point p = P(x, &ux, &gu);
    const double pn = norm(p);
    const Point z{p[0] / pn, p[1] / pn, p[2] / pn};
    Point ex[2], ew[2];
    const int m = tangent_frame(n, x, ex);
    tangent_frame(n, w, ew);
    Eigen::Matrix2d J = Eigen::Matrix2d::Identity();
    for (int a = 0; a < m; ++a) {
      // dP along ex[a] = (grad u . ex[a]) x + (1+u) ex[a]
      const double gd = dot(gu, ex[a]);
      Point dp{gd * x[0] + (1.0 + ux) * ex[a][0], gd * x[1] + (1.0 + ux) * ex[a][1], gd * x[2] + (1.0 + ux) * ex[a][2]};
      const double zd = dot(z, dp);
      for (int c = 0; c < 3; ++c) dp[c] = (dp[c] - zd * z[c]) / pn;
      for (int b = 0; b < m; ++b) J(b, a) = dot(ew[b], dp);
    }
    return J;
  }

  // Solve z(x) = w by Newton seeded at x = w.
  Point invert(int n, const Point& w) const {
    Point x = w;
    Point ew[2];
    const int m = tangent_frame(n, w, ew);
    for (int it = 0; it < 60; ++it) {
      const Point p = P(x);
      const Point z = normalized(p);
      Eigen::Vector2d res = Eigen::Vector2d::Zero();
      for (int b = 0; b < m; ++b) res(b) = dot(ew[b], z);
      if (res.head(m).norm() < 1e-15) break;
      const Eigen::Matrix2d J = jacobian(n, x, w);
      Eigen::Vector2d step = Eigen::Vector2d::Zero();
      if (m == 1)
        step(0) = res(0) / J(0, 0);
      else
        step = J.partialPivLu().solve(res);
      Point ex[2];
      tangent_frame(n, x, ex);
      Point xn = x;
      for (int a = 0; a < m; ++a)
        for (int c = 0; c < 3; ++c) xn[c] -= step(a) * ex[a][c];
      x = normalized(xn);
      if (step.head(m).norm() < 1e-16) break;
    }
    return x;
  }
};

}  // namespace

NearlySphericalSet::NearlySphericalSet(SphereFunction u) : u_(std::move(u)) {
  if (u_.n() != 2 && u_.n() != 3) throw std::invalid_argument("NearlySphericalSet: n must be 2 or 3");
  const double m = linf_norm_estimate(u_);
  if (m > 0.5) throw std::invalid_argument("NearlySphericalSet: ||u||_inf must be <= 1/2");
}

QuadratureGrid geometry_grid(int n, int K) {
  if (n == 2) return make_grid(2, 4 * (n + 2) * std::max(K, 1) + 32);
  return make_grid(3, 2 * std::max(K, 1) + 4);
}

namespace {

struct Integrals {
  double vol;
  Point mom;
};

Integrals volume_and_moment(const SphereFunction& u, const QuadratureGrid& g) {
  const int n = u.n();
  const auto s = u.samples(g.nodes);
  std::vector<double> tv(g.size()), tm[3];
  for (auto& t : tm) t.resize(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double r = 1.0 + s[p];
    const double rn = std::pow(r, n);
    tv[p] = g.weights[p] * rn;
    for (int c = 0; c < 3; ++c) tm[c][p] = g.weights[p] * g.nodes[p][c] * rn * r;
  }
  Integrals out;
  out.vol = pairwise_sum(tv) / n;
  for (int c = 0; c < 3; ++c) out.mom[c] = pairwise_sum(tm[c]) / (n + 1);
  return out;
}

}  // namespace

double volume(const NearlySphericalSet& E) {
  return volume_and_moment(E.u(), geometry_grid(E.n(), E.u().K())).vol;
}

Point moment(const NearlySphericalSet& E) {
  return volume_and_moment(E.u(), geometry_grid(E.n(), E.u().K())).mom;
}

Point barycenter(const NearlySphericalSet& E) {
  const auto I = volume_and_moment(E.u(), geometry_grid(E.n(), E.u().K()));
  return {I.mom[0] / I.vol, I.mom[1] / I.vol, I.mom[2] / I.vol};
}

SphereFunction project_constraints(const SphereFunction& u, ProjectionInfo* info) {
  const int n = u.n();
  if (n != 2 && n != 3) throw std::invalid_argument("project_constraints: n must be 2 or 3");
  if (linf_norm_estimate(u) > 0.25) throw std::invalid_argument("project_constraints: need ||u||_inf <= 1/4");
  const int K = std::max(u.K(), 1);
  SphereFunction w = u.with_band(K);
  const auto g = geometry_grid(n, K);
  const double omega = ball_volume(n);
  const int m = n + 1;
  // unknowns: a_0 and the n degree-1 coefficients; equations: volume and n moment components
  std::vector<int> idx(m);
  for (int j = 0; j < m; ++j) idx[j] = j;
  // degree-1 harmonic i is proportional to coordinate comp[i]
  std::vector<std::vector<double>> Yg(g.size(), std::vector<double>(basis_size(n, 1)));
  for (std::size_t p = 0; p < g.size(); ++p) eval_basis(n, 1, g.nodes[p], Yg[p].data());

  auto residual = [&](const SphereFunction& f) {
    const auto I = volume_and_moment(f, g);
    Eigen::VectorXd r(m);
    r(0) = I.vol - omega;
    for (int c = 0; c < n; ++c) r(1 + c) = I.mom[c];
    return r;
  };

  Eigen::VectorXd r = residual(w);
  int it = 0;
  for (; it < 50 && r.norm() > 1e-15; ++it) {
    const auto s = w.samples(g.nodes);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
      std::vector<double> t0(g.size());
      std::vector<std::vector<double>> tc(n, std::vector<double>(g.size()));
      for (std::size_t p = 0; p < g.size(); ++p) {
        const double rr = 1.0 + s[p];
        const double rn1 = std::pow(rr, n - 1);
        t0[p] = g.weights[p] * rn1 * Yg[p][j];
        for (int c = 0; c < n; ++c) tc[c][p] = g.weights[p] * g.nodes[p][c] * rn1 * rr * Yg[p][j];
      }
      J(0, j) = pairwise_sum(t0);
      for (int c = 0; c < n; ++c) J(1 + c, j) = pairwise_sum(tc[c]);
    }
    const Eigen::VectorXd step = J.fullPivLu().solve(r);
    double lam = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      SphereFunction trial = w;
      for (int j = 0; j < m; ++j) trial.coeffs()[idx[j]] -= lam * step(j);
      const Eigen::VectorXd rt = residual(trial);
      if (rt.norm() < r.norm() || rt.norm() < 1e-15) {
        w = std::move(trial);
        r = rt;
        accepted = true;
        break;
      }
      lam *= 0.5;
    }
    if (!accepted) break;
  }
  const double vol_res = std::abs(r(0));
  const double mom_res = r.tail(n).norm();
  if (info) *info = {it, vol_res, mom_res};
  if (vol_res > 1e-12 || mom_res > 1e-12)
    throw ConvergenceError("project_constraints: Newton did not converge (perturbation too large?)");
  return w;
}

LowModeConstants low_mode_constants(int n, double linf) {
  LowModeConstants c;
  const double area = sphere_area(n);
  c.C0 = (n - 1) * std::pow(1.0 + linf, n - 2) / (2.0 * std::sqrt(area));
  c.C1 = 0.5 * n * std::sqrt(n / area) * std::pow(1.5, n - 1);
  c.eps0 = std::sqrt(1.0 / (2.0 * c.C1));
  return c;
}

RegraphResult regraph(const SphereFunction& u, int Kv) {
  const int n = u.n();
  if (n != 2 && n != 3) throw std::invalid_argument("regraph: n must be 2 or 3");
  const NearlySphericalSet E(u);
  RegraphResult res;
  const auto I = volume_and_moment(u, geometry_grid(n, u.K()));
  res.y = {I.mom[0] / I.vol, I.mom[1] / I.vol, I.mom[2] / I.vol};
  res.r = std::pow(I.vol / ball_volume(n), 1.0 / n);
  if (Kv <= 0) Kv = (n == 2) ? std::max(32, 6 * u.K()) : std::max(16, 3 * u.K());

  const DirectionMap map{u, res.y};

  // orientation check on a dense grid
  const auto dense = dense_grid(n, std::max(u.K(), Kv / 2));
  double min_det = 1e300;
  for (const auto& x : dense.nodes) {
    const Point z = normalized(map.P(x));
    const Eigen::Matrix2d J = map.jacobian(n, x, z);
    min_det = std::min(min_det, n == 2 ? J(0, 0) : J.determinant());
  }
  res.min_jacobian = min_det;
  if (!(min_det > 0.0)) throw DiffeomorphismError("regraph: direction map is not a diffeomorphism", min_det);

  const QuadratureGrid ag = make_grid(n, n == 2 ? 4 * Kv : 2 * Kv + 2);
  std::vector<double> vs(ag.size());
  for (std::size_t p = 0; p < ag.size(); ++p) {
    const Point x = map.invert(n, ag.nodes[p]);
    vs[p] = norm(map.P(x)) / res.r - 1.0;
  }
  res.v = analyze(vs, ag, Kv);

  // boundary identity on the geometry grid of u
  const auto cg = geometry_grid(n, u.K());
  double worst = 0.0;
  for (const auto& x : cg.nodes) {
    double ux;
    const Point p = map.P(x, &ux);
    const Point z = normalized(p);
    const double vz = res.v.evaluate(z);
    Point diff;
    for (int c = 0; c < 3; ++c) diff[c] = res.r * (1.0 + vz) * z[c] + res.y[c] - (1.0 + ux) * x[c];
    worst = std::max(worst, norm(diff));
  }
  res.boundary_residual = worst;
  res.c1_u = c1_norm_estimate(u);
  res.c1_v = c1_norm_estimate(res.v);
  res.c1_ratio = res.c1_u > 0.0 ? res.c1_v / res.c1_u : 0.0;
  return res;
}

namespace {

int default_directions(int n) { return n == 2 ? 2048 : 64; }

// Distance from c to the boundary of E along e.
double radial_hit(const SphereFunction& u, const Point& c, const Point& e, double guess) {
  auto g = [&](double rho, double* dg) {
    const Point p{c[0] + rho * e[0], c[1] + rho * e[1], c[2] + rho * e[2]};
    const double pn = norm(p);
    const Point d{p[0] / pn, p[1] / pn, p[2] / pn};
    Point gu;
    const double v = u.evaluate(d, gu);
    // d/drho of the direction is (e - (d.e) d)/|p|
    const double de = dot(d, e);
    const Point dd{(e[0] - de * d[0]) / pn, (e[1] - de * d[1]) / pn, (e[2] - de * d[2]) / pn};
    *dg = de - dot(gu, dd);
    return pn - 1.0 - v;
  };
  double lo = 0.0, hi = 4.0;
  double rho = guess;
  for (int it = 0; it < 60; ++it) {
    double dg;
    const double f = g(rho, &dg);
    if (f < 0.0)
      lo = rho;
    else
      hi = rho;
    if (std::abs(f) < 1e-15) break;
    double nr = rho - f / dg;
    if (!(nr > lo && nr < hi)) nr = 0.5 * (lo + hi);
    if (std::abs(nr - rho) < 1e-15) {
      rho = nr;
      break;
    }
    rho = nr;
  }
  return rho;
}

}  // namespace

double symmetric_difference_ratio(const NearlySphericalSet& E, const Point& c, int directions) {
  const int n = E.n();
  const auto g = make_grid(n, directions > 0 ? directions : default_directions(n));
  const double vol = volume(E);
  const double Rn = vol / ball_volume(n);
  std::vector<double> t(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double rho = radial_hit(E.u(), c, g.nodes[p], std::pow(Rn, 1.0 / n));
    t[p] = g.weights[p] * std::abs(std::pow(rho, n) - Rn) / n;
  }
  return pairwise_sum(t) / vol;
}

AsymmetryResult fraenkel_asymmetry(const NearlySphericalSet& E, int directions) {
  const int n = E.n();
  AsymmetryResult out;
  auto f = [&](const Eigen::VectorXd& c) {
    ++out.evaluations;
    Point p{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) p[i] = c(i);
    return symmetric_difference_ratio(E, p, directions);
  };
  const Point b = barycenter(E);
  const double scale = std::max(1e-3, linf_norm_estimate(E.u()));
  // Nelder-Mead on the center
  std::vector<Eigen::VectorXd> S(n + 1, Eigen::VectorXd::Zero(n));
  for (int i = 0; i < n; ++i) S[0](i) = b[i];
  for (int j = 1; j <= n; ++j) {
    S[j] = S[0];
    S[j](j - 1) += 0.5 * scale;
  }
  std::vector<double> F(n + 1);
  for (int j = 0; j <= n; ++j) F[j] = f(S[j]);
  double spread = 0.0;
  for (int it = 0; it < 400; ++it) {
    std::vector<int> ord(n + 1);
    for (int j = 0; j <= n; ++j) ord[j] = j;
    std::sort(ord.begin(), ord.end(), [&](int a, int b2) { return F[a] < F[b2]; });
    std::vector<Eigen::VectorXd> S2;
    std::vector<double> F2;
    for (int j : ord) {
      S2.push_back(S[j]);
      F2.push_back(F[j]);
    }
    S = S2;
    F = F2;
    double size = 0.0;
    for (int j = 1; j <= n; ++j) size = std::max(size, (S[j] - S[0]).norm());
    spread = F[n] - F[0];
    if (size < 1e-9 || (size < 1e-6 && spread <= 1e-12 * F[0])) break;
    Eigen::VectorXd cen = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) cen += S[j];
    cen /= n;
    const Eigen::VectorXd xr = cen + (cen - S[n]);
    const double fr = f(xr);
    if (fr < F[0]) {
      const Eigen::VectorXd xe = cen + 2.0 * (cen - S[n]);
      const double fe = f(xe);
      if (fe < fr) {
        S[n] = xe;
        F[n] = fe;
      } else {
        S[n] = xr;
        F[n] = fr;
      }
    } else if (fr < F[n - 1]) {
      S[n] = xr;
      F[n] = fr;
    } else {
      const bool outside = fr < F[n];
      const Eigen::VectorXd xc = outside ? Eigen::VectorXd(cen + 0.5 * (xr - cen)) : Eigen::VectorXd(cen + 0.5 * (S[n] - cen));
      const double fc = f(xc);
      if (fc < std::min(fr, F[n])) {
        S[n] = xc;
        F[n] = fc;
      } else {
        for (int j = 1; j <= n; ++j) {
          S[j] = S[0] + 0.5 * (S[j] - S[0]);
          F[j] = f(S[j]);
        }
      }
    }
  }
  int best = static_cast<int>(std::min_element(F.begin(), F.end()) - F.begin());
  out.value = F[best];
  for (int i = 0; i < n; ++i) out.center[i] = S[best](i);
  out.tolerance = spread;
  return out;
}

}  // namespace fracstab

#include "fracstab/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numbers>
#include <stdexcept>

#include "fracstab/error.hpp"
#include "fracstab/pair_rule.hpp"
#include "fracstab/params.hpp"
#include "fracstab/quadrature.hpp"
#include "fracstab/specfun.hpp"

namespace fracstab {

using std::numbers::pi;

namespace {

void require_grid_dim(int n) {
  if (n != 2 && n != 3) throw std::invalid_argument("grid operations support n = 2 or 3 only");
}

void eval_basis_circle(int K, const Point& x, double* Y, Point* grad) {
  const double th = std::atan2(x[1], x[0]);
  const double r0 = 1.0 / std::sqrt(2.0 * pi);
  const double r1 = 1.0 / std::sqrt(pi);
  Y[0] = r0;
  if (grad) grad[0] = {0.0, 0.0, 0.0};
  const double et0 = -std::sin(th), et1 = std::cos(th);
  const double c1 = std::cos(th), s1 = std::sin(th);
  double ck = 1.0, sk = 0.0;
  for (int k = 1; k <= K; ++k) {
    const double cn = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = cn;
    Y[2 * k - 1] = r1 * ck;
    Y[2 * k] = r1 * sk;
    if (grad) {
      const double dc = -k * r1 * sk, ds = k * r1 * ck;
      grad[2 * k - 1] = {dc * et0, dc * et1, 0.0};
      grad[2 * k] = {ds * et0, ds * et1, 0.0};
    }
  }
}

// Fully normalized associated Legendre recursion in k for fixed m. Fills q[k] for
// m <= k <= K and optionally its colatitude derivative dq[k].
void legendre_column(int m, int K, double c, double s, double qmm, double dqmm, double* q, double* dq) {
  q[m] = qmm;
  if (dq) dq[m] = dqmm;
  if (m + 1 <= K) {
    const double f = std::sqrt(2.0 * m + 3.0);
    q[m + 1] = f * c * q[m];
    if (dq) dq[m + 1] = f * (-s * q[m] + c * dq[m]);
  }
  for (int k = m + 2; k <= K; ++k) {
    const double kk = k, mm = m;
    const double a = std::sqrt((4.0 * kk * kk - 1.0) / (kk * kk - mm * mm));
    const double b = std::sqrt(((kk - 1.0) * (kk - 1.0) - mm * mm) / (4.0 * (kk - 1.0) * (kk - 1.0) - 1.0));
    q[k] = a * (c * q[k - 1] - b * q[k - 2]);
    if (dq) dq[k] = a * (-s * q[k - 1] + c * dq[k - 1] - b * dq[k - 2]);
  }
}

void eval_basis_sphere(int K, const Point& x, double* Y, Point* grad) {
  const double rho = std::hypot(x[0], x[1]);
  const double c = x[2] / std::hypot(rho, x[2]);
  const double s = rho / std::hypot(rho, x[2]);
  const double ph = (rho > 0.0) ? std::atan2(x[1], x[0]) : 0.0;
  const double cp = std::cos(ph), sp = std::sin(ph);
  const Point et{c * cp, c * sp, -s};
  const Point ep{-sp, cp, 0.0};

  std::vector<double> q(K + 1), dq(K + 1), r(K + 1);
  // q_m^m = Km s^m, r = q / s (only m >= 1), dq_m^m = m Km s^{m-1} c.
  double km = 1.0 / std::sqrt(4.0 * pi);  // K_0
  double cm = 1.0, sm = 0.0;              // cos(m ph), sin(m ph)
  double spow_m1 = 1.0;                   // s^{m-1} for m >= 1
  for (int m = 0; m <= K; ++m) {
    if (m > 0) {
      km *= std::sqrt((2.0 * m + 1.0) / (2.0 * m));
      const double cn = cm * cp - sm * sp;
      sm = sm * cp + cm * sp;
      cm = cn;
      if (m > 1) spow_m1 *= s;
    }
    const double qmm = (m == 0) ? km : km * spow_m1 * s;
    const double dqmm = (m == 0) ? 0.0 : km * m * spow_m1 * c;
    legendre_column(m, K, c, s, qmm, dqmm, q.data(), grad ? dq.data() : nullptr);
    if (grad && m > 0) legendre_column(m, K, c, s, km * spow_m1, 0.0, r.data(), nullptr);
    for (int k = m; k <= K; ++k) {
      if (m == 0) {
        const int idx = k * k;
        Y[idx] = q[k];
        if (grad) grad[idx] = {dq[k] * et[0], dq[k] * et[1], dq[k] * et[2]};
      } else {
        const double f = std::sqrt(2.0);
        const int ic = k * k + 2 * m - 1, is = k * k + 2 * m;
        Y[ic] = f * q[k] * cm;
        Y[is] = f * q[k] * sm;
        if (grad) {
          // d/dtheta and (1/sin) d/dphi; r = q / sin keeps the poles finite
          const double tc = f * dq[k] * cm, pc = -f * m * r[k] * sm;
          const double ts = f * dq[k] * sm, ps = f * m * r[k] * cm;
          grad[ic] = {tc * et[0] + pc * ep[0], tc * et[1] + pc * ep[1], tc * et[2] + pc * ep[2]};
          grad[is] = {ts * et[0] + ps * ep[0], ts * et[1] + ps * ep[1], ts * et[2] + ps * ep[2]};
        }
      }
    }
  }
}

}  // namespace

QuadratureGrid make_grid(int n, int resolution) {
  require_grid_dim(n);
  if (resolution < 2) throw std::invalid_argument("make_grid: resolution must be >= 2");
  QuadratureGrid g;
  g.n = n;
  if (n == 2) {
    g.n_theta = resolution;
    g.nodes.resize(resolution);
    g.weights.assign(resolution, 2.0 * pi / resolution);
    for (int i = 0; i < resolution; ++i) {
      const double th = 2.0 * pi * i / resolution;
      g.nodes[i] = {std::cos(th), std::sin(th), 0.0};
    }
    return g;
  }
  g.n_theta = resolution;
  g.n_phi = 2 * resolution;
  const Rule1D gl = gauss_legendre(resolution);
  g.nodes.reserve(static_cast<std::size_t>(g.n_theta) * g.n_phi);
  for (int i = 0; i < g.n_theta; ++i) {
    const double c = gl.x[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int j = 0; j < g.n_phi; ++j) {
      const double ph = 2.0 * pi * j / g.n_phi;
      g.nodes.push_back({s * std::cos(ph), s * std::sin(ph), c});
      g.weights.push_back(gl.w[i] * 2.0 * pi / g.n_phi);
    }
  }
  return g;
}

QuadratureGrid dense_grid(int n, int K) {
  if (n == 2) return make_grid(2, std::max(1024, 64 * (K + 1)));
  return make_grid(3, std::max(96, 12 * (K + 1)));
}

int basis_size(int n, int K) {
  if (K < 0) throw std::invalid_argument("band limit must be >= 0");
  if (n == 2) return 2 * K + 1;
  if (n == 3) return (K + 1) * (K + 1);
  std::int64_t total = 0;
  for (int k = 0; k <= K; ++k) total += dim_harmonic(n, k);
  return static_cast<int>(total);
}

int basis_index(int n, int k, int i) {
  if (k < 0 || i < 1 || i > dim_harmonic(n, k)) throw std::out_of_range("basis_index: bad (k, i)");
  if (n == 2) return k == 0 ? 0 : 2 * k - 2 + i;
  if (n == 3) return k * k + i - 1;
  return (k == 0 ? 0 : basis_size(n, k - 1)) + i - 1;
}

void eval_basis(int n, int K, const Point& x, double* Y, Point* grad) {
  require_grid_dim(n);
  if (n == 2)
    eval_basis_circle(K, x, Y, grad);
  else
    eval_basis_sphere(K, x, Y, grad);
}

SphereFunction::SphereFunction(int n, int K) : n_(n), K_(K), a_(basis_size(n, K), 0.0) {
  check_dimension(n);
}

SphereFunction::SphereFunction(int n, int K, std::vector<double> coeffs) : n_(n), K_(K), a_(std::move(coeffs)) {
  check_dimension(n);
  if (static_cast<int>(a_.size()) != basis_size(n, K))
    throw std::invalid_argument("SphereFunction: coefficient count does not match band limit");
}

SphereFunction SphereFunction::harmonic(int n, int K, int k, int i) {
  SphereFunction u(n, K);
  u.coeff(k, i) = 1.0;
  return u;
}

SphereFunction SphereFunction::constant(int n, int K, double c) {
  SphereFunction u(n, K);
  u.a_[0] = c * std::sqrt(sphere_area(n));
  return u;
}

double SphereFunction::evaluate(const Point& x) const {
  std::vector<double> Y(a_.size());
  eval_basis(n_, K_, x, Y.data());
  double s = 0.0;
  for (std::size_t j = 0; j < a_.size(); ++j) s += a_[j] * Y[j];
  return s;
}

double SphereFunction::evaluate(const Point& x, Point& grad) const {
  std::vector<double> Y(a_.size());
  std::vector<Point> G(a_.size());
  eval_basis(n_, K_, x, Y.data(), G.data());
  double s = 0.0;
  grad = {0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < a_.size(); ++j) {
    s += a_[j] * Y[j];
    for (int d = 0; d < 3; ++d) grad[d] += a_[j] * G[j][d];
  }
  return s;
}

std::vector<double> SphereFunction::samples(const std::vector<Point>& pts) const {
  std::vector<double> out(pts.size());
  std::vector<double> Y(a_.size());
  for (std::size_t p = 0; p < pts.size(); ++p) {
    eval_basis(n_, K_, pts[p], Y.data());
    double s = 0.0;
    for (std::size_t j = 0; j < a_.size(); ++j) s += a_[j] * Y[j];
    out[p] = s;
  }
  return out;
}

SphereFunction SphereFunction::with_band(int K2) const {
  SphereFunction v(n_, K2);
  const std::size_t m = std::min(v.a_.size(), a_.size());
  std::copy(a_.begin(), a_.begin() + static_cast<std::ptrdiff_t>(m), v.a_.begin());
  return v;
}

double SphereFunction::l2_norm_squared() const {
  double s = 0.0;
  for (double c : a_) s += c * c;
  return s;
}

double SphereFunction::mean() const { return a_[0] / std::sqrt(sphere_area(n_)); }

SphereFunction& SphereFunction::operator+=(const SphereFunction& o) {
  if (o.n_ != n_) throw std::invalid_argument("SphereFunction: dimension mismatch");
  if (o.K_ > K_) *this = with_band(o.K_);
  for (std::size_t j = 0; j < o.a_.size(); ++j) a_[j] += o.a_[j];
  return *this;
}

SphereFunction& SphereFunction::operator*=(double c) {
  for (double& v : a_) v *= c;
  return *this;
}

std::string SphereFunction::to_json() const {
  nlohmann::json j;
  j["n"] = n_;
  j["K"] = K_;
  j["coefficients"] = a_;
  return j.dump(2);
}

SphereFunction SphereFunction::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("SphereFunction JSON: ") + e.what());
  }
  if (!j.contains("n") || !j.contains("K") || !j.contains("coefficients"))
    throw std::invalid_argument("SphereFunction JSON: need fields n, K, coefficients");
  return SphereFunction(j.at("n").get<int>(), j.at("K").get<int>(), j.at("coefficients").get<std::vector<double>>());
}

std::vector<double> synthesize(const SphereFunction& u, const QuadratureGrid& grid) {
  if (grid.n != u.n()) throw std::invalid_argument("synthesize: dimension mismatch");
  return u.samples(grid.nodes);
}

SphereFunction analyze(const std::vector<double>& samples, const QuadratureGrid& grid, int K) {
  if (samples.size() != grid.size()) throw std::invalid_argument("analyze: sample count mismatch");
  SphereFunction u(grid.n, K);
  auto& a = u.coeffs();
  std::vector<double> Y(a.size());
  std::vector<std::vector<double>> terms(a.size(), std::vector<double>(grid.size()));
  std::vector<double> energy(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    eval_basis(grid.n, K, grid.nodes[p], Y.data());
    const double wu = grid.weights[p] * samples[p];
    for (std::size_t j = 0; j < a.size(); ++j) terms[j][p] = wu * Y[j];
    energy[p] = wu * samples[p];
  }
  for (std::size_t j = 0; j < a.size(); ++j) a[j] = pairwise_sum(terms[j]);
  const double total = pairwise_sum(energy);
  double area = 0.0;
  for (double w : grid.weights) area += w;
  // rms below 1e-12 is round-off on unit-radius data; the ratio test would only see noise
  if (total > 1e-24 * area) {
    const double resid = std::max(0.0, total - u.l2_norm_squared()) / total;
    if (resid > 1e-6)
      throw AliasingError("analyze: energy outside band limit " + std::to_string(K), resid);
  }
  return u;
}

SeminormResult seminorm_gagliardo(const SphereFunction& u, double alpha, SeminormMethod method, double rel_tol,
                                  int resolution) {
  check_order(alpha);
  if (method == SeminormMethod::spectral) {
    const auto tab = spectral_table(u.n(), alpha, std::max(u.K(), 2));
    double s = 0.0;
    for (int k = 1; k <= u.K(); ++k)
      for (int i = 1; i <= dim_harmonic(u.n(), k); ++i) s += tab->lambda[k] * u.coeff(k, i) * u.coeff(k, i);
    return {s, 0.0};
  }
  require_grid_dim(u.n());
  const int res = resolution > 0 ? resolution : default_pair_resolution(u.n(), u.K());
  auto integrate = [&](int r) {
    const auto rule = pair_rule(u.n(), alpha, r);
    const auto ux = u.samples(rule->x);
    const auto uy = u.samples(rule->y);
    std::vector<double> outer(rule->x.size());
    std::vector<double> inner(rule->ny);
    for (std::size_t i = 0; i < rule->x.size(); ++i) {
      for (std::size_t j = 0; j < rule->ny; ++j) {
        const std::size_t p = i * rule->ny + j;
        const double q = (ux[i] - uy[p]) / rule->dist[p];
        inner[j] = rule->wy[p] * q * q;
      }
      outer[i] = rule->wx[i] * pairwise_sum(inner);
    }
    return pairwise_sum(outer);
  };
  const double fine = integrate(res);
  const double coarse = integrate(coarse_pair_resolution(u.n(), res));
  const double err = std::abs(fine - coarse);
  const double floor = 1e-13 * (1.0 + u.l2_norm_squared());
  if (err > rel_tol * std::abs(fine) + floor)
    throw QuadratureError("seminorm_gagliardo: error estimate above tolerance", err, rel_tol);
  return {fine, err};
}

double sobolev_norm_squared(const SphereFunction& u, double alpha) {
  return u.l2_norm_squared() + seminorm_gagliardo(u, alpha, SeminormMethod::spectral).value;
}

double linf_norm_estimate(const SphereFunction& u) {
  const auto g = dense_grid(u.n(), u.K());
  double m = 0.0;
  for (double v : u.samples(g.nodes)) m = std::max(m, std::abs(v));
  return m;
}

double c1_norm_estimate(const SphereFunction& u) {
  const auto g = dense_grid(u.n(), u.K());
  double mu = 0.0, mg = 0.0;
  for (const auto& x : g.nodes) {
    Point grad;
    const double v = u.evaluate(x, grad);
    mu = std::max(mu, std::abs(v));
    mg = std::max(mg, std::sqrt(grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]));
  }
  return mu + mg;
}

}  // namespace fracstab

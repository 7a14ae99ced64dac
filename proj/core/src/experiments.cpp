#include "fracstab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <json.hpp>
#include <random>

#include "fracstab/error.hpp"
#include "fracstab/specfun.hpp"

namespace fracstab {

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

double uniform01(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
  auto g = stream(seed, index, salt);
  return std::uniform_real_distribution<double>(0.0, 1.0)(g);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

CheckLine make_check(std::string name, double value, double reference, double tol, bool absolute = false) {
  CheckLine c;
  c.name = std::move(name);
  c.value = value;
  c.reference = reference;
  c.tol = tol;
  c.error = (absolute || reference == 0.0) ? std::abs(value - reference) : std::abs(value / reference - 1.0);
  c.pass = c.error < tol;
  return c;
}

}  // namespace

QuadratureOptions quadrature_options(const ExperimentConfig& cfg) {
  QuadratureOptions o;
  o.resolution = cfg.grid;
  o.rel_tol = cfg.tol;
  return o;
}

SphereFunction random_perturbation(int n, int K, double t, double target_c1, std::uint64_t seed, std::uint64_t index,
                                   bool low_modes, bool project) {
  auto g = stream(seed, index, 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  SphereFunction u(n, K);
  for (int k = low_modes ? 0 : 2; k <= K; ++k) {
    const double sd = std::pow(std::max(k, 1), -0.5 * (2.0 + t));
    for (int i = 1; i <= dim_harmonic(n, k); ++i) u.coeff(k, i) = sd * normal(g);
  }
  const double c1 = c1_norm_estimate(u);
  if (c1 > 0.0) u *= target_c1 / c1;
  return project ? project_constraints(u) : u;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

std::string spectrum_csv(int n, double alpha, int K) {
  const auto tab = spectral_table(n, alpha, std::max(K, 2));
  std::string out = "k,dim,lambda,A\n";
  for (int k = 0; k <= K; ++k)
    out += fmt::format("{},{},{:.17g},{:.17g}\n", k, tab->dim[k], tab->lambda[k], tab->A[k]);
  return out;
}

std::string spectrum_json(int n, double alpha, int K) {
  const auto tab = spectral_table(n, alpha, std::max(K, 2));
  nlohmann::json j;
  j["n"] = n;
  j["alpha"] = alpha;
  j["perimeter_ball"] = tab->perimeter_ball;
  j["rows"] = nlohmann::json::array();
  for (int k = 0; k <= K; ++k)
    j["rows"].push_back({{"k", k}, {"dim", tab->dim[k]}, {"lambda", tab->lambda[k]}, {"A", tab->A[k]}});
  return j.dump(2);
}

CoercivityGridResult run_coercivity_scan(const std::vector<int>& ns, const std::vector<double>& orders, int Kmax) {
  CoercivityGridResult res;
  res.smallest_margin = 1e300;
  for (int n : ns)
    for (std::size_t a = 0; a < orders.size(); ++a)
      for (std::size_t b = 0; b < orders.size(); ++b) {
        if (!(orders[a] < orders[b])) continue;
        const FracParams p = FracParams::make(n, orders[a], orders[b]);
        res.reports.push_back(scan_positivity(p, Kmax));
        const auto& r = res.reports.back();
        res.violations += r.violations();
        if (r.min_margin < res.smallest_margin) {
          res.smallest_margin = r.min_margin;
          res.smallest_margin_params = p;
        }
      }
  return res;
}

std::string coercivity_scan_csv(const CoercivityGridResult& r) {
  std::string out = scan_csv_header();
  for (const auto& rep : r.reports) out += scan_csv_rows(rep);
  return out;
}

StabilityResult run_stability_experiment(const ExperimentConfig& cfg, bool with_asymmetry) {
  StabilityResult res;
  res.config = cfg;
  res.with_asymmetry = with_asymmetry;
  const FracParams& p = cfg.params;
  res.constants = compute_constants(p);
  res.F_ball = ratio_F_ball(p);
  res.kappa = 0.5 * res.constants.c_spectral;
  const auto opt = quadrature_options(cfg);

  for (int j = 0; j < cfg.samples; ++j) {
    StabilityRow row;
    row.sample = j;
    row.eps_target = cfg.eps * (0.2 + 0.75 * uniform01(cfg.seed, j, 2));
    try {
      const SphereFunction u = random_perturbation(p.n, cfg.K, p.t, row.eps_target, cfg.seed, j);
      const NearlySphericalSet E(u);
      row.c1_norm = c1_norm_estimate(u);
      row.l2_norm = std::sqrt(u.l2_norm_squared());
      row.h_norm_sq = sobolev_norm_squared(u, p.t);
      const auto F = ratio_F(E, p, opt);
      row.deficit = F.value - res.F_ball;
      row.deficit_error = F.error_estimate;
      const auto bound = coercivity_lower_bound(u, p);
      res.c_corrected = bound.c_corrected;
      row.half_second_variation = bound.half_second_variation;
      row.floor_spectral = res.kappa * row.h_norm_sq;
      row.floor_corrected = bound.corrected_floor;
      row.remainder = std::abs(row.deficit - row.half_second_variation);
      if (with_asymmetry) row.asymmetry = fraenkel_asymmetry(E).value;
      row.deficit_positive = row.deficit > 0.0;
      row.floor_ok = row.deficit >= row.floor_spectral;
      row.corrected_ok = row.deficit >= row.floor_corrected;
    } catch (const std::exception& e) {
      row.failed = true;
      row.failure = e.what();
    }
    res.rows.push_back(row);
  }

  // constants fitted on the holdout, validated on the rest
  const int hold = std::min(cfg.holdout, cfg.samples);
  double cmax = 0.0, amin = 1e300;
  for (int j = 0; j < hold; ++j) {
    const auto& r = res.rows[j];
    if (r.failed) continue;
    if (r.c1_norm * r.h_norm_sq > 0.0) cmax = std::max(cmax, r.remainder / (r.c1_norm * r.h_norm_sq));
    if (r.asymmetry > 0.0) amin = std::min(amin, r.deficit / (r.asymmetry * r.asymmetry));
  }
  res.remainder_C = 2.0 * cmax;
  res.asymmetry_c = amin < 1e300 ? 0.5 * amin : 0.0;

  std::vector<double> ratios;
  for (auto& r : res.rows) {
    if (r.failed) {
      ++res.failures;
      continue;
    }
    r.remainder_ok = r.remainder <= res.remainder_C * r.c1_norm * r.h_norm_sq;
    r.asymmetry_ok = !with_asymmetry || r.deficit >= res.asymmetry_c * r.asymmetry * r.asymmetry;
    if (!r.deficit_positive) ++res.deficit_violations;
    if (!r.floor_ok) ++res.floor_violations;
    if (!r.corrected_ok) ++res.corrected_violations;
    if (r.sample >= hold) {
      if (!r.remainder_ok) ++res.remainder_violations;
      if (!r.asymmetry_ok) ++res.asymmetry_violations;
    }
    if (r.h_norm_sq > 0.0) ratios.push_back(r.deficit / r.h_norm_sq);
  }
  if (!ratios.empty()) {
    res.ratio_min = *std::min_element(ratios.begin(), ratios.end());
    res.ratio_max = *std::max_element(ratios.begin(), ratios.end());
    res.ratio_median = median(ratios);
  }
  return res;
}

std::string stability_csv(const StabilityResult& r) {
  std::string out =
      "sample,eps_target,c1_norm,l2_norm,h_norm_sq,deficit,deficit_error,half_second_variation,floor_spectral,"
      "floor_corrected,remainder,asymmetry,deficit_positive,floor_ok,corrected_ok,remainder_ok,asymmetry_ok,failed\n";
  for (const auto& x : r.rows)
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.3g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{},{},{},{},{}\n",
                       x.sample, x.eps_target, x.c1_norm, x.l2_norm, x.h_norm_sq, x.deficit, x.deficit_error,
                       x.half_second_variation, x.floor_spectral, x.floor_corrected, x.remainder, x.asymmetry,
                       int(x.deficit_positive), int(x.floor_ok), int(x.corrected_ok), int(x.remainder_ok),
                       int(x.asymmetry_ok), int(x.failed));
  return out;
}

std::string stability_summary(const StabilityResult& r) {
  std::string s;
  s += fmt::format("samples={} failures={}\n", r.rows.size(), r.failures);
  s += fmt::format("F(B)={:.15g} c0={:.6g} c_spectral={:.6g} c_with_prefactor={:.6g} kappa={:.6g} c_corrected={:.6g}\n",
                   r.F_ball, r.constants.c0, r.constants.c_spectral, r.constants.c_with_prefactor, r.kappa,
                   r.c_corrected);
  s += fmt::format("deficit/||u||^2: min={:.6g} median={:.6g} max={:.6g}\n", r.ratio_min, r.ratio_median, r.ratio_max);
  s += fmt::format("(a) deficit > 0 violations: {}\n", r.deficit_violations);
  s += fmt::format("(b) deficit >= kappa ||u||^2 violations: {}\n", r.floor_violations);
  s += fmt::format("    deficit >= c_corrected ||u||^2 violations: {}\n", r.corrected_violations);
  s += fmt::format("(c) remainder <= C ||u||_C1 ||u||^2 with C={:.6g}: validation violations {}\n", r.remainder_C,
                   r.remainder_violations);
  if (r.with_asymmetry)
    s += fmt::format("    deficit >= c A(E)^2 with c={:.6g}: validation violations {}\n", r.asymmetry_c,
                     r.asymmetry_violations);
  return s;
}

RayResult run_ray_continuity(const ExperimentConfig& cfg, int shapes, int scales) {
  RayResult res;
  const FracParams& p = cfg.params;
  const auto opt = quadrature_options(cfg);
  std::vector<SphereFunction> base;
  for (int s = 0; s < shapes; ++s) base.push_back(random_perturbation(p.n, cfg.K, p.t, 1.0, cfg.seed, s, false, false));
  int sample = 0;
  for (int b = 0; b < scales; ++b) {
    const double f = scales > 1 ? static_cast<double>(b) / (scales - 1) : 0.0;
    const double scale = cfg.eps_min * std::pow(cfg.eps / cfg.eps_min, f);
    double bmax = 0.0, logc = 0.0;
    for (int s = 0; s < shapes; ++s) {
      RayRow row;
      row.sample = sample++;
      row.shape = s;
      const SphereFunction u = project_constraints(scale * base[s]);
      row.c1_norm = c1_norm_estimate(u);
      row.h_norm_sq = sobolev_norm_squared(u, p.t);
      row.second_u = second_variation_F(u, p, opt).value;
      row.second_0 = second_variation_F_at_zero(u, p);
      row.ratio = std::abs(row.second_u - row.second_0) / (row.c1_norm * row.h_norm_sq);
      bmax = std::max(bmax, row.ratio);
      logc += std::log(row.c1_norm);
      res.rows.push_back(row);
    }
    res.bin_c1.push_back(std::exp(logc / shapes));
    res.bin_max.push_back(bmax);
    res.max_ratio = std::max(res.max_ratio, bmax);
  }
  std::vector<double> lx, ly;
  for (std::size_t b = 0; b < res.bin_c1.size(); ++b) {
    lx.push_back(std::log(res.bin_c1[b]));
    ly.push_back(std::log(res.bin_max[b]));
  }
  res.slope = lx.size() > 1 ? fit_slope(lx, ly) : 0.0;
  return res;
}

std::string ray_csv(const RayResult& r) {
  std::string out = "sample,shape,c1_norm,h_norm_sq,second_u,second_0,ratio\n";
  for (const auto& x : r.rows)
    out += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", x.sample, x.shape, x.c1_norm, x.h_norm_sq,
                       x.second_u, x.second_0, x.ratio);
  return out;
}

std::vector<CheckLine> run_hessian_fd_check(const ExperimentConfig& cfg, int count) {
  std::vector<CheckLine> out;
  const FracParams& p = cfg.params;
  const auto opt = quadrature_options(cfg);
  for (int j = 0; j < count; ++j) {
    const SphereFunction u = random_perturbation(p.n, cfg.K, p.t, 1.0, cfg.seed, 1000 + j, true, false);
    auto f = [&](double e) { return ratio_F(NearlySphericalSet(e * u), p, opt).value; };
    const double fd = richardson_second_derivative(f, 0.0, 0.04);
    out.push_back(make_check(fmt::format("hessian_fd[{}]", j), second_variation_F_at_zero(u, p), fd, 1e-3));
  }
  return out;
}

std::vector<CheckLine> run_variation_check(const ExperimentConfig& cfg) {
  std::vector<CheckLine> out;
  const FracParams& p = cfg.params;
  const int n = p.n, K = cfg.K;
  const double a = cfg.alpha;
  const auto opt = quadrature_options(cfg);
  const SphereFunction zero(n, K);

  for (int k = 0; k <= K; ++k) {
    const auto Y = SphereFunction::harmonic(n, K, k, 1);
    out.push_back(make_check(fmt::format("dF(0)[Y_{}]", k), first_variation_F(zero, Y, p, opt).value, 0.0, 1e-8, true));
  }
  const double area_coeff = (n - a) * (n - a - 1.0) * perimeter_ball(n, a) / sphere_area(n);
  for (int k = 0; k <= K; ++k) {
    const auto Y = SphereFunction::harmonic(n, K, k, 1);
    out.push_back(make_check(fmt::format("d2P(0)[Y_{}]", k), second_variation_P(zero, Y, a, opt).value,
                             area_coeff + lambda_eigenvalue(n, a, k), 1e-6));
  }
  for (int k = 0; k <= K; ++k) {
    const auto Y = SphereFunction::harmonic(n, K, k, 1);
    const double spec = second_variation_F_at_zero(Y, p);
    out.push_back(make_check(fmt::format("d2F(0)[Y_{}] quadrature vs spectral", k),
                             second_variation_F(zero, Y, p, opt).value, spec, k >= 2 ? 1e-8 : 1e-10, k < 2));
  }

  const SphereFunction u = random_perturbation(n, K, p.t, 0.05, cfg.seed, 500, true, false);
  const SphereFunction phi = random_perturbation(n, K, p.t, 1.0, cfg.seed, 501, true, false);
  auto Pa = [&](double h) { return fractional_perimeter(NearlySphericalSet(u + h * phi), a, opt).value; };
  out.push_back(make_check("dP(u)[phi] vs finite difference", first_variation_P(u, phi, a, opt).value,
                           richardson_first_derivative(Pa, 0.0, 1e-2), 1e-3));
  out.push_back(make_check("d2P(u)[phi] vs finite difference", second_variation_P(u, phi, a, opt).value,
                           richardson_second_derivative(Pa, 0.0, 2e-2), 1e-2));
  auto Fu = [&](double h) { return ratio_F(NearlySphericalSet(u + h * phi), p, opt).value; };
  out.push_back(make_check("dF(u)[phi] vs finite difference", first_variation_F(u, phi, p, opt).value,
                           richardson_first_derivative(Fu, 0.0, 1e-2), 1e-3));

  const SphereFunction w = random_perturbation(n, K, p.t, 0.1, cfg.seed, 502, false, true);
  auto fl = [&](double l) { return ratio_F(NearlySphericalSet(l * w), p, opt).value; };
  out.push_back(make_check("d2F(u)[u] at ||u||_C1 = 0.1 vs finite difference", second_variation_F(w, p, opt).value,
                           richardson_second_derivative(fl, 1.0, 0.05), 1e-2));
  return out;
}

std::string checks_csv(const std::vector<CheckLine>& c) {
  std::string out = "name,value,reference,error,tol,pass\n";
  for (const auto& x : c)
    out += fmt::format("\"{}\",{:.17g},{:.17g},{:.3e},{:.1e},{}\n", x.name, x.value, x.reference, x.error, x.tol,
                       x.pass ? 1 : 0);
  return out;
}

std::vector<RegraphRow> run_regraph_samples(const ExperimentConfig& cfg, int count) {
  std::vector<RegraphRow> out;
  const FracParams& p = cfg.params;
  for (int j = 0; j < count; ++j) {
    RegraphRow row;
    row.sample = j;
    const double target = cfg.eps * (0.2 + 0.75 * uniform01(cfg.seed, 2000 + j, 2));
    try {
      const SphereFunction u = random_perturbation(p.n, cfg.K, p.t, target, cfg.seed, 2000 + j, true, false);
      const auto r = regraph(u);
      row.c1_u = r.c1_u;
      row.c1_v = r.c1_v;
      row.ratio = r.c1_ratio;
      row.residual = r.boundary_residual;
      row.y_norm = std::sqrt(r.y[0] * r.y[0] + r.y[1] * r.y[1] + r.y[2] * r.y[2]);
      row.r = r.r;
      row.min_jacobian = r.min_jacobian;
    } catch (const std::exception&) {
      row.failed = true;
    }
    out.push_back(row);
  }
  return out;
}

std::string regraph_report(const RegraphResult& r, const std::string& format) {
  if (format == "json") {
    nlohmann::json j;
    j["y"] = {r.y[0], r.y[1], r.y[2]};
    j["r"] = r.r;
    j["c1_u"] = r.c1_u;
    j["c1_v"] = r.c1_v;
    j["c1_ratio"] = r.c1_ratio;
    j["boundary_residual"] = r.boundary_residual;
    j["min_jacobian"] = r.min_jacobian;
    j["v"] = nlohmann::json::parse(r.v.to_json());
    return j.dump(2);
  }
  return fmt::format("y0,y1,y2,r,c1_u,c1_v,c1_ratio,boundary_residual,min_jacobian\n"
                     "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.3e},{:.17g}\n",
                     r.y[0], r.y[1], r.y[2], r.r, r.c1_u, r.c1_v, r.c1_ratio, r.boundary_residual, r.min_jacobian);
}

}  // namespace fracstab

// Batch driver: spectra, coercivity scans, perimeters, variation oracles,
// stability experiments and regraphing. Exit status 0 = all checks pass,
// 1 = a check failed, 2 = configuration or I/O problem.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "fracstab/coercivity.hpp"
#include "fracstab/error.hpp"
#include "fracstab/experiments.hpp"
#include "fracstab/functionals.hpp"
#include "fracstab/geometry.hpp"
#include "fracstab/specfun.hpp"

using namespace fracstab;

namespace {

constexpr int kPass = 0;
constexpr int kViolation = 1;
constexpr int kConfigError = 2;

struct Options {
  int n = 2;
  double s = 0.25;
  double t = 0.75;
  double alpha = 0.5;
  int K = 8;
  int Kmax = 200;
  int grid = 0;
  int samples = 50;
  std::uint64_t seed = 20240611;
  double eps = 0.05;
  double eps_min = 1e-3;
  double tol = 1e-7;
  std::string out;
  std::string input;
  std::string format = "csv";
  bool no_asymmetry = false;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw IoError("cannot open output file " + o.out);
  f << text;
  if (!f) throw IoError("write failed for " + o.out);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open input file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ExperimentConfig to_config(const Options& o) {
  ExperimentConfig c;
  c.params = FracParams::make(o.n, o.s, o.t);
  c.alpha = o.alpha;
  c.K = o.K;
  c.grid = o.grid;
  c.samples = o.samples;
  c.seed = o.seed;
  c.eps = o.eps;
  c.eps_min = o.eps_min;
  c.tol = o.tol;
  c.Kmax = o.Kmax;
  return c;
}

SphereFunction load_or_zero(const Options& o) {
  if (o.input.empty()) return SphereFunction(o.n, o.K);
  return SphereFunction::from_json(read_file(o.input));
}

int cmd_spectrum(const Options& o) {
  check_dimension(o.n);
  check_order(o.alpha);
  emit(o, o.format == "json" ? spectrum_json(o.n, o.alpha, o.K) + "\n" : spectrum_csv(o.n, o.alpha, o.K));
  return kPass;
}

int cmd_coercivity_scan(const Options& o, bool single) {
  CoercivityGridResult res;
  if (single) {
    FracParams::make(o.n, o.s, o.t);
    res = run_coercivity_scan({o.n}, {o.s, o.t}, o.Kmax);
    const auto& c = res.reports.front().constants;
    std::cerr << fmt::format("n={} s={} t={} c1={:.12g} c2={:.12g} c0={:.12g} c_spectral={:.12g} "
                             "c_with_prefactor={:.12g} c={:.12g} eps0={:.12g}\n",
                             o.n, o.s, o.t, c.c1, c.c2, c.c0, c.c_spectral, c.c_with_prefactor, c.c, c.eps0);
  } else {
    res = run_coercivity_scan({2, 3, 4, 5, 6, 7}, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}, o.Kmax);
  }
  emit(o, coercivity_scan_csv(res));
  std::cerr << fmt::format("parameter points={} Kmax={} violations={} smallest margin={:.6g} at (n={}, s={}, t={})\n",
                           res.reports.size(), o.Kmax, res.violations, res.smallest_margin,
                           res.smallest_margin_params.n, res.smallest_margin_params.s,
                           res.smallest_margin_params.t);
  return res.violations == 0 ? kPass : kViolation;
}

int cmd_perimeter(const Options& o) {
  check_order(o.alpha);
  const SphereFunction u = load_or_zero(o);
  QuadratureOptions q;
  q.resolution = o.grid;
  q.rel_tol = o.tol;
  const auto P = fractional_perimeter(NearlySphericalSet(u), o.alpha, q);
  const double ball = perimeter_ball(u.n(), o.alpha);
  if (o.format == "json")
    emit(o, fmt::format("{{\"n\": {}, \"alpha\": {}, \"perimeter\": {:.17g}, \"error_estimate\": {:.3e}, "
                        "\"perimeter_ball\": {:.17g}}}\n",
                        u.n(), o.alpha, P.value, P.error_estimate, ball));
  else
    emit(o, fmt::format("n,alpha,perimeter,error_estimate,perimeter_ball\n{},{},{:.17g},{:.3e},{:.17g}\n", u.n(),
                        o.alpha, P.value, P.error_estimate, ball));
  return kPass;
}

int cmd_variation_check(const Options& o) {
  const ExperimentConfig cfg = to_config(o);
  auto checks = run_variation_check(cfg);
  for (auto& c : run_hessian_fd_check(cfg, std::min(o.samples, 20))) checks.push_back(c);
  emit(o, checks_csv(checks));
  int failed = 0;
  double worst = 0.0;
  for (const auto& c : checks) {
    failed += c.pass ? 0 : 1;
    if (c.reference != 0.0) worst = std::max(worst, c.error);
  }
  std::cerr << fmt::format("checks={} failed={} max relative error={:.3e}\n", checks.size(), failed, worst);
  return failed == 0 ? kPass : kViolation;
}

int cmd_stability(const Options& o) {
  const ExperimentConfig cfg = to_config(o);
  const auto res = run_stability_experiment(cfg, !o.no_asymmetry);
  emit(o, stability_csv(res));
  std::cerr << stability_summary(res);
  const bool ok = res.failures == 0 && res.deficit_violations == 0 && res.floor_violations == 0 &&
                  res.remainder_violations == 0 && res.asymmetry_violations == 0;
  return ok ? kPass : kViolation;
}

int cmd_rays(const Options& o) {
  ExperimentConfig cfg = to_config(o);
  const int shapes = 5;
  const auto res = run_ray_continuity(cfg, shapes, std::max(2, o.samples / shapes));
  emit(o, ray_csv(res));
  std::cerr << fmt::format("max ratio={:.6g} slope of log max-ratio vs log C1 norm={:.4f}\n", res.max_ratio, res.slope);
  return std::abs(res.slope) <= 0.3 ? kPass : kViolation;
}

int cmd_regraph(const Options& o) {
  const SphereFunction u = load_or_zero(o);
  try {
    const auto r = regraph(u);
    emit(o, regraph_report(r, o.format) + (o.format == "json" ? "\n" : ""));
    std::cerr << fmt::format("|y|={:.6g} r={:.12g} ||v||_C1={:.6g} residual={:.3e}\n",
                             std::sqrt(r.y[0] * r.y[0] + r.y[1] * r.y[1] + r.y[2] * r.y[2]), r.r, r.c1_v,
                             r.boundary_residual);
    return r.boundary_residual < 1e-8 ? kPass : kViolation;
  } catch (const DiffeomorphismError& e) {
    std::cerr << e.what() << " (smallest Jacobian " << e.derivative_bound() << ")\n";
    return kViolation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional isoperimetric ratio: spectra, variations and stability experiments"};
  app.set_config("--config", "", "Flat key=value file mirroring the flags (flags override it)");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--n", o.n, "Ambient dimension")->capture_default_str();
  app.add_option("--s", o.s, "Lower fractional order")->capture_default_str();
  app.add_option("--t", o.t, "Upper fractional order")->capture_default_str();
  app.add_option("--alpha", o.alpha, "Order for single-perimeter commands")->capture_default_str();
  app.add_option("--K", o.K, "Band limit")->capture_default_str();
  app.add_option("--kmax", o.Kmax, "Largest degree in coercivity scans")->capture_default_str();
  app.add_option("--grid", o.grid, "Pair-quadrature resolution (0 = automatic)")->capture_default_str();
  app.add_option("--samples", o.samples, "Number of random samples")->capture_default_str();
  app.add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  app.add_option("--eps", o.eps, "Largest C1 norm of sampled perturbations")->capture_default_str();
  app.add_option("--eps-min", o.eps_min, "Smallest C1 norm in scale sweeps")->capture_default_str();
  app.add_option("--tol", o.tol, "Relative quadrature tolerance")->capture_default_str();
  app.add_option("--out", o.out, "Output file (stdout when empty)");
  app.add_option("--input", o.input, "SphereFunction JSON file");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_flag("--no-asymmetry", o.no_asymmetry, "Skip Fraenkel asymmetry in stability runs");

  auto* spectrum = app.add_subcommand("spectrum", "k, d(k), lambda_k, A_k as CSV");
  auto* scan = app.add_subcommand("coercivity-scan", "Spectral gap positivity over a parameter grid");
  auto* single = scan->add_flag("--single", "Scan only the given (n, s, t)");
  auto* perimeter = app.add_subcommand("perimeter", "Fractional perimeter of E_u (u from --input, default 0)");
  auto* variation = app.add_subcommand("variation-check", "Finite-difference and closed-form variation oracles");
  auto* stability = app.add_subcommand("stability-experiment", "Seeded stability inequality sweep");
  auto* rays = app.add_subcommand("ray-continuity", "Second variation continuity along rays");
  auto* regraph_cmd = app.add_subcommand("regraph", "Rewrite E_u as a graph over its volume/barycenter ball");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*spectrum) return cmd_spectrum(o);
    if (*scan) return cmd_coercivity_scan(o, single->count() > 0);
    if (*perimeter) return cmd_perimeter(o);
    if (*variation) return cmd_variation_check(o);
    if (*stability) return cmd_stability(o);
    if (*rays) return cmd_rays(o);
    if (*regraph_cmd) return cmd_regraph(o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kConfigError;
  } catch (const QuadratureError& e) {
    std::cerr << e.what() << " (estimate " << e.estimate() << ")\n";
    return kViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kViolation;
  }
  return kConfigError;
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracstab/coercivity.hpp"
#include "fracstab/functionals.hpp"
#include "fracstab/geometry.hpp"
#include "fracstab/params.hpp"
#include "fracstab/sphere.hpp"

namespace fracstab {

struct ExperimentConfig {
  FracParams params{2, 0.25, 0.75};
  double alpha = 0.5;
  int K = 8;
  int grid = 0;  // pair-quadrature resolution, 0 = automatic
  int samples = 50;
  std::uint64_t seed = 20240611;
  double eps = 0.05;       // largest C1 norm of sampled perturbations
  double eps_min = 1e-3;   // smallest C1 norm in scale sweeps
  double tol = 1e-7;       // quadrature tolerance
  int Kmax = 200;
  int holdout = 10;        // samples used to fit constants
};

QuadratureOptions quadrature_options(const ExperimentConfig& cfg);

/// Gaussian coefficients with variance k^{-(2+t)} on degrees 2..K (0..K with low_modes),
/// rescaled to the target C1 norm and, if requested, projected to |E| = |B|, bar(E) = 0.
/// The (seed, index) pair determines the result.
SphereFunction random_perturbation(int n, int K, double t, double target_c1, std::uint64_t seed,
                                   std::uint64_t index, bool low_modes = false, bool project = true);

/// Central second difference with steps h and h/2, Richardson combined.
template <class F>
double richardson_second_derivative(F f, double x0, double h) {
  const double f0 = f(x0);
  auto D = [&](double s) { return (f(x0 + s) - 2.0 * f0 + f(x0 - s)) / (s * s); };
  return (4.0 * D(0.5 * h) - D(h)) / 3.0;
}

template <class F>
double richardson_first_derivative(F f, double x0, double h) {
  auto D = [&](double s) { return (f(x0 + s) - f(x0 - s)) / (2.0 * s); };
  return (4.0 * D(0.5 * h) - D(h)) / 3.0;
}

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// spectrum ---------------------------------------------------------------

std::string spectrum_csv(int n, double alpha, int K);
std::string spectrum_json(int n, double alpha, int K);

// coercivity scan --------------------------------------------------------

struct CoercivityGridResult {
  std::vector<ScanReport> reports;
  int violations = 0;
  double smallest_margin = 0.0;
  FracParams smallest_margin_params;
};

/// Scan every (n, s, t) with s < t drawn from `orders`.
CoercivityGridResult run_coercivity_scan(const std::vector<int>& ns, const std::vector<double>& orders, int Kmax);
std::string coercivity_scan_csv(const CoercivityGridResult& r);

// stability --------------------------------------------------------------

struct StabilityRow {
  int sample = 0;
  double eps_target = 0.0;
  double c1_norm = 0.0;
  double l2_norm = 0.0;
  double h_norm_sq = 0.0;             // ||u||^2_{H^{(1+t)/2}}
  double deficit = 0.0;               // F(E_u) - F(B)
  double deficit_error = 0.0;
  double half_second_variation = 0.0; // (1/2) delta^2 F(0)[u,u]
  double floor_spectral = 0.0;        // (c_spectral / 2) ||u||^2
  double floor_corrected = 0.0;       // c_corrected ||u||^2
  double remainder = 0.0;             // |deficit - half_second_variation|
  double asymmetry = 0.0;             // Fraenkel asymmetry
  bool deficit_positive = false;
  bool floor_ok = false;
  bool corrected_ok = false;
  bool remainder_ok = false;
  bool asymmetry_ok = false;
  bool failed = false;                // quadrature or projection failure
  std::string failure;
};

struct StabilityResult {
  ExperimentConfig config;
  CoercivityConstants constants;
  double F_ball = 0.0;
  double kappa = 0.0;            // c_spectral / 2
  double c_corrected = 0.0;
  double remainder_C = 0.0;      // fitted on the holdout
  double asymmetry_c = 0.0;      // fitted on the holdout
  std::vector<StabilityRow> rows;
  int failures = 0;
  int deficit_violations = 0;
  int floor_violations = 0;
  int corrected_violations = 0;
  int remainder_violations = 0;  // validation samples only
  int asymmetry_violations = 0;  // validation samples only
  double ratio_min = 0.0, ratio_median = 0.0, ratio_max = 0.0;  // deficit / ||u||^2
  bool with_asymmetry = true;
};

StabilityResult run_stability_experiment(const ExperimentConfig& cfg, bool with_asymmetry = true);
std::string stability_csv(const StabilityResult& r);
std::string stability_summary(const StabilityResult& r);

// continuity along rays --------------------------------------------------

struct RayRow {
  int sample = 0;
  int shape = 0;
  double c1_norm = 0.0;
  double h_norm_sq = 0.0;
  double second_u = 0.0;  // delta^2 F(u)[u,u]
  double second_0 = 0.0;  // delta^2 F(0)[u,u]
  double ratio = 0.0;
};

struct RayResult {
  std::vector<RayRow> rows;
  std::vector<double> bin_c1;   // geometric mean of C1 norms per scale
  std::vector<double> bin_max;  // largest ratio per scale
  double slope = 0.0;           // of log(bin_max) against log(bin_c1)
  double max_ratio = 0.0;
};

/// `shapes` random directions times `scales` log-spaced C1 norms in [eps_min, eps].
RayResult run_ray_continuity(const ExperimentConfig& cfg, int shapes, int scales);
std::string ray_csv(const RayResult& r);

// finite-difference oracles ----------------------------------------------

struct CheckLine {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double error = 0.0;  // relative unless the reference is zero
  double tol = 0.0;
  bool pass = false;
};

/// delta^2 F(0)[u,u] (spectral) against Richardson second differences of eps -> F(eps u).
std::vector<CheckLine> run_hessian_fd_check(const ExperimentConfig& cfg, int count);

/// Criticality, closed-form second variations and finite-difference oracles.
std::vector<CheckLine> run_variation_check(const ExperimentConfig& cfg);
std::string checks_csv(const std::vector<CheckLine>& c);

// regraph ----------------------------------------------------------------

struct RegraphRow {
  int sample = 0;
  double c1_u = 0.0;
  double c1_v = 0.0;
  double ratio = 0.0;
  double residual = 0.0;
  double y_norm = 0.0;
  double r = 1.0;
  double min_jacobian = 0.0;
  bool failed = false;
};

std::vector<RegraphRow> run_regraph_samples(const ExperimentConfig& cfg, int count);
std::string regraph_report(const RegraphResult& r, const std::string& format);

}  // namespace fracstab

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracstab/experiments.hpp"
#include "fracstab/geometry.hpp"
#include "fracstab/specfun.hpp"

using namespace fracstab;
using doctest::Approx;

namespace {

int count_lines(const std::string& s) {
  std::istringstream in(s);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.K = 4;
  cfg.samples = 4;
  cfg.holdout = 2;
  return cfg;
}

}  // namespace

TEST_CASE("finite-difference helpers") {
  auto f = [](double x) { return std::exp(2.0 * x); };
  CHECK(richardson_first_derivative(f, 0.3, 0.05) == Approx(2.0 * std::exp(0.6)).epsilon(1e-6));
  CHECK(richardson_second_derivative(f, 0.3, 0.05) == Approx(4.0 * std::exp(0.6)).epsilon(1e-5));
  // exact on quartics up to round-off
  auto q = [](double x) { return x * x * x * x - x; };
  CHECK(richardson_second_derivative(q, 1.0, 0.2) == Approx(12.0).epsilon(1e-10));
  CHECK(fit_slope({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0}) == Approx(2.0));
  CHECK(fit_slope({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0}) == Approx(0.0).scale(1.0));
}

TEST_CASE("random perturbations are reproducible and admissible") {
  const SphereFunction a = random_perturbation(2, 8, 0.75, 0.05, 7, 3);
  const SphereFunction b = random_perturbation(2, 8, 0.75, 0.05, 7, 3);
  const SphereFunction c = random_perturbation(2, 8, 0.75, 0.05, 7, 4);
  CHECK(a.coeffs() == b.coeffs());
  CHECK(a.coeffs() != c.coeffs());
  const NearlySphericalSet E(a);
  CHECK(volume(E) == Approx(ball_volume(2)).epsilon(1e-12));
  for (double m : moment(E)) CHECK(std::abs(m) < 1e-12);
  // projection moves only low modes by O(eps^2)
  CHECK(c1_norm_estimate(a) == Approx(0.05).epsilon(0.05));

  const SphereFunction raw = random_perturbation(3, 4, 0.5, 0.1, 1, 0, true, false);
  CHECK(c1_norm_estimate(raw) == Approx(0.1).epsilon(1e-12));
  CHECK(raw.coeff(0, 1) != 0.0);
  const SphereFunction high = random_perturbation(3, 4, 0.5, 0.1, 1, 0, false, false);
  CHECK(high.coeff(0, 1) == 0.0);
  CHECK(high.coeff(1, 2) == 0.0);
}

TEST_CASE("spectrum tables") {
  const std::string csv = spectrum_csv(3, 0.5, 10);
  CHECK(csv.rfind("k,dim,lambda,A\n", 0) == 0);
  CHECK(count_lines(csv) == 12);
  const auto j = nlohmann::json::parse(spectrum_json(3, 0.5, 10));
  CHECK(j["rows"].size() == 11);
  CHECK(j["rows"][2]["dim"] == 5);
  CHECK(j["rows"][1]["A"].get<double>() == Approx(0.5));
  CHECK(j["perimeter_ball"].get<double>() == Approx(perimeter_ball(3, 0.5)));
}

TEST_CASE("coercivity grid scan") {
  const auto r = run_coercivity_scan({2, 3}, {0.2, 0.5, 0.8}, 20);
  CHECK(r.reports.size() == 6);
  CHECK(count_lines(coercivity_scan_csv(r)) == 1 + 6 * 21);
  int ratio = 0, mono = 0, strict = 0;
  for (const auto& rep : r.reports) {
    ratio += rep.ratio_violations;
    mono += rep.monotone_violations;
    for (int k = 3; k <= 20; ++k) strict += rep.rows[k].damped_gap > 0.0 ? 0 : 1;
  }
  CHECK(ratio == 0);
  CHECK(mono == 0);
  CHECK(strict == 0);
}

TEST_CASE("stability experiment on a few samples") {
  const auto r = run_stability_experiment(small_config(), false);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.failures == 0);
  CHECK(r.deficit_violations == 0);
  CHECK(r.corrected_violations == 0);
  for (const auto& row : r.rows) {
    CHECK(row.eps_target >= 0.2 * 0.05);
    CHECK(row.eps_target <= 0.95 * 0.05);
    CHECK(row.deficit > 0.0);
    // the deficit is the second variation up to a cubic remainder
    CHECK(row.remainder < 0.2 * row.deficit);
  }
  CHECK(r.remainder_C > 0.0);
  CHECK(count_lines(stability_csv(r)) == 5);
  CHECK(stability_summary(r).find("(a) deficit > 0 violations: 0") != std::string::npos);
  // same seed, same numbers
  const auto again = run_stability_experiment(small_config(), false);
  CHECK(stability_csv(again) == stability_csv(r));
}

TEST_CASE("ray continuity on a small sweep") {
  ExperimentConfig cfg = small_config();
  cfg.eps = 0.1;
  cfg.eps_min = 0.01;
  const auto r = run_ray_continuity(cfg, 2, 3);
  CHECK(r.rows.size() == 6);
  CHECK(r.bin_c1.size() == 3);
  CHECK(r.bin_c1[0] < r.bin_c1[2]);
  CHECK(r.max_ratio < 1.0);
  CHECK(std::abs(r.slope) < 0.5);
  CHECK(count_lines(ray_csv(r)) == 7);
}

TEST_CASE("finite-difference and variation checks") {
  ExperimentConfig cfg = small_config();
  for (const auto& c : run_hessian_fd_check(cfg, 2)) CHECK_MESSAGE(c.pass, c.name);
  cfg.K = 3;
  const auto checks = run_variation_check(cfg);
  CHECK(checks.size() > 10);
  for (const auto& c : checks) CHECK_MESSAGE(c.pass, c.name << " error " << c.error);
  CHECK(count_lines(checks_csv(checks)) == static_cast<int>(checks.size()) + 1);
}

TEST_CASE("regraph samples and report") {
  ExperimentConfig cfg = small_config();
  const auto rows = run_regraph_samples(cfg, 3);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK_FALSE(r.failed);
    CHECK(r.residual < 1e-8);
    CHECK(r.ratio < 5.0);
    CHECK(r.min_jacobian > 0.0);
  }
  SphereFunction u(2, 3);
  u.coeff(1, 1) = 0.03;
  u.coeff(3, 2) = 0.02;
  const auto R = regraph(u);
  const auto j = nlohmann::json::parse(regraph_report(R, "json"));
  CHECK(j["r"].get<double>() == Approx(R.r));
  CHECK(j["v"]["n"] == 2);
  CHECK(count_lines(regraph_report(R, "csv")) == 2);
}

#pragma once

#include <string>
#include <vector>

#include "fracstab/params.hpp"
#include "fracstab/sphere.hpp"

namespace fracstab {

struct CoercivityConstants {
  FracParams params;
  double c1 = 0.0;
  double c2 = 0.0;
  double c0 = 0.0;
  double c_spectral = 0.0;        // (1 - c0) / (2 n omega_n)
  double c_with_prefactor = 0.0;  // F(B) (1 - c0) / (2 n omega_n)
  double c = 0.0;                 // min of the two
  double c_closed_form = 0.0;     // (1/(2 n omega_n)) min{1 - c2, 1 - c1}
  double eps0 = 0.0;
};

CoercivityConstants compute_constants(const FracParams& p);

struct Gap {
  double raw = 0.0;     // -(t-s) + A_{t,k} - A_{s,k}
  double damped = 0.0;  // -(t-s) + c0 A_{t,k} - A_{s,k}, telescoped from k = 2 for k >= 2
};

// At k = 2 the damped gap equals (c0 - c1) A_{t,2}, which is exactly zero whenever c1 >= c2.

Gap gap(const FracParams& p, int k);

/// (A_{s,k+1} - A_{s,k}) / (A_{t,k+1} - A_{t,k})
double increment_ratio(const FracParams& p, int k);

struct ScanRow {
  int k = 0;
  double raw_gap = 0.0;
  double damped_gap = 0.0;
  double increment_ratio = 0.0;
  bool c2_bound_ok = true;
};

struct ScanReport {
  FracParams params;
  int Kmax = 0;
  CoercivityConstants constants;
  std::vector<ScanRow> rows;  // k = 0 .. Kmax
  int gap_violations = 0;        // damped gap <= 0 for some 2 <= k <= Kmax
  int ratio_violations = 0;      // increment ratio >= c2 for some 1 <= k <= Kmax
  int monotone_violations = 0;   // damped gap decreasing for some k >= 2
  double min_margin = 0.0;       // smallest damped gap over k >= 2
  int min_margin_k = 2;
  int violations() const { return gap_violations + ratio_violations + monotone_violations; }
};

ScanReport scan_positivity(const FracParams& p, int Kmax);

/// CSV rows with header n,s,t,k,raw_gap,damped_gap,increment_ratio,c2_bound_ok.
std::string scan_csv_header();
std::string scan_csv_rows(const ScanReport& r);

struct CoercivityBound {
  double half_second_variation = 0.0;  // (1/2) delta^2 F(0)[u,u]
  double norm_squared = 0.0;           // ||u||^2_{H^{(1+t)/2}}
  double c = 0.0;                      // min(c_spectral, c_with_prefactor)
  double floor = 0.0;                  // c * norm_squared
  bool holds = false;                  // half_second_variation >= floor
  double c_corrected = 0.0;            // constant valid for the full Sobolev norm
  double corrected_floor = 0.0;
  bool corrected_holds = false;
  double ratio = 0.0;                  // half_second_variation / floor
};

/// Lower bound check for (1/2) delta^2 F(0)[u,u] against c ||u||^2_{H^{(1+t)/2}}.
/// u must have zero degree-0 and degree-1 coefficients up to second order
/// (as produced by project_constraints); the comparison is returned, never thrown.
CoercivityBound coercivity_lower_bound(const SphereFunction& u, const FracParams& p);

/// min over k >= 2 of A_{t,k} / (1 + lambda_{k,t}) (attained at k = 2).
double sobolev_to_A_factor(int n, double t, int Kmax = 64);

}  // namespace fracstab

#include "fracstab/coercivity.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "fracstab/functionals.hpp"
#include "fracstab/geometry.hpp"
#include "fracstab/specfun.hpp"

namespace fracstab {

CoercivityConstants compute_constants(const FracParams& in) {
  const FracParams p = FracParams::make(in.n, in.s, in.t);
  const double n = p.n, s = p.s, t = p.t;
  CoercivityConstants c;
  c.params = p;
  c.c1 = 1.0 - ((t - s) / (2.0 * n * t)) * (n * n + n * (t + s) - t * s) / (n - s);
  c.c2 = s * (n + s) / (t * (n + t));
  c.c0 = std::max(c.c1, c.c2);
  const double area = sphere_area(p.n);
  c.c_spectral = (1.0 - c.c0) / (2.0 * area);
  c.c_with_prefactor = ratio_F_ball(p) * c.c_spectral;
  c.c = std::min(c.c_spectral, c.c_with_prefactor);
  c.c_closed_form = std::min(1.0 - c.c2, ((t - s) / (n - s)) * (n * n + n * (t + s) - t * s) / (2.0 * n * t)) / (2.0 * area);
  c.eps0 = low_mode_constants(p.n, 0.5).eps0;
  return c;
}

Gap gap(const FracParams& p, int k) {
  const double at = A_coefficient(p.n, p.t, k), as = A_coefficient(p.n, p.s, k);
  const auto cc = compute_constants(p);
  Gap g{-(p.t - p.s) + at - as, -(p.t - p.s) + cc.c0 * at - as};
  if (k >= 2) {
    // -(t-s) + c1 A_{t,2} - A_{s,2} = 0 by the definition of c1, so telescope from there
    double d = (cc.c0 - cc.c1) * A_coefficient(p.n, p.t, 2);
    for (int j = 2; j < k; ++j) d += cc.c0 * A_increment(p.n, p.t, j) - A_increment(p.n, p.s, j);
    g.damped = d;
  }
  return g;
}

double increment_ratio(const FracParams& p, int k) {
  return A_increment(p.n, p.s, k) / A_increment(p.n, p.t, k);
}

ScanReport scan_positivity(const FracParams& in, int Kmax) {
  const FracParams p = FracParams::make(in.n, in.s, in.t);
  if (Kmax < 2) throw std::invalid_argument("scan_positivity: Kmax must be >= 2");
  ScanReport rep;
  rep.params = p;
  rep.Kmax = Kmax;
  rep.constants = compute_constants(p);
  const auto ts = spectral_table(p.n, p.s, Kmax + 1);
  const auto tt = spectral_table(p.n, p.t, Kmax + 1);
  const double c0 = rep.constants.c0, c2 = rep.constants.c2;
  rep.min_margin = 1e300;
  double telescoped = (c0 - rep.constants.c1) * tt->A[2];
  for (int k = 0; k <= Kmax; ++k) {
    ScanRow row;
    row.k = k;
    row.raw_gap = -(p.t - p.s) + tt->A[k] - ts->A[k];
    if (k < 2) {
      row.damped_gap = -(p.t - p.s) + c0 * tt->A[k] - ts->A[k];
    } else {
      row.damped_gap = telescoped;
      telescoped += c0 * tt->increment[k] - ts->increment[k];
    }
    row.increment_ratio = ts->increment[k] / tt->increment[k];
    row.c2_bound_ok = (k == 0) || row.increment_ratio < c2;
    if (k >= 1 && !row.c2_bound_ok) ++rep.ratio_violations;
    if (k >= 2) {
      if (!(row.damped_gap > 0.0)) ++rep.gap_violations;
      if (row.damped_gap < rep.min_margin) {
        rep.min_margin = row.damped_gap;
        rep.min_margin_k = k;
      }
      if (k >= 3 && row.damped_gap < rep.rows.back().damped_gap) ++rep.monotone_violations;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

std::string scan_csv_header() { return "n,s,t,k,raw_gap,damped_gap,increment_ratio,c2_bound_ok\n"; }

std::string scan_csv_rows(const ScanReport& r) {
  std::string out;
  for (const auto& row : r.rows)
    out += fmt::format("{},{},{},{},{:.17g},{:.17g},{:.17g},{}\n", r.params.n, r.params.s, r.params.t, row.k,
                       row.raw_gap, row.damped_gap, row.increment_ratio, row.c2_bound_ok ? 1 : 0);
  return out;
}

double sobolev_to_A_factor(int n, double t, int Kmax) {
  const auto tab = spectral_table(n, t, std::max(Kmax, 2));
  double m = 1e300;
  for (int k = 2; k <= tab->K; ++k) m = std::min(m, tab->A[k] / (1.0 + tab->lambda[k]));
  return m;
}

CoercivityBound coercivity_lower_bound(const SphereFunction& u, const FracParams& p) {
  CoercivityBound b;
  const auto cc = compute_constants(p);
  b.half_second_variation = 0.5 * second_variation_F_at_zero(u, p);
  b.norm_squared = sobolev_norm_squared(u, p.t);
  b.c = cc.c;
  b.floor = b.c * b.norm_squared;
  b.holds = b.half_second_variation >= b.floor;
  b.ratio = b.floor > 0.0 ? b.half_second_variation / b.floor : 0.0;
  // A_{t,k} >= m_t (1 + lambda_{k,t}) on k >= 2 turns the spectral estimate into a Sobolev one;
  // half of it is kept to absorb the second-order degree 0 and 1 coefficients
  b.c_corrected = ratio_F_ball(p) * (1.0 - cc.c0) * sobolev_to_A_factor(p.n, p.t) / (4.0 * sphere_area(p.n));
  b.corrected_floor = b.c_corrected * b.norm_squared;
  b.corrected_holds = b.half_second_variation >= b.corrected_floor;
  return b;
}

}  // namespace fracstab

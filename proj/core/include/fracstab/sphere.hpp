#pragma once

#include <array>
#include <string>
#include <vector>

namespace fracstab {

using Point = std::array<double, 3>;  // n = 2 uses the first two components

struct QuadratureGrid {
  int n = 2;
  int n_theta = 0;  // n = 2: number of nodes; n = 3: Gauss-Legendre colatitude nodes
  int n_phi = 0;    // n = 3: uniform longitude nodes
  std::vector<Point> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// n = 2: `resolution` equispaced nodes. n = 3: resolution x 2*resolution (GL x uniform).
/// Band limit K needs resolution >= 4K for products of degree-K data to stay exact.
QuadratureGrid make_grid(int n, int resolution);

/// Number of real harmonics of degree <= K.
int basis_size(int n, int K);
/// Flat position of Y_k^i (i is 1-based) in (k, i) lexicographic order.
int basis_index(int n, int k, int i);

/// Real orthonormal harmonics of degree <= K at x. `grad` (optional, size basis_size) receives
/// tangential gradients. n = 2 order per degree: cos, sin. n = 3: m = 0, then cos m, sin m.
void eval_basis(int n, int K, const Point& x, double* Y, Point* grad = nullptr);

class SphereFunction {
 public:
  SphereFunction() = default;
  SphereFunction(int n, int K);
  SphereFunction(int n, int K, std::vector<double> coeffs);

  /// The single normalized harmonic Y_k^i.
  static SphereFunction harmonic(int n, int K, int k, int i);
  static SphereFunction constant(int n, int K, double c);

  int n() const { return n_; }
  int K() const { return K_; }
  const std::vector<double>& coeffs() const { return a_; }
  std::vector<double>& coeffs() { return a_; }
  double coeff(int k, int i) const { return a_[basis_index(n_, k, i)]; }
  double& coeff(int k, int i) { return a_[basis_index(n_, k, i)]; }

  double evaluate(const Point& x) const;
  double evaluate(const Point& x, Point& grad) const;
  std::vector<double> samples(const std::vector<Point>& pts) const;

  /// Same function with band limit K2 (truncating when K2 < K).
  SphereFunction with_band(int K2) const;

  double l2_norm_squared() const;
  double mean() const;  // average over the sphere

  SphereFunction& operator+=(const SphereFunction& o);
  SphereFunction& operator*=(double c);
  friend SphereFunction operator+(SphereFunction a, const SphereFunction& b) { return a += b; }
  friend SphereFunction operator*(double c, SphereFunction a) { return a *= c; }
  friend SphereFunction operator-(SphereFunction a, const SphereFunction& b) { return a += (-1.0) * b; }

  /// {"n": ..., "K": ..., "coefficients": [...]} with coefficients in (k, i) lexicographic order.
  std::string to_json() const;
  static SphereFunction from_json(const std::string& text);

 private:
  int n_ = 2;
  int K_ = 0;
  std::vector<double> a_;
};

std::vector<double> synthesize(const SphereFunction& u, const QuadratureGrid& grid);

/// a_k^i = sum_j w_j u_j Y_k^i(x_j). Throws AliasingError when more than 1e-6 of the
/// sampled energy lies outside the band.
SphereFunction analyze(const std::vector<double>& samples, const QuadratureGrid& grid, int K);

enum class SeminormMethod { spectral, quadrature };

struct SeminormResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// [u]^2 of order (1+alpha)/2: double integral of (u(x)-u(y))^2 |x-y|^{-(n+alpha)}.
SeminormResult seminorm_gagliardo(const SphereFunction& u, double alpha, SeminormMethod method,
                                  double rel_tol = 1e-8, int resolution = 0);

/// ||u||^2_{L2} + [u]^2 of order (1+alpha)/2, spectral.
double sobolev_norm_squared(const SphereFunction& u, double alpha);

/// max|u| + max|grad u| over a dense grid.
double c1_norm_estimate(const SphereFunction& u);
double linf_norm_estimate(const SphereFunction& u);

/// Dense evaluation grid used for sup-norm estimates.
QuadratureGrid dense_grid(int n, int K);

}  // namespace fracstab

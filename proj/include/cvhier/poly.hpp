#pragma once

// Sparse multivariate polynomials over the 2n phase-space variables and the
// Gaussian differential operator exp(1/2 (d + c)^T M (d + c)) evaluated at 0.

#include <map>
#include <vector>

#include "cvhier/linalg.hpp"

namespace cvh {

using Exponents = std::vector<int>;

inline constexpr double kPruneTol = 1e-15;

class MultiPoly {
 public:
  explicit MultiPoly(int nvars = 0) : nvars_(nvars) {}

  static MultiPoly constant(int nvars, Complex value);
  static MultiPoly variable(int nvars, int index);
  /// Linear form sum_i coeffs_i x_i + offset.
  static MultiPoly linear(const CVec& coeffs, Complex offset = 0.0);

  int nvars() const { return nvars_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::size_t size() const { return terms_.size(); }
  const std::map<Exponents, Complex>& terms() const { return terms_; }

  /// Adds `coeff` to the monomial with exponents `e`; prunes |c| <= 1e-15.
  void add_term(const Exponents& e, Complex coeff);
  Complex coefficient(const Exponents& e) const;

  Complex eval(const CVec& x) const;
  Complex eval(const Vec& x) const { return eval(CVec(x.cast<Complex>())); }

  MultiPoly derivative(int var) const;

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(Complex s);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(MultiPoly a, Complex s) { return a *= s; }
  friend MultiPoly operator*(Complex s, MultiPoly a) { return a *= s; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);

  /// Largest coefficient difference over the union of monomials.
  static double max_coeff_diff(const MultiPoly& a, const MultiPoly& b);

 private:
  void check_same_vars(const MultiPoly& o) const;

  int nvars_;
  std::map<Exponents, Complex> terms_;
};

/// Returns q(x) = p(A x + b).
MultiPoly poly_affine_substitute(const MultiPoly& p, const CMat& a, const CVec& b);
MultiPoly poly_affine_substitute(const MultiPoly& p, const Mat& a, const Vec& b);

/// (1/2) sum_lm M_lm d_l d_m p.
MultiPoly half_laplacian(const MultiPoly& p, const CMat& m);

/// sum_j (1/j!) (1/2 d^T M d)^j p; the series terminates at j = floor(deg/2).
MultiPoly heat_series(const MultiPoly& p, const CMat& m);

/// M = (V^-1 + S^-1)^-1 and c = S^-1 X for a Gaussian factor with covariance S and mean X.
struct QuadraticKernel {
  CMat m;
  CVec c;
  QuadraticKernel(const CMat& m_in, const CVec& c_in);
};

/// [exp(1/2 (d + c)^T M (d + c)) p](0) = exp(1/2 c^T M c) * heat_series(p, M)(M c).
Complex apply_gaussian_operator(const MultiPoly& p, const QuadraticKernel& k);

}  // namespace cvh

#pragma once

// Tensor-grid Gauss-Hermite integration of polynomial x complex-Gaussian
// integrands. Used as an independent check of the closed-form matrix elements;
// cost grows as nodes^(2n), so it is limited to n <= 2.

#include "cvhier/probes.hpp"
#include "cvhier/state.hpp"

namespace cvh {

inline constexpr int kDefaultQuadratureNodes = 40;
inline constexpr int kMaxQuadratureModes = 2;

/// Nodes and weights for int f(z) exp(-z^2/2) dz (probabilists' Hermite).
struct GaussHermiteRule {
  Vec nodes;
  Vec weights;
};

GaussHermiteRule gauss_hermite(int count);

/// int f(x) exp(-1/2 x^T A x + b^T x + log_c) dx over R^d. Requires Re(A) positive definite.
Complex gaussian_poly_integral(const MultiPoly& f, const CMat& a, const CVec& b, Complex log_c,
                               int nodes = kDefaultQuadratureNodes);

/// (2 pi)^n int W_rho(x) symbol(x) dx.
Complex quadrature_matrix_element(const PolyGaussianState& state, const GaussianWeylSymbol& symbol,
                                  int nodes = kDefaultQuadratureNodes);

/// int W_rho(x) dx.
double quadrature_normalization(const PolyGaussianState& state, int nodes = kDefaultQuadratureNodes);

}  // namespace cvh

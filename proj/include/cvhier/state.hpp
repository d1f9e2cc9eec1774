#pragma once

#include "cvhier/poly.hpp"
#include "cvhier/symplectic.hpp"

namespace cvh {

/// Wigner function F(x) * N(x; mean, V): a Gaussian envelope times a polynomial.
struct PolyGaussianState {
  GaussianEnvelope envelope;
  MultiPoly poly;

  explicit PolyGaussianState(GaussianEnvelope env)
      : envelope(std::move(env)), poly(MultiPoly::constant(envelope.dim(), 1.0)) {}

  PolyGaussianState(GaussianEnvelope env, MultiPoly f) : envelope(std::move(env)), poly(std::move(f)) {
    if (poly.nvars() != envelope.dim())
      throw ValidationError("polynomial has " + std::to_string(poly.nvars()) + " variables, state needs " +
                            std::to_string(envelope.dim()));
  }

  int modes() const { return envelope.modes(); }
  bool is_gaussian() const {
    return poly.is_constant() && std::abs(poly.coefficient(Exponents(envelope.dim(), 0)) - Complex(1.0)) < 1e-14;
  }
};

}  // namespace cvh

#pragma once

// Evaluation of the separability functional tau_{k,n} for polynomial-Gaussian
// states and Gaussian probe vectors.

#include <map>
#include <vector>

#include "cvhier/probes.hpp"
#include "cvhier/state.hpp"

namespace cvh {

inline constexpr double kDiagonalClampTol = 1e-10;

/// Weights a_j^{(k,n)} of the bipartition terms.
struct CoefficientScheme {
  int k = 2;
  int n = 2;
  std::map<int, double> coefficients;
  /// Set when the weights come from the built-in interpolation for 2 < k < n.
  bool heuristic = false;

  double a(int j) const;
  double sum() const;

  /// k = n: a_j = 1.  k = 2: a_j = 1/(2^{n-1}-1).  Otherwise a labelled heuristic.
  static CoefficientScheme for_level(int k, int n);
  /// User-supplied table; every bipartition index 1..2^{n-1}-1 must be present.
  static CoefficientScheme custom(int k, int n, std::map<int, double> table);
};

struct BipartitionTerm {
  int index;
  double a;
  /// <Phi_1j|rho|Phi_1j> and <Phi_2j|rho|Phi_2j>.
  double diag1;
  double diag2;
  /// a * sqrt(diag1 * diag2).
  double value;
};

struct HierarchyResult {
  double value;
  double first_term;
  std::vector<BipartitionTerm> per_bipartition;
  ProbeSet probes;
};

/// Tr(rho W^{-1}[symbol]) = (2 pi)^n int W_rho(x) symbol(x) dx, evaluated in closed form.
Complex matrix_element(const PolyGaussianState& state, const GaussianWeylSymbol& symbol);

HierarchyResult tau_general(const PolyGaussianState& state, const ProbeSet& ps, const CoefficientScheme& cs);

HierarchyResult tau_gaussian(const GaussianEnvelope& state, const ProbeSet& ps, const CoefficientScheme& cs);

/// Closed form for Sigma_Phi1 = Sigma_Phi2 = sigma and X_Phi1 - center = center - X_Phi2 = x,
/// with the center placed at the state's first moments.
double tau_symmetric(const GaussianEnvelope& state, const Vec& x, const Mat& sigma, const CoefficientScheme& cs);

/// Checks that `sigma` is block diagonal with pure 2x2 blocks.
void validate_probe_covariance(const Mat& sigma);

}  // namespace cvh

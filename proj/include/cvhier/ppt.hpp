#pragma once

// The matrix form of the Gaussian separability inequality with symmetric
// probes, its eigenvalue test and the infinite-squeezing limits that reduce
// it to the PPT criterion.

#include <vector>

#include "cvhier/probes.hpp"
#include "cvhier/symplectic.hpp"

namespace cvh {

inline constexpr double kZInequalityTol = 1e-8;

enum class SqueezeDirection { Momentum, Position };

/// (+) diag(1/(4r), r) over n modes; r -> 0 squeezes momentum, r -> inf position.
Mat squeezed_probe_covariance(int n, double r);

/// Z_j = 4 P_j (Sigma + V) P_j J^T (Sigma^{-1} + V^{-1})^{-1} J.
Mat z_matrix(const Mat& cov, const Mat& sigma, const Bipartition& b);

struct ZMatrixReport {
  Bipartition bipartition;
  double r = 0.0;
  std::vector<double> eigenvalues;
  double min_eig = 0.0;
  bool inequality_holds = false;
};

/// Spectrum of Z_j as generalized eigenvalues of 4 J^T (Sigma^{-1}+V^{-1})^{-1} J
/// against P_j (Sigma + V)^{-1} P_j, after Cholesky whitening of the latter.
ZMatrixReport z_spectrum(const Mat& cov, const Mat& sigma, const Bipartition& b, double r = 0.0);

/// Same, with every probe squeezed by r.
ZMatrixReport z_spectrum(const Mat& cov, double r, const Bipartition& b);

/// Closed-form r -> 0 (momentum) or r -> inf (position) limit of Z_1.
Mat z_limit_matrix(const TwoModeStandardForm& sf, SqueezeDirection dir);
/// Limit for the bipartition that singles out one mode of a pure three-mode state.
Mat z_limit_matrix(const ThreeModePureStandardForm& sf, SqueezeDirection dir, const Bipartition& b);

/// Mode separated from the rest by a three-mode bipartition.
int singled_out_mode(const Bipartition& b);

struct ResemblanceCheck {
  Bipartition bipartition;
  SqueezeDirection direction;
  double r;
  double entry_deviation;     // max |Z(r) - limit| / max(1, max |limit|)
  double eigen_deviation;     // max relative gap to {1,..,1} u {4 nu~^2}
  bool passed;
};

struct ResemblanceReport {
  std::vector<ResemblanceCheck> checks;
  double max_entry_deviation = 0.0;
  double max_eigen_deviation = 0.0;
  bool passed = true;
};

inline constexpr double kResemblanceEntryTol = 1e-3;
inline constexpr double kResemblanceEigenTol = 1e-4;

ResemblanceReport verify_ppt_resemblance(const TwoModeStandardForm& sf,
                                         double entry_tol = kResemblanceEntryTol,
                                         double eigen_tol = kResemblanceEigenTol);
ResemblanceReport verify_ppt_resemblance(const ThreeModePureStandardForm& sf,
                                         double entry_tol = kResemblanceEntryTol,
                                         double eigen_tol = kResemblanceEigenTol);

}  // namespace cvh

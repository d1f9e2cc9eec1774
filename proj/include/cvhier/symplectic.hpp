#pragma once

// Phase-space linear algebra for n-mode Gaussian states.
//
// Quadratures are always ordered (q1, p1, ..., qn, pn). Mode indices in this
// API are zero-based; the CLI translates from one-based user input.

#include <array>
#include <vector>

#include "cvhier/linalg.hpp"

namespace cvh {

inline constexpr double kPhysicalityTol = 1e-9;
inline constexpr double kSymmetryTol = 1e-12;

/// Block-diagonal symplectic form J_n = (+) [[0,-1],[1,0]].
Mat symplectic_form(int n);

/// Set of modes (zero-based, strictly increasing) defining one side of a split.
using ModeGroup = std::vector<int>;

/// Covariance matrix and first moments of an n-mode Gaussian Wigner factor.
class GaussianEnvelope {
 public:
  /// Symmetrizes `cov`, checks positive definiteness and, when
  /// `require_physical` is set, the uncertainty bound nu_k >= 1/2.
  explicit GaussianEnvelope(const Mat& cov, bool require_physical = true);
  GaussianEnvelope(const Mat& cov, const Vec& mean, bool require_physical = true);

  int modes() const { return n_; }
  int dim() const { return 2 * n_; }
  const Mat& cov() const { return cov_; }
  const Vec& mean() const { return mean_; }
  bool has_mean() const { return mean_.cwiseAbs().maxCoeff() > 0.0; }

  static GaussianEnvelope vacuum(int n);

 private:
  int n_;
  Mat cov_;
  Vec mean_;
};

/// Sorted symplectic eigenvalues nu_1 <= ... <= nu_n of an SPD matrix, from
/// the spectrum {+-i nu_k} of J^T V.
std::vector<double> symplectic_eigenvalues(const Mat& cov);

/// Flips the momentum sign of every mode in `group`: returns L V L.
Mat partial_transpose(const Mat& cov, const ModeGroup& group);

struct PptVerdict {
  bool separable;
  double min_nu;
};

/// PPT test on the bipartition group | rest.
PptVerdict ppt_separable(const Mat& cov, const ModeGroup& group);

/// Coefficients (D1, D2, D3) of lambda^6 + D1 lambda^4 + D2 lambda^2 + D3, the
/// characteristic polynomial of J_3^T V. Computed as sums of principal minors.
std::array<double, 3> symplectic_invariants_3mode(const Mat& cov);

/// Sum of all principal minors of order k.
double principal_minor_sum(const Mat& m, int k);

/// V = (1/2) [[a,0,c,0],[0,a,0,d],[c,0,b,0],[0,d,0,b]].
struct TwoModeStandardForm {
  double a, b, c, d;
  Mat matrix() const;
};

/// Pure three-mode standard form; e+/- couple positions/momenta of modes i,j.
struct ThreeModePureStandardForm {
  double a1, a2, a3;
  double e12p, e12m, e13p, e13m, e23p, e23m;
  Mat matrix() const;
  bool is_pure(double tol = 1e-6) const;
  /// Same state with modes relabelled so that `first` becomes mode 0.
  ThreeModePureStandardForm relabelled(int first) const;
};

/// Local symplectic reduction of an arbitrary two-mode covariance to standard form.
TwoModeStandardForm to_two_mode_standard_form(const Mat& cov);

/// Local squeezing that equalises each mode's q/p variances. Succeeds only
/// when the result has the pure three-mode standard-form pattern.
ThreeModePureStandardForm to_three_mode_standard_form(const Mat& cov, double tol = 1e-9);

/// For a 2x2 SPD block A returns S with det S = 1 and S A S^T = sqrt(det A) I.
Eigen::Matrix2d local_williamson(const Eigen::Matrix2d& block);

}  // namespace cvh

#pragma once

// Gaussian probe vectors |phi_m>, bipartitions and the Weyl-symbol moments of
// the operators |Phi_2><Phi_1|, |Phi_1j><Phi_1j| and |Phi_2j><Phi_2j|.

#include <vector>

#include "cvhier/linalg.hpp"

namespace cvh {

inline constexpr double kPurityTol = 1e-9;

/// Pure single-mode Gaussian: first moments and covariance with det = 1/4.
class SingleModeProbe {
 public:
  SingleModeProbe(const Eigen::Vector2d& mean, const Eigen::Matrix2d& sigma);

  /// Sigma = (1/2) R(theta) diag(e^{-2s}, e^{2s}) R(theta)^T.
  static SingleModeProbe squeezed(double s, double theta, const Eigen::Vector2d& mean = Eigen::Vector2d::Zero());
  /// Sigma = diag(1/(4r), r); r -> 0 squeezes the momentum.
  static SingleModeProbe from_squeezing_parameter(double r, const Eigen::Vector2d& mean = Eigen::Vector2d::Zero());
  static SingleModeProbe vacuum(const Eigen::Vector2d& mean = Eigen::Vector2d::Zero());

  const Eigen::Vector2d& mean() const { return mean_; }
  const Eigen::Matrix2d& sigma() const { return sigma_; }

 private:
  Eigen::Vector2d mean_;
  Eigen::Matrix2d sigma_;
};

/// 2n probes: indices 0..n-1 build |Phi_1>, n..2n-1 build |Phi_2>.
class ProbeSet {
 public:
  ProbeSet(int n, std::vector<SingleModeProbe> probes);

  int modes() const { return n_; }
  const SingleModeProbe& operator[](int i) const { return probes_.at(i); }
  const std::vector<SingleModeProbe>& probes() const { return probes_; }

  Vec x_phi1() const;
  Vec x_phi2() const;
  Mat sigma_phi1() const;
  Mat sigma_phi2() const;

 private:
  int n_;
  std::vector<SingleModeProbe> probes_;
};

/// Probes with Sigma_m = Sigma_{n+m} = block m of `sigma`, X_Phi1 = center + x and X_Phi2 = center - x.
ProbeSet symmetric_probe_set(const Vec& x, const Mat& sigma, const Vec& center);

/// Canonical bipartition: v[0] = 0, v not all zero; index j is v read as a binary number.
struct Bipartition {
  int index;
  std::vector<int> v;

  int modes() const { return static_cast<int>(v.size()); }
  /// Diagonal of P_j = (+) (-1)^{v_m} I_2.
  Vec sign_diagonal() const;
  Mat sign_matrix() const { return sign_diagonal().asDiagonal(); }
  /// Modes with v_m = 1 (zero-based).
  std::vector<int> group() const;

  static Bipartition from_vector(std::vector<int> v);
};

/// The 2^{n-1} - 1 inequivalent bipartitions in lexicographic order.
std::vector<Bipartition> enumerate_bipartitions(int n);

/// W(x) = N exp(-1/2 (x - mean)^T sigma^{-1} (x - mean)), with N = exp(lognorm).
struct GaussianWeylSymbol {
  CVec mean;
  CMat sigma;
  Complex lognorm;

  int dim() const { return static_cast<int>(mean.size()); }
  /// Weyl symbol of the pure-state projector with real moments; |N| = pi^{-n}.
  static GaussianWeylSymbol projector(const Vec& mean, const Mat& sigma);
};

/// Sigma_{m,l} for the single-mode operator |phi_l><phi_m|.
Eigen::Matrix2cd offdiag_block(const Eigen::Matrix2d& sigma_m, const Eigen::Matrix2d& sigma_l);

/// Weyl symbol of |Phi_2><Phi_1|. Only |N| is carried; its phase is set to zero.
GaussianWeylSymbol composite_offdiag_moments(const ProbeSet& ps);

struct PermutedMoments {
  GaussianWeylSymbol phi1j;
  GaussianWeylSymbol phi2j;
};

PermutedMoments permuted_moments(const ProbeSet& ps, const Bipartition& b);

}  // namespace cvh

#pragma once

// Outcome statistics of a Gaussian measurement on a Gaussian state, the
// measurement form of the symmetric-probe functional, and a Monte-Carlo
// estimator of it from simulated outcomes.

#include <cstdint>
#include <iosfwd>
#include <string>

#include "cvhier/hierarchy.hpp"

namespace cvh {

inline constexpr int kMinMonteCarloSamples = 1000;
inline constexpr int kDefaultBootstrap = 200;

struct GaussianMeasurement {
  Mat sigma_m;

  explicit GaussianMeasurement(const Mat& sigma);
  int dim() const { return static_cast<int>(sigma_m.rows()); }
};

/// Outcomes stored one per row.
struct OutcomeSample {
  Mat samples;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(samples.rows()); }
  int dim() const { return static_cast<int>(samples.cols()); }
};

/// N(X_M; mean, sigma_M + V).
double outcome_pdf(const GaussianEnvelope& state, const GaussianMeasurement& m, const Vec& x_m);

/// (2 pi)^{-n} int e^{-i w^T X} p(X) dX.
Complex characteristic_fn(const GaussianEnvelope& state, const GaussianMeasurement& m, const Vec& omega);

/// Outcome i is mean + L z_i with L L^T = sigma_M + V and z_i drawn from
/// stream i of CounterRng(seed, .), so any subset of rows is reproducible.
OutcomeSample sample_outcomes(const GaussianEnvelope& state, const GaussianMeasurement& m, int count,
                              std::uint64_t seed, int jobs = 1);

/// Symmetric-probe functional from the outcome statistics of the measurement
/// with covariance sigma: the omega-integral of the characteristic function
/// minus (2 pi)^n sum_j a_j p(P_j X). Zero-mean states only.
double tau_from_statistics(const GaussianEnvelope& state, const Mat& sigma, const Vec& x,
                           const CoefficientScheme& cs);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  double first_term = 0.0;
  double subtrahend = 0.0;
  double bandwidth = 0.0;
  int samples = 0;
  int bootstrap = 0;
};

struct MonteCarloConfig {
  int bootstrap = kDefaultBootstrap;
  std::uint64_t seed = 1;
  /// Gauss-Hermite nodes per omega axis.
  int omega_nodes = 3;
  int jobs = 1;
};

/// First term from the empirical characteristic function on a Gauss-Hermite
/// omega grid; p(P_j X) from a whitened Gaussian KDE (Silverman bandwidth)
/// with the kernel smoothing divided out; stderr from bootstrap resamples.
MonteCarloEstimate estimate_tau_monte_carlo(const OutcomeSample& sample, const Mat& sigma, const Vec& x,
                                            const CoefficientScheme& cs, const MonteCarloConfig& cfg = {});

/// CSV with a "# seed=S" line, a q1,p1,... header and one outcome per line.
void write_outcome_csv(std::ostream& out, const OutcomeSample& sample);
OutcomeSample read_outcome_csv(std::istream& in);

}  // namespace cvh

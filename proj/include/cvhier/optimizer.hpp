#pragma once

// Multi-start Nelder-Mead maximisation of tau over Gaussian probe parameters.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "cvhier/hierarchy.hpp"

namespace cvh {

inline constexpr double kDetectionThreshold = 1e-9;
inline constexpr double kDefaultSMax = 6.0;

/// Probe parameters. Symmetric layout: one (s, theta) per mode shared by both
/// product vectors and a displacement x with X_Phi1 = center + x, X_Phi2 = center - x.
/// Full layout: one (s, theta) and one mean per probe (2n probes).
struct ProbeParameterization {
  bool symmetric = true;
  std::vector<double> s;
  std::vector<double> theta;
  Vec x;

  int modes() const { return symmetric ? static_cast<int>(s.size()) : static_cast<int>(s.size() / 2); }
  /// Block-diagonal covariance of the first product vector (symmetric layout: of both).
  Mat sigma() const;
  ProbeSet probe_set(const Vec& center) const;

  static ProbeParameterization vacuum(int n, bool symmetric = true);
};

/// Minimises f from `start` with initial simplex steps `step`.
struct NelderMeadResult {
  Vec x;
  double value;
  int evaluations;
  bool converged;
};

NelderMeadResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& start, const Vec& step,
                             int max_evals, double tol);

struct OptimizerConfig {
  int restarts = 16;
  std::uint64_t seed = 1;
  int max_evals = 2000;
  double tol = 1e-8;
  double s_max = kDefaultSMax;
  double threshold = kDetectionThreshold;
  bool symmetric = true;
  int jobs = 1;
  /// Extra starts built from the leading directions of the small-X expansion.
  int spectral_starts = 4;
};

struct OptimizationReport {
  double best_value;
  ProbeParameterization best_params;
  int restarts;
  int converged_restarts;
  long evaluations;
  /// Best value of every restart, in start order (warm starts first).
  std::vector<double> restart_values;

  bool detected(double threshold = kDetectionThreshold) const { return best_value > threshold; }
};

/// tau at the given parameters: the closed symmetric form for Gaussian states
/// with the symmetric layout, the general evaluator otherwise.
double evaluate_tau(const PolyGaussianState& state, const ProbeParameterization& p, const CoefficientScheme& cs);

OptimizationReport maximize_tau(const PolyGaussianState& state, const CoefficientScheme& cs,
                                const OptimizerConfig& config,
                                const std::vector<ProbeParameterization>& warm_starts = {});

OptimizationReport maximize_tau(const GaussianEnvelope& state, const CoefficientScheme& cs,
                                const OptimizerConfig& config,
                                const std::vector<ProbeParameterization>& warm_starts = {});

struct Classification {
  bool detected;
  double value;
  OptimizationReport report;
};

/// Runs maximize_tau for each k (default 2..n, built-in schemes), highest k first;
/// the best parameters of each level seed the next lower one.
std::map<int, Classification> classify_state(const PolyGaussianState& state, const OptimizerConfig& config,
                                             std::vector<int> ks = {});

}  // namespace cvh

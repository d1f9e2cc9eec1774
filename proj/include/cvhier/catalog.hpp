#pragma once

// Example states: the mixed continuous-variable GHZ family, the coherently
// photon-subtracted two-mode squeezed vacuum, and thermal-loss evolution.

#include <vector>

#include "cvhier/state.hpp"

namespace cvh {

// Pure: tritter applied to one p- and two q-squeezed vacua (pure at g = 0).
// Printed: a = (e^{2r}+cosh 2r)/2, b = (e^{-2r}+cosh 2r)/2, c = sinh(2r)/2,
// which is mixed at g = 0 for r > 0.
enum class GhzForm { Pure, Printed };

struct GhzParams {
  double r = 0.0;
  double g = 0.0;
  GhzForm form = GhzForm::Pure;
};

/// V = V_GHZ(r) + g I_6, same sign pattern for both forms.
GaussianEnvelope ghz_state(const GhzParams& p);

struct CpsTsvsParams {
  double r = 0.0;
  Complex alpha = 1.0;
  Complex beta = 0.0;
};

PolyGaussianState cps_tsvs_state(const CpsTsvsParams& p);

/// r = 0, alpha = |alpha| e^{i sqrt(2)/2}, beta = sqrt(1 - |alpha|^2) e^{i pi/2}.
CpsTsvsParams cps_tsvs_reference_params(double abs_alpha);

/// Identical thermal-loss bath on every mode.
struct ThermalChannel {
  double gamma = 1.0;
  double n_th = 0.0;

  ThermalChannel(double gamma_in, double n_th_in);
  Mat drift(int n) const;
  Mat diffusion(int n) const;
  /// sigma(infinity) = (1 + 2 n_th)/2 I.
  double stationary_variance() const { return 0.5 * (1.0 + 2.0 * n_th); }
};

/// Propagates the Wigner function with the channel's Green function.
PolyGaussianState green_propagate(const PolyGaussianState& state, const ThermalChannel& ch, double t);

struct PolynomialCheck {
  double max_deviation;
  MultiPoly propagated;
  MultiPoly closed_form;
};

/// Compares the propagated polynomial with F(e^{gt/2}(eps^-1 sigma + I)^-1 x) +
/// 1/2 sum (eps^-1 + sigma^-1)^-1_lm d_l d_m F(e^{gt/2} x)|_0. Requires degree <= 2, zero mean, t > 0.
PolynomialCheck evolved_polynomial_check(const PolyGaussianState& state, const ThermalChannel& ch, double t);

/// lo, lo + step, ... up to hi (inclusive within half a step).
std::vector<double> linear_grid(double lo, double hi, double step);

namespace presets {
std::vector<double> ghz_g_grid();
std::vector<double> ghz_r_grid();
std::vector<double> cps_alpha_grid();
std::vector<double> evolution_time_grid();
std::vector<double> evolution_nth();
}  // namespace presets

}  // namespace cvh

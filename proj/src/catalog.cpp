#include "cvhier/catalog.hpp"

#include <cmath>

namespace cvh {

GaussianEnvelope ghz_state(const GhzParams& p) {
  if (!(p.r >= 0.0) || !(p.g >= 0.0)) throw ValidationError("ghz: r and g must be non-negative");
  const double ep = std::exp(2.0 * p.r), em = std::exp(-2.0 * p.r);
  double a, b, c;
  if (p.form == GhzForm::Pure) {
    a = (2.0 * ep + em) / 3.0;
    b = (2.0 * em + ep) / 3.0;
    c = (ep - em) / 3.0;
  } else {
    const double c2 = std::cosh(2.0 * p.r);
    a = 0.5 * (ep + c2);
    b = 0.5 * (em + c2);
    c = 0.5 * std::sinh(2.0 * p.r);
  }
  Mat v(6, 6);
  v << a,  0,  -c, 0,  -c, 0,
       0,  b,  0,  c,  0,  c,
       -c, 0,  a,  0,  -c, 0,
       0,  c,  0,  b,  0,  c,
       -c, 0,  -c, 0,  a,  0,
       0,  c,  0,  c,  0,  b;
  return GaussianEnvelope(0.5 * v + p.g * Mat::Identity(6, 6));
}

PolyGaussianState cps_tsvs_state(const CpsTsvsParams& p) {
  const double na = std::norm(p.alpha), nb = std::norm(p.beta);
  if (std::abs(na + nb - 1.0) > 1e-9) throw ValidationError("cps-tsvs: |alpha|^2 + |beta|^2 must be 1");
  if (!std::isfinite(p.r)) throw ValidationError("cps-tsvs: r must be finite");
  const Complex w = std::conj(p.alpha) * p.beta;
  const double wr = w.real(), wi = w.imag();
  const double ch = std::cosh(p.r), sh = std::sinh(p.r);
  const double c2 = 2.0 * ch * ch, s2 = 2.0 * sh * sh, cs = 4.0 * ch * sh;

  // monomials in (x1, p1, x2, p2)
  MultiPoly f(4);
  auto add = [&](int a, int b, int c, int d, double coeff) { f.add_term({a, b, c, d}, coeff); };
  add(0, 0, 0, 0, -1.0);
  add(2, 0, 0, 0, (c2 + s2) * na + cs * na);
  add(0, 2, 0, 0, (c2 + s2) * na - cs * na);
  add(0, 0, 2, 0, (c2 + s2) * nb + cs * nb);
  add(0, 0, 0, 2, (c2 + s2) * nb - cs * nb);
  add(1, 0, 1, 0, 2.0 * wr * (c2 + s2) + 2.0 * cs * wr);
  add(0, 1, 0, 1, 2.0 * wr * (c2 + s2) - 2.0 * cs * wr);
  // (x1 p2 - p1 x2) wi enters with -c2 and +s2
  add(1, 0, 0, 1, 2.0 * wi * (s2 - c2));
  add(0, 1, 1, 0, -2.0 * wi * (s2 - c2));

  const double e = std::exp(-2.0 * p.r), f2 = std::exp(2.0 * p.r);
  Vec d(4);
  d << e, f2, e, f2;
  return PolyGaussianState(GaussianEnvelope(Mat(0.5 * d.asDiagonal())), f);
}

CpsTsvsParams cps_tsvs_reference_params(double abs_alpha) {
  if (!(abs_alpha >= 0.0 && abs_alpha <= 1.0)) throw ValidationError("cps-tsvs: |alpha| must lie in [0, 1]");
  const Complex i(0.0, 1.0);
  return {0.0, abs_alpha * std::exp(i * (std::sqrt(2.0) / 2.0)),
          std::sqrt(1.0 - abs_alpha * abs_alpha) * std::exp(i * (M_PI / 2.0))};
}

ThermalChannel::ThermalChannel(double gamma_in, double n_th_in) : gamma(gamma_in), n_th(n_th_in) {
  if (!(gamma > 0.0)) throw ValidationError("channel: gamma must be positive");
  if (!(n_th >= 0.0)) throw ValidationError("channel: n_th must be non-negative");
}

Mat ThermalChannel::drift(int n) const { return 0.5 * gamma * Mat::Identity(2 * n, 2 * n); }

Mat ThermalChannel::diffusion(int n) const { return 0.25 * gamma * (1.0 + 2.0 * n_th) * Mat::Identity(2 * n, 2 * n); }

PolyGaussianState green_propagate(const PolyGaussianState& state, const ThermalChannel& ch, double t) {
  if (!(t >= 0.0)) throw ValidationError("evolution time must be non-negative");
  if (t == 0.0) return state;
  const int d = state.envelope.dim();
  const Mat& v0 = state.envelope.cov();
  const Mat id = Mat::Identity(d, d);
  const double decay = std::exp(-ch.gamma * t);
  const Mat eps = decay * v0;
  const Mat sigma = (1.0 - decay) * ch.stationary_variance() * id;
  const Mat vt = linalg::symmetrized(Mat(eps + sigma));
  const Eigen::LLT<Mat> llt(vt);
  // x' given x: mean e^{gt/2} K x + (I - K) xbar0, covariance e^{gt} eps (eps + sigma)^-1 sigma
  const Mat k = llt.solve(eps).transpose();
  const Mat cond = linalg::symmetrized(Mat(k * sigma)) / decay;
  const Vec& xbar0 = state.envelope.mean();
  const Vec mean_t = std::sqrt(decay) * xbar0;
  MultiPoly f = state.poly;
  if (!f.is_constant()) {
    const MultiPoly smoothed = heat_series(f, cond.cast<Complex>());
    f = poly_affine_substitute(smoothed, Mat(k / std::sqrt(decay)), Vec((id - k) * xbar0));
  }
  return PolyGaussianState(GaussianEnvelope(vt, mean_t), f);
}

PolynomialCheck evolved_polynomial_check(const PolyGaussianState& state, const ThermalChannel& ch, double t) {
  if (state.poly.degree() > 2) throw ValidationError("closed-form check needs a polynomial of degree <= 2");
  if (state.envelope.has_mean()) throw ValidationError("closed-form check needs zero first moments");
  if (!(t > 0.0)) throw ValidationError("closed-form check needs t > 0");
  const int d = state.envelope.dim();
  const double decay = std::exp(-ch.gamma * t);
  const double grow = std::exp(0.5 * ch.gamma * t);
  const Mat eps = decay * state.envelope.cov();
  const Mat sigma = (1.0 - decay) * ch.stationary_variance() * Mat::Identity(d, d);
  const Mat eps_inv = eps.inverse();
  const Mat sigma_inv = sigma.inverse();
  const Mat lin = grow * (eps_inv * sigma + Mat::Identity(d, d)).inverse();
  const Mat h = (eps_inv + sigma_inv).inverse();

  MultiPoly closed = poly_affine_substitute(state.poly, lin, Vec::Zero(d));
  const MultiPoly scaled = poly_affine_substitute(state.poly, Mat(grow * Mat::Identity(d, d)), Vec::Zero(d));
  const CVec zero = CVec::Zero(d);
  Complex second = 0.0;
  for (int l = 0; l < d; ++l) {
    const MultiPoly dl = scaled.derivative(l);
    for (int m = 0; m < d; ++m) second += 0.5 * h(l, m) * dl.derivative(m).eval(zero);
  }
  closed += MultiPoly::constant(d, second);

  const MultiPoly prop = green_propagate(state, ch, t).poly;
  return {MultiPoly::max_coeff_diff(prop, closed), prop, closed};
}

std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw ValidationError("grid: need step > 0 and hi >= lo");
  std::vector<double> out;
  const int count = static_cast<int>(std::floor((hi - lo) / step + 0.5));
  for (int i = 0; i <= count; ++i) out.push_back(lo + i * step);
  return out;
}

namespace presets {
std::vector<double> ghz_g_grid() { return linear_grid(0.0, 1.2, 0.02); }
std::vector<double> ghz_r_grid() { return linear_grid(0.0, 1.2, 0.02); }
std::vector<double> cps_alpha_grid() { return linear_grid(0.0, 1.0, 0.02); }
std::vector<double> evolution_time_grid() { return linear_grid(0.0, 3.0, 0.05); }
std::vector<double> evolution_nth() { return {2.0, 4.0}; }
}  // namespace presets

}  // namespace cvh

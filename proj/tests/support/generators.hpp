#pragma once

// Hand-rolled random generators for property tests.

#include <cmath>
#include <random>

#include "cvhier/probes.hpp"
#include "cvhier/state.hpp"

namespace cvh::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

inline Eigen::Matrix2d rotation(double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

/// Single-mode symplectic: rotation * squeeze * rotation.
inline Eigen::Matrix2d random_local_symplectic(Gen& g, double max_squeeze) {
  const double s = g.uniform(-max_squeeze, max_squeeze);
  Eigen::Matrix2d sq = Eigen::Vector2d(std::exp(-s), std::exp(s)).asDiagonal();
  return rotation(g.uniform(0, 2 * M_PI)) * sq * rotation(g.uniform(0, 2 * M_PI));
}

/// Beam splitter between modes i and j with phase-free mixing angle.
inline Mat beam_splitter(int n, int i, int j, double theta) {
  Mat s = Mat::Identity(2 * n, 2 * n);
  const double c = std::cos(theta), sn = std::sin(theta);
  for (int k = 0; k < 2; ++k) {
    s(2 * i + k, 2 * i + k) = c;
    s(2 * j + k, 2 * j + k) = c;
    s(2 * i + k, 2 * j + k) = sn;
    s(2 * j + k, 2 * i + k) = -sn;
  }
  return s;
}

/// Two-mode squeezer between modes i and j.
inline Mat two_mode_squeezer(int n, int i, int j, double r) {
  Mat s = Mat::Identity(2 * n, 2 * n);
  const double ch = std::cosh(r), sh = std::sinh(r);
  s(2 * i, 2 * i) = s(2 * i + 1, 2 * i + 1) = s(2 * j, 2 * j) = s(2 * j + 1, 2 * j + 1) = ch;
  s(2 * i, 2 * j) = s(2 * j, 2 * i) = sh;
  s(2 * i + 1, 2 * j + 1) = s(2 * j + 1, 2 * i + 1) = -sh;
  return s;
}

inline Mat random_symplectic(Gen& g, int n, double max_squeeze = 0.8) {
  Mat s = Mat::Identity(2 * n, 2 * n);
  for (int layer = 0; layer < 2; ++layer) {
    Mat local = Mat::Zero(2 * n, 2 * n);
    for (int m = 0; m < n; ++m) local.block<2, 2>(2 * m, 2 * m) = random_local_symplectic(g, max_squeeze);
    s = local * s;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        s = beam_splitter(n, i, j, g.uniform(0, 2 * M_PI)) * s;
        s = two_mode_squeezer(n, i, j, g.uniform(-max_squeeze, max_squeeze)) * s;
      }
  }
  return s;
}

/// S diag(nu) S^T with nu_k in [1/2, 1/2 + max_excess].
inline Mat random_physical_cov(Gen& g, int n, double max_excess = 1.0, double max_squeeze = 0.8) {
  Vec d(2 * n);
  for (int m = 0; m < n; ++m) d(2 * m) = d(2 * m + 1) = 0.5 + g.uniform(0.0, max_excess);
  const Mat s = random_symplectic(g, n, max_squeeze);
  return linalg::symmetrized(s * d.asDiagonal() * s.transpose());
}

/// Product of random single-mode states, each with random excess noise.
inline Mat random_product_cov(Gen& g, int n, double max_excess = 1.0, double max_squeeze = 0.8) {
  Mat v = Mat::Zero(2 * n, 2 * n);
  for (int m = 0; m < n; ++m) {
    const Eigen::Matrix2d s = random_local_symplectic(g, max_squeeze);
    v.block<2, 2>(2 * m, 2 * m) = (0.5 + g.uniform(0.0, max_excess)) * s * s.transpose();
  }
  return linalg::symmetrized(v);
}

inline Vec random_vec(Gen& g, int dim, double scale) {
  Vec x(dim);
  for (int i = 0; i < dim; ++i) x(i) = scale * g.normal();
  return x;
}

inline MultiPoly random_poly(Gen& g, int nvars, int degree, int terms, bool real = false) {
  MultiPoly p = MultiPoly::constant(nvars, 1.0);
  for (int t = 0; t < terms; ++t) {
    Exponents e(nvars, 0);
    const int deg = g.integer(1, degree);
    for (int k = 0; k < deg; ++k) ++e[g.integer(0, nvars - 1)];
    p.add_term(e, Complex(g.normal(), real ? 0.0 : g.normal()));
  }
  return p;
}

inline SingleModeProbe random_probe(Gen& g, double max_squeeze, double mean_scale) {
  return SingleModeProbe::squeezed(g.uniform(-max_squeeze, max_squeeze), g.uniform(0, M_PI),
                                   Eigen::Vector2d(mean_scale * g.normal(), mean_scale * g.normal()));
}

inline ProbeSet random_probe_set(Gen& g, int n, double max_squeeze = 1.0, double mean_scale = 1.0) {
  std::vector<SingleModeProbe> probes;
  for (int i = 0; i < 2 * n; ++i) probes.push_back(random_probe(g, max_squeeze, mean_scale));
  return ProbeSet(n, std::move(probes));
}

/// Block-diagonal pure probe covariance.
inline Mat random_probe_sigma(Gen& g, int n, double max_squeeze = 1.0) {
  Mat s = Mat::Zero(2 * n, 2 * n);
  for (int m = 0; m < n; ++m)
    s.block<2, 2>(2 * m, 2 * m) = SingleModeProbe::squeezed(g.uniform(-max_squeeze, max_squeeze), g.uniform(0, M_PI)).sigma();
  return s;
}

inline Mat tmsv(double r) {
  Mat v = Mat::Zero(4, 4);
  const double c = std::cosh(2 * r), s = std::sinh(2 * r);
  v.diagonal().setConstant(0.5 * c);
  v(0, 2) = v(2, 0) = 0.5 * s;
  v(1, 3) = v(3, 1) = -0.5 * s;
  return v;
}

/// Pure n-mode state: single-mode squeezed vacua mixed by a random real
/// orthogonal network, so positions never correlate with momenta.
inline Mat random_real_network_pure_cov(Gen& g, int n, double max_squeeze = 1.0) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g.normal();
  const Mat o = Eigen::HouseholderQR<Mat>(a).householderQ();
  Mat s = Mat::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(2 * i, 2 * j) = s(2 * i + 1, 2 * j + 1) = o(i, j);
  Vec d(2 * n);
  for (int m = 0; m < n; ++m) {
    const double r = g.uniform(-max_squeeze, max_squeeze);
    d(2 * m) = 0.5 * std::exp(-2 * r);
    d(2 * m + 1) = 0.5 * std::exp(2 * r);
  }
  return linalg::symmetrized(s * d.asDiagonal() * s.transpose());
}

}  // namespace cvh::testing

#include "cvhier/ppt.hpp"

#include <algorithm>
#include <cmath>

#include "cvhier/linalg.hpp"

namespace cvh {

namespace {

constexpr double kLimitSmall = 1e-6;
constexpr double kLimitLarge = 1e6;

void check_inputs(const Mat& cov, const Mat& sigma, const Bipartition& b) {
  const int dim = static_cast<int>(cov.rows());
  if (cov.cols() != dim || sigma.rows() != dim || sigma.cols() != dim || dim != 2 * b.modes())
    throw ValidationError("z matrix: dimension mismatch");
  if (!linalg::is_spd(cov)) throw NumericalError("z matrix: covariance not positive definite");
  if (!linalg::is_spd(sigma)) throw NumericalError("z matrix: probe covariance not positive definite");
}

// (Sigma^{-1} + V^{-1})^{-1} = Sigma (Sigma + V)^{-1} V, without inverting either factor alone
Mat harmonic_part(const Mat& cov, const Mat& sigma) {
  const Eigen::LLT<Mat> llt(sigma + cov);
  return linalg::symmetrized(Mat(sigma * llt.solve(cov)));
}

Mat mode_permutation(const int order[3]) {
  Mat q = Mat::Zero(6, 6);
  for (int k = 0; k < 3; ++k) q.block<2, 2>(2 * k, 2 * order[k]).setIdentity();
  return q;
}

std::vector<double> expected_spectrum(const Mat& cov, const Bipartition& b) {
  std::vector<double> want(b.modes(), 1.0);
  for (double nu : symplectic_eigenvalues(partial_transpose(cov, b.group()))) want.push_back(4.0 * nu * nu);
  std::sort(want.begin(), want.end());
  return want;
}

ResemblanceCheck run_check(const Mat& cov, const Mat& limit, const Bipartition& b, SqueezeDirection dir,
                           double r, double entry_tol, double eigen_tol) {
  const Mat z = z_matrix(cov, squeezed_probe_covariance(b.modes(), r), b);
  ResemblanceCheck c{b, dir, r, 0.0, 0.0, false};
  c.entry_deviation = linalg::max_abs(Mat(z - limit)) / std::max(1.0, linalg::max_abs(limit));
  const auto got = z_spectrum(cov, r, b).eigenvalues;
  const auto want = expected_spectrum(cov, b);
  for (std::size_t i = 0; i < want.size(); ++i)
    c.eigen_deviation = std::max(c.eigen_deviation, std::abs(got[i] - want[i]) / std::max(1.0, want[i]));
  c.passed = c.entry_deviation <= entry_tol && c.eigen_deviation <= eigen_tol;
  return c;
}

void add(ResemblanceReport& rep, const ResemblanceCheck& c) {
  rep.checks.push_back(c);
  rep.max_entry_deviation = std::max(rep.max_entry_deviation, c.entry_deviation);
  rep.max_eigen_deviation = std::max(rep.max_eigen_deviation, c.eigen_deviation);
  rep.passed = rep.passed && c.passed;
}

}  // namespace

Mat squeezed_probe_covariance(int n, double r) {
  if (n < 1) throw ValidationError("probe covariance: need at least one mode");
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("probe covariance: r must be positive and finite");
  Mat s = Mat::Zero(2 * n, 2 * n);
  for (int m = 0; m < n; ++m) {
    s(2 * m, 2 * m) = 1.0 / (4.0 * r);
    s(2 * m + 1, 2 * m + 1) = r;
  }
  return s;
}

Mat z_matrix(const Mat& cov, const Mat& sigma, const Bipartition& b) {
  check_inputs(cov, sigma, b);
  const Mat p = b.sign_matrix();
  const Mat j = symplectic_form(b.modes());
  return 4.0 * p * (sigma + cov) * p * j.transpose() * harmonic_part(cov, sigma) * j;
}

ZMatrixReport z_spectrum(const Mat& cov, const Mat& sigma, const Bipartition& b, double r) {
  check_inputs(cov, sigma, b);
  const Mat p = b.sign_matrix();
  const Mat j = symplectic_form(b.modes());
  const Mat a = linalg::symmetrized(Mat(4.0 * j.transpose() * harmonic_part(cov, sigma) * j));
  const Mat inv_sum = Eigen::LLT<Mat>(sigma + cov).solve(Mat::Identity(cov.rows(), cov.cols()));
  const Mat bm = linalg::symmetrized(Mat(p * inv_sum * p));
  const Eigen::LLT<Mat> llt(bm);
  if (llt.info() != Eigen::Success) throw NumericalError("z spectrum: whitening factor not positive definite");
  const Mat l = llt.matrixL();
  const Mat half = l.triangularView<Eigen::Lower>().solve(a);
  const Mat c = l.triangularView<Eigen::Lower>().solve(Mat(half.transpose()));
  Eigen::SelfAdjointEigenSolver<Mat> es(linalg::symmetrized(c), Eigen::EigenvaluesOnly);
  ZMatrixReport rep{b, r, {}, 0.0, false};
  for (int i = 0; i < es.eigenvalues().size(); ++i) rep.eigenvalues.push_back(es.eigenvalues()(i));
  rep.min_eig = rep.eigenvalues.front();
  rep.inequality_holds = rep.min_eig >= 1.0 - kZInequalityTol;
  return rep;
}

ZMatrixReport z_spectrum(const Mat& cov, double r, const Bipartition& b) {
  return z_spectrum(cov, squeezed_probe_covariance(b.modes(), r), b, r);
}

Mat z_limit_matrix(const TwoModeStandardForm& sf, SqueezeDirection dir) {
  const double a = sf.a, b = sf.b, c = sf.c, d = sf.d;
  Mat z = Mat::Identity(4, 4);
  if (dir == SqueezeDirection::Momentum) {
    z(1, 1) = a * a - c * d;
    z(1, 3) = a * c - b * d;
    z(3, 1) = b * c - a * d;
    z(3, 3) = b * b - c * d;
  } else {
    z(0, 0) = a * a - c * d;
    z(0, 2) = -b * c + a * d;
    z(2, 0) = -a * c + b * d;
    z(2, 2) = b * b - c * d;
  }
  return z;
}

int singled_out_mode(const Bipartition& b) {
  if (b.modes() != 3) throw ValidationError("singled-out mode: expected a three-mode bipartition");
  for (int m = 0; m < 3; ++m) {
    const int o1 = (m + 1) % 3, o2 = (m + 2) % 3;
    if (b.v[o1] == b.v[o2] && b.v[m] != b.v[o1]) return m;
  }
  throw ValidationError("singled-out mode: invalid bipartition");
}

Mat z_limit_matrix(const ThreeModePureStandardForm& full, SqueezeDirection dir, const Bipartition& b) {
  static constexpr int kOrder[3][3] = {{0, 1, 2}, {1, 0, 2}, {2, 0, 1}};
  const int first = singled_out_mode(b);
  const ThreeModePureStandardForm s = full.relabelled(first);
  const double a1 = s.a1, a2 = s.a2, a3 = s.a3;
  const double p12 = s.e12p, m12 = s.e12m, p13 = s.e13p, m13 = s.e13m, p23 = s.e23p, m23 = s.e23m;
  Mat z = Mat::Identity(6, 6);
  if (dir == SqueezeDirection::Momentum) {
    z(1, 1) = a1 * a1 - p13 * m13 - p12 * m12;
    z(1, 3) = a1 * p12 - a2 * m12 - m13 * p23;
    z(1, 5) = a1 * p13 - a3 * m13 - m12 * p23;
    z(3, 1) = a2 * p12 - a1 * m12 + p13 * m23;
    z(3, 3) = a2 * a2 - p12 * m12 + p23 * m23;
    z(3, 5) = a2 * p23 + a3 * m23 - m12 * p13;
    z(5, 1) = a3 * p13 - a1 * m13 + p12 * m23;
    z(5, 3) = a3 * p23 + a2 * m23 - m13 * p12;
    z(5, 5) = a3 * a3 - p13 * m13 + m23 * p23;
  } else {
    z(0, 0) = a1 * a1 - p13 * m13 - p12 * m12;
    z(0, 2) = a1 * m12 - a2 * p12 - p13 * m23;
    z(0, 4) = a1 * m13 - a3 * p13 - p12 * m23;
    z(2, 0) = a2 * m12 - a1 * p12 + m13 * p23;
    z(2, 2) = a2 * a2 - p12 * m12 + p23 * m23;
    z(2, 4) = a2 * m23 + a3 * p23 - p12 * m13;
    z(4, 0) = a3 * m13 - a1 * p13 + m12 * p23;
    z(4, 2) = a3 * m23 + a2 * p23 - p13 * m12;
    z(4, 4) = a3 * a3 - p13 * m13 + m23 * p23;
  }
  const Mat q = mode_permutation(kOrder[first]);
  return q.transpose() * z * q;
}

ResemblanceReport verify_ppt_resemblance(const TwoModeStandardForm& sf, double entry_tol, double eigen_tol) {
  const Mat cov = sf.matrix();
  const Bipartition b = Bipartition::from_vector({0, 1});
  ResemblanceReport rep;
  add(rep, run_check(cov, z_limit_matrix(sf, SqueezeDirection::Momentum), b, SqueezeDirection::Momentum,
                     kLimitSmall, entry_tol, eigen_tol));
  add(rep, run_check(cov, z_limit_matrix(sf, SqueezeDirection::Position), b, SqueezeDirection::Position,
                     kLimitLarge, entry_tol, eigen_tol));
  return rep;
}

ResemblanceReport verify_ppt_resemblance(const ThreeModePureStandardForm& sf, double entry_tol,
                                         double eigen_tol) {
  if (!sf.is_pure()) throw ValidationError("resemblance: three-mode form is not pure");
  const Mat cov = sf.matrix();
  ResemblanceReport rep;
  for (const auto& b : enumerate_bipartitions(3)) {
    add(rep, run_check(cov, z_limit_matrix(sf, SqueezeDirection::Momentum, b), b, SqueezeDirection::Momentum,
                       kLimitSmall, entry_tol, eigen_tol));
    add(rep, run_check(cov, z_limit_matrix(sf, SqueezeDirection::Position, b), b, SqueezeDirection::Position,
                       kLimitLarge, entry_tol, eigen_tol));
  }
  return rep;
}

}  // namespace cvh

#include "cvhier/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace cvh {

namespace {

void require_square_even(const Mat& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0) {
    std::ostringstream os;
    os << what << ": expected a 2n x 2n matrix, got " << m.rows() << "x" << m.cols();
    throw ValidationError(os.str());
  }
}

void require_symmetric(const Mat& m, const char* what) {
  const double scale = std::max(1.0, linalg::max_abs(m));
  if (linalg::asymmetry(m) > kSymmetryTol * scale) {
    throw ValidationError(std::string(what) + ": matrix is not symmetric");
  }
}

}  // namespace

Mat symplectic_form(int n) {
  Mat j = Mat::Zero(2 * n, 2 * n);
  for (int m = 0; m < n; ++m) {
    j(2 * m, 2 * m + 1) = -1.0;
    j(2 * m + 1, 2 * m) = 1.0;
  }
  return j;
}

GaussianEnvelope::GaussianEnvelope(const Mat& cov, bool require_physical)
    : GaussianEnvelope(cov, Vec::Zero(cov.rows()), require_physical) {}

GaussianEnvelope::GaussianEnvelope(const Mat& cov, const Vec& mean, bool require_physical) {
  require_square_even(cov, "covariance");
  require_symmetric(cov, "covariance");
  if (mean.size() != cov.rows()) {
    throw ValidationError("mean: expected " + std::to_string(cov.rows()) + " entries, got " +
                          std::to_string(mean.size()));
  }
  n_ = static_cast<int>(cov.rows() / 2);
  cov_ = linalg::symmetrized(cov);
  mean_ = mean;
  if (!linalg::is_spd(cov_)) throw ValidationError("covariance: not positive definite");
  if (require_physical) {
    const auto nu = symplectic_eigenvalues(cov_);
    if (nu.front() < 0.5 - kPhysicalityTol) {
      std::ostringstream os;
      os << "covariance: violates the uncertainty bound (smallest symplectic eigenvalue "
         << nu.front() << " < 1/2)";
      throw ValidationError(os.str());
    }
  }
}

GaussianEnvelope GaussianEnvelope::vacuum(int n) {
  return GaussianEnvelope(0.5 * Mat::Identity(2 * n, 2 * n));
}

std::vector<double> symplectic_eigenvalues(const Mat& cov) {
  require_square_even(cov, "symplectic_eigenvalues");
  require_symmetric(cov, "symplectic_eigenvalues");
  if (!linalg::is_spd(cov)) throw ValidationError("symplectic_eigenvalues: not positive definite");
  const int n = static_cast<int>(cov.rows() / 2);
  const Mat a = symplectic_form(n).transpose() * cov;
  Eigen::EigenSolver<Mat> es(a, false);
  if (es.info() != Eigen::Success) throw NumericalError("symplectic_eigenvalues: eigensolver failed");
  const auto ev = es.eigenvalues();
  const double scale = std::max(1.0, cov.norm());
  std::vector<double> mags;
  mags.reserve(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i).real()) > 1e-8 * scale) {
      throw NumericalError("symplectic_eigenvalues: eigenvalue with non-negligible real part");
    }
    mags.push_back(std::abs(ev(i).imag()));
  }
  std::sort(mags.begin(), mags.end());
  std::vector<double> nu(n);
  for (int k = 0; k < n; ++k) nu[k] = 0.5 * (mags[2 * k] + mags[2 * k + 1]);
  return nu;
}

Mat partial_transpose(const Mat& cov, const ModeGroup& group) {
  require_square_even(cov, "partial_transpose");
  const int n = static_cast<int>(cov.rows() / 2);
  std::vector<bool> flip(n, false);
  for (int m : group) {
    if (m < 0 || m >= n) throw InvalidBipartition("mode index out of range: " + std::to_string(m));
    flip[m] = true;
  }
  const auto count = std::count(flip.begin(), flip.end(), true);
  if (count == 0 || count == n) {
    throw InvalidBipartition("group must be a nonempty proper subset of the modes");
  }
  Vec lambda = Vec::Ones(2 * n);
  for (int m = 0; m < n; ++m)
    if (flip[m]) lambda(2 * m + 1) = -1.0;
  return lambda.asDiagonal() * cov * lambda.asDiagonal();
}

PptVerdict ppt_separable(const Mat& cov, const ModeGroup& group) {
  const auto nu = symplectic_eigenvalues(partial_transpose(cov, group));
  return {nu.front() >= 0.5 - kPhysicalityTol, nu.front()};
}

double principal_minor_sum(const Mat& m, int k) {
  const int d = static_cast<int>(m.rows());
  if (k == 0) return 1.0;
  if (k > d) return 0.0;
  double sum = 0.0;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    Mat sub(k, k);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) sub(r, c) = m(idx[r], idx[c]);
    sum += sub.determinant();
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == d - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
  return sum;
}

std::array<double, 3> symplectic_invariants_3mode(const Mat& cov) {
  if (cov.rows() != 6 || cov.cols() != 6) throw ValidationError("symplectic_invariants_3mode: expected 6x6");
  require_symmetric(cov, "symplectic_invariants_3mode");
  const Mat a = symplectic_form(3).transpose() * cov;
  return {principal_minor_sum(a, 2), principal_minor_sum(a, 4), principal_minor_sum(a, 6)};
}

Mat TwoModeStandardForm::matrix() const {
  Mat v(4, 4);
  v << a, 0, c, 0,
       0, a, 0, d,
       c, 0, b, 0,
       0, d, 0, b;
  return 0.5 * v;
}

Mat ThreeModePureStandardForm::matrix() const {
  Mat v(6, 6);
  v << a1,   0,    e12p, 0,    e13p, 0,
       0,    a1,   0,    e12m, 0,    e13m,
       e12p, 0,    a2,   0,    e23p, 0,
       0,    e12m, 0,    a2,   0,    e23m,
       e13p, 0,    e23p, 0,    a3,   0,
       0,    e13m, 0,    e23m, 0,    a3;
  return 0.5 * v;
}

bool ThreeModePureStandardForm::is_pure(double tol) const {
  const Mat v = matrix();
  if (!linalg::is_spd(v)) return false;
  for (double nu : symplectic_eigenvalues(v))
    if (std::abs(nu - 0.5) > tol) return false;
  return true;
}

ThreeModePureStandardForm ThreeModePureStandardForm::relabelled(int first) const {
  if (first < 0 || first > 2) throw ValidationError("relabelled: mode index out of range");
  static constexpr int kPerm[3][3] = {{0, 1, 2}, {1, 0, 2}, {2, 0, 1}};
  const int* p = kPerm[first];
  const double a[3] = {a1, a2, a3};
  double ep[3][3] = {{0, e12p, e13p}, {e12p, 0, e23p}, {e13p, e23p, 0}};
  double em[3][3] = {{0, e12m, e13m}, {e12m, 0, e23m}, {e13m, e23m, 0}};
  ThreeModePureStandardForm out{};
  out.a1 = a[p[0]];
  out.a2 = a[p[1]];
  out.a3 = a[p[2]];
  out.e12p = ep[p[0]][p[1]];
  out.e12m = em[p[0]][p[1]];
  out.e13p = ep[p[0]][p[2]];
  out.e13m = em[p[0]][p[2]];
  out.e23p = ep[p[1]][p[2]];
  out.e23m = em[p[1]][p[2]];
  return out;
}

Eigen::Matrix2d local_williamson(const Eigen::Matrix2d& block) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block);
  if (es.eigenvalues().minCoeff() <= 0.0) throw ValidationError("local block not positive definite");
  const Eigen::Matrix2d inv_sqrt =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
      es.eigenvectors().transpose();
  return std::pow(block.determinant(), 0.25) * inv_sqrt;
}

TwoModeStandardForm to_two_mode_standard_form(const Mat& cov) {
  if (cov.rows() != 4 || cov.cols() != 4) throw ValidationError("two-mode standard form: expected 4x4");
  const Mat v = linalg::symmetrized(cov);
  const Eigen::Matrix2d s1 = local_williamson(v.block<2, 2>(0, 0));
  const Eigen::Matrix2d s2 = local_williamson(v.block<2, 2>(2, 2));
  const Eigen::Matrix2d c = s1 * v.block<2, 2>(0, 2) * s2.transpose();
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix2d u = svd.matrixU();
  Eigen::Matrix2d w = svd.matrixV();
  Eigen::Vector2d sv = svd.singularValues();
  if (u.determinant() < 0) {
    u.col(1) *= -1.0;
    sv(1) = -sv(1);
  }
  if (w.determinant() < 0) {
    w.col(1) *= -1.0;
    sv(1) = -sv(1);
  }
  TwoModeStandardForm sf{};
  sf.a = 2.0 * std::sqrt(v.block<2, 2>(0, 0).determinant());
  sf.b = 2.0 * std::sqrt(v.block<2, 2>(2, 2).determinant());
  sf.c = 2.0 * sv(0);
  sf.d = 2.0 * sv(1);
  return sf;
}

ThreeModePureStandardForm to_three_mode_standard_form(const Mat& cov, double tol) {
  if (cov.rows() != 6 || cov.cols() != 6) throw ValidationError("three-mode standard form: expected 6x6");
  const Mat v = linalg::symmetrized(cov);
  Mat s = Mat::Zero(6, 6);
  for (int m = 0; m < 3; ++m) s.block<2, 2>(2 * m, 2 * m) = local_williamson(v.block<2, 2>(2 * m, 2 * m));
  const Mat w = s * v * s.transpose();
  const double scale = std::max(1.0, linalg::max_abs(w));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Eigen::Matrix2d blk = w.block<2, 2>(2 * i, 2 * j);
      if (std::abs(blk(0, 1)) > tol * scale || std::abs(blk(1, 0)) > tol * scale)
        throw ValidationError("covariance does not reduce to the three-mode standard-form pattern");
    }
  ThreeModePureStandardForm sf{};
  sf.a1 = 2.0 * w(0, 0);
  sf.a2 = 2.0 * w(2, 2);
  sf.a3 = 2.0 * w(4, 4);
  sf.e12p = 2.0 * w(0, 2);
  sf.e12m = 2.0 * w(1, 3);
  sf.e13p = 2.0 * w(0, 4);
  sf.e13m = 2.0 * w(1, 5);
  sf.e23p = 2.0 * w(2, 4);
  sf.e23m = 2.0 * w(3, 5);
  return sf;
}

}  // namespace cvh

#include "cvhier/probes.hpp"

#include <cmath>
#include <sstream>

namespace cvh {

namespace {

const Eigen::Matrix2d kJ1 = (Eigen::Matrix2d() << 0.0, -1.0, 1.0, 0.0).finished();

Mat block_diag(const std::vector<Eigen::Matrix2d>& blocks) {
  const int n = static_cast<int>(blocks.size());
  Mat out = Mat::Zero(2 * n, 2 * n);
  for (int m = 0; m < n; ++m) out.block<2, 2>(2 * m, 2 * m) = blocks[m];
  return out;
}

}  // namespace

SingleModeProbe::SingleModeProbe(const Eigen::Vector2d& mean, const Eigen::Matrix2d& sigma)
    : mean_(mean), sigma_(0.5 * (sigma + sigma.transpose())) {
  if (!mean.allFinite() || !sigma.allFinite()) throw ValidationError("probe: non-finite moments");
  if (std::abs(sigma(0, 1) - sigma(1, 0)) > 1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff()))
    throw ValidationError("probe: covariance not symmetric");
  const double scale = std::max(1.0, sigma_.squaredNorm());
  if (std::abs(sigma_.determinant() - 0.25) > kPurityTol * scale) {
    std::ostringstream os;
    os << "probe: det(Sigma) = " << sigma_.determinant() << ", a pure probe needs 1/4";
    throw ValidationError(os.str());
  }
  if (sigma_(0, 0) <= 0.0 || sigma_(1, 1) <= 0.0) throw ValidationError("probe: covariance not positive definite");
}

SingleModeProbe SingleModeProbe::squeezed(double s, double theta, const Eigen::Vector2d& mean) {
  const double c = std::cos(theta), sn = std::sin(theta);
  Eigen::Matrix2d rot;
  rot << c, -sn, sn, c;
  const Eigen::Vector2d d(0.5 * std::exp(-2.0 * s), 0.5 * std::exp(2.0 * s));
  Eigen::Matrix2d sigma = rot * d.asDiagonal() * rot.transpose();
  return SingleModeProbe(mean, sigma);
}

SingleModeProbe SingleModeProbe::from_squeezing_parameter(double r, const Eigen::Vector2d& mean) {
  if (!(r > 0.0)) throw ValidationError("probe: squeezing parameter must be positive");
  return SingleModeProbe(mean, Eigen::Vector2d(1.0 / (4.0 * r), r).asDiagonal().toDenseMatrix());
}

SingleModeProbe SingleModeProbe::vacuum(const Eigen::Vector2d& mean) {
  return SingleModeProbe(mean, 0.5 * Eigen::Matrix2d::Identity());
}

ProbeSet::ProbeSet(int n, std::vector<SingleModeProbe> probes) : n_(n), probes_(std::move(probes)) {
  if (n < 1) throw ValidationError("probe set: need at least one mode");
  if (static_cast<int>(probes_.size()) != 2 * n)
    throw ValidationError("probe set: expected " + std::to_string(2 * n) + " probes, got " +
                          std::to_string(probes_.size()));
}

Vec ProbeSet::x_phi1() const {
  Vec x(2 * n_);
  for (int m = 0; m < n_; ++m) x.segment<2>(2 * m) = probes_[m].mean();
  return x;
}

Vec ProbeSet::x_phi2() const {
  Vec x(2 * n_);
  for (int m = 0; m < n_; ++m) x.segment<2>(2 * m) = probes_[n_ + m].mean();
  return x;
}

Mat ProbeSet::sigma_phi1() const {
  std::vector<Eigen::Matrix2d> b;
  for (int m = 0; m < n_; ++m) b.push_back(probes_[m].sigma());
  return block_diag(b);
}

Mat ProbeSet::sigma_phi2() const {
  std::vector<Eigen::Matrix2d> b;
  for (int m = 0; m < n_; ++m) b.push_back(probes_[n_ + m].sigma());
  return block_diag(b);
}

ProbeSet symmetric_probe_set(const Vec& x, const Mat& sigma, const Vec& center) {
  const int dim = static_cast<int>(x.size());
  if (dim % 2 != 0 || sigma.rows() != dim || sigma.cols() != dim || center.size() != dim)
    throw ValidationError("symmetric_probe_set: dimension mismatch");
  const int n = dim / 2;
  std::vector<SingleModeProbe> first, second;
  for (int m = 0; m < n; ++m) {
    const Eigen::Matrix2d blk = sigma.block<2, 2>(2 * m, 2 * m);
    first.emplace_back(center.segment<2>(2 * m) + x.segment<2>(2 * m), blk);
    second.emplace_back(center.segment<2>(2 * m) - x.segment<2>(2 * m), blk);
  }
  first.insert(first.end(), second.begin(), second.end());
  return ProbeSet(n, std::move(first));
}

Vec Bipartition::sign_diagonal() const {
  Vec d(2 * v.size());
  for (std::size_t m = 0; m < v.size(); ++m) d(2 * m) = d(2 * m + 1) = v[m] ? -1.0 : 1.0;
  return d;
}

std::vector<int> Bipartition::group() const {
  std::vector<int> g;
  for (std::size_t m = 0; m < v.size(); ++m)
    if (v[m]) g.push_back(static_cast<int>(m));
  return g;
}

Bipartition Bipartition::from_vector(std::vector<int> v) {
  if (v.size() < 2) throw InvalidBipartition("bipartition needs at least two modes");
  for (int& x : v) {
    if (x != 0 && x != 1) throw InvalidBipartition("bipartition entries must be 0 or 1");
  }
  if (v[0] == 1)
    for (int& x : v) x = 1 - x;
  int index = 0;
  for (int x : v) index = 2 * index + x;
  if (index == 0) throw InvalidBipartition("bipartition must split the modes into two nonempty groups");
  return {index, std::move(v)};
}

std::vector<Bipartition> enumerate_bipartitions(int n) {
  if (n < 2) throw ValidationError("bipartitions need n >= 2 modes");
  if (n > 20) throw ValidationError("too many modes for bipartition enumeration");
  std::vector<Bipartition> out;
  const int count = (1 << (n - 1)) - 1;
  for (int j = 1; j <= count; ++j) {
    std::vector<int> v(n);
    for (int m = 0; m < n; ++m) v[m] = (j >> (n - 1 - m)) & 1;
    out.push_back({j, std::move(v)});
  }
  return out;
}

GaussianWeylSymbol GaussianWeylSymbol::projector(const Vec& mean, const Mat& sigma) {
  const int n = static_cast<int>(mean.size() / 2);
  return {mean.cast<Complex>(), sigma.cast<Complex>(), Complex(-n * std::log(M_PI), 0.0)};
}

Eigen::Matrix2cd offdiag_block(const Eigen::Matrix2d& sigma_m, const Eigen::Matrix2d& sigma_l) {
  const Eigen::Matrix2d sum = sigma_m + sigma_l;
  const double det = sum.determinant();
  if (!(det > 0.0)) throw NumericalError("offdiag_block: singular probe covariance sum");
  const Eigen::Matrix2d im = sigma_m * kJ1.transpose() * sigma_l - sigma_l * kJ1.transpose() * sigma_m;
  Eigen::Matrix2cd out;
  out.real() = sum / (2.0 * det);
  out.imag() = im / (2.0 * det);
  return out;
}

GaussianWeylSymbol composite_offdiag_moments(const ProbeSet& ps) {
  const int n = ps.modes();
  CMat sigma = CMat::Zero(2 * n, 2 * n);
  double log_abs_n = 0.0;
  for (int m = 0; m < n; ++m) {
    const auto& pm = ps[m];
    const auto& pl = ps[n + m];
    sigma.block<2, 2>(2 * m, 2 * m) = offdiag_block(pm.sigma(), pl.sigma());
    const Eigen::Matrix2d sum = pm.sigma() + pl.sigma();
    const double det = sum.determinant();
    const Eigen::Vector2d xm = pm.mean() - pl.mean();
    const double quad = xm.dot(kJ1.transpose() * sum * kJ1 * xm);
    log_abs_n += -quad / (4.0 * det) - std::log(M_PI) - 0.25 * std::log(det);
  }
  const Vec x1 = ps.x_phi1();
  const Vec x2 = ps.x_phi2();
  Mat jn = Mat::Zero(2 * n, 2 * n);
  for (int m = 0; m < n; ++m) jn.block<2, 2>(2 * m, 2 * m) = kJ1;
  const CVec mean = (0.5 * (x1 + x2)).cast<Complex>() + Complex(0.0, 1.0) * (sigma * (jn * (x1 - x2)).cast<Complex>());
  return {mean, sigma, Complex(log_abs_n, 0.0)};
}

PermutedMoments permuted_moments(const ProbeSet& ps, const Bipartition& b) {
  const int n = ps.modes();
  if (b.modes() != n) throw InvalidBipartition("bipartition and probe set disagree on the mode count");
  Vec x1(2 * n), x2(2 * n);
  Mat s1 = Mat::Zero(2 * n, 2 * n), s2 = Mat::Zero(2 * n, 2 * n);
  for (int m = 0; m < n; ++m) {
    const auto& a = ps[m + n * b.v[m]];
    const auto& c = ps[m + n - n * b.v[m]];
    x1.segment<2>(2 * m) = a.mean();
    s1.block<2, 2>(2 * m, 2 * m) = a.sigma();
    x2.segment<2>(2 * m) = c.mean();
    s2.block<2, 2>(2 * m, 2 * m) = c.sigma();
  }
  return {GaussianWeylSymbol::projector(x1, s1), GaussianWeylSymbol::projector(x2, s2)};
}

}  // namespace cvh

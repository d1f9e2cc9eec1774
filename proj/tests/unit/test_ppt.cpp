#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "cvhier/catalog.hpp"
#include "cvhier/ppt.hpp"
#include "support/generators.hpp"

using namespace cvh;
using cvh::testing::Gen;

namespace {

std::vector<double> product_form_spectrum(const Mat& z, double* max_imag) {
  Eigen::EigenSolver<Mat> es(z);
  std::vector<double> out;
  double spread = 0.0, imag = 0.0;
  for (int i = 0; i < z.rows(); ++i) {
    out.push_back(es.eigenvalues()(i).real());
    spread = std::max(spread, std::abs(es.eigenvalues()(i)));
    imag = std::max(imag, std::abs(es.eigenvalues()(i).imag()));
  }
  *max_imag = imag / spread;
  std::sort(out.begin(), out.end());
  return out;
}

double det_minus(const Mat& z, double lambda) { return (z - lambda * Mat::Identity(z.rows(), z.cols())).determinant(); }

}  // namespace

TEST_CASE("Z matrix of vacuum with vacuum probes is the identity") {
  const Mat half = 0.5 * Mat::Identity(4, 4);
  for (const auto& b : enumerate_bipartitions(2)) {
    CHECK(linalg::max_abs(Mat(z_matrix(half, half, b) - Mat::Identity(4, 4))) < 1e-14);
    for (double e : z_spectrum(half, half, b).eigenvalues) CHECK(e == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("whitened spectrum matches the product form and is real") {
  Gen g(71);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = g.integer(2, 3);
    const Mat v = cvh::testing::random_physical_cov(g, n);
    const Mat s = cvh::testing::random_probe_sigma(g, n);
    const auto bs = enumerate_bipartitions(n);
    const auto& b = bs[g.integer(0, static_cast<int>(bs.size()) - 1)];
    double imag = 0.0;
    const auto want = product_form_spectrum(z_matrix(v, s, b), &imag);
    CHECK(imag < 1e-8);
    const auto got = z_spectrum(v, s, b).eigenvalues;
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-9 * std::max(1.0, want[i]));
    for (double e : got) CHECK(e > 0.0);
  }
}

TEST_CASE("two-mode squeezed vacuum at strong probe squeezing") {
  const TwoModeStandardForm sf{std::cosh(1.0), std::cosh(1.0), std::sinh(1.0), -std::sinh(1.0)};
  const auto rep = z_spectrum(sf.matrix(), 1e-6, Bipartition::from_vector({0, 1}));
  const std::vector<double> want{std::exp(-2.0), 1.0, 1.0, std::exp(2.0)};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(rep.eigenvalues[i] - want[i]) < 1e-4 * want[i]);
  CHECK_FALSE(rep.inequality_holds);
  CHECK(verify_ppt_resemblance(sf).passed);
}

TEST_CASE("two-mode limit matrices") {
  const Mat vac_limit = z_limit_matrix(TwoModeStandardForm{1, 1, 0, 0}, SqueezeDirection::Momentum);
  CHECK(linalg::max_abs(Mat(vac_limit - Mat::Identity(4, 4))) == 0.0);

  Gen g(72);
  for (int trial = 0; trial < 30; ++trial) {
    const auto sf = to_two_mode_standard_form(cvh::testing::random_physical_cov(g, 2));
    // characteristic polynomial (l/4)^2 - D1 (l/4) + D2 with the closed-form invariants
    const double d1 = 0.25 * (sf.a * sf.a + sf.b * sf.b - 2 * sf.c * sf.d);
    const double d2 = (sf.a * sf.b - sf.c * sf.c) * (sf.a * sf.b - sf.d * sf.d) / 16.0;
    const double disc = std::sqrt(d1 * d1 - 4 * d2);
    const std::vector<double> roots{4 * (d1 - disc) / 2, 4 * (d1 + disc) / 2};
    for (auto dir : {SqueezeDirection::Momentum, SqueezeDirection::Position}) {
      const Mat z = z_limit_matrix(sf, dir);
      // double root at 1
      const double h = 1e-4;
      CHECK(std::abs(det_minus(z, 1.0)) < 1e-9 * std::max(1.0, std::abs(det_minus(z, 0.0))));
      const double slope = (det_minus(z, 1.0 + h) - det_minus(z, 1.0 - h)) / (2 * h);
      CHECK(std::abs(slope) < 1e-6 * std::max(1.0, std::abs(det_minus(z, 0.0))));
      for (double l : roots) CHECK(std::abs(det_minus(z, l)) < 1e-8 * std::max(1.0, l * l * l * l));
    }
    // limit roots are 4 nu~^2
    const auto nus = symplectic_eigenvalues(partial_transpose(sf.matrix(), {1}));
    CHECK(roots[0] == doctest::Approx(4 * nus[0] * nus[0]).epsilon(1e-9));
    CHECK(roots[1] == doctest::Approx(4 * nus[1] * nus[1]).epsilon(1e-9));
    const auto rep = verify_ppt_resemblance(sf);
    CHECK(rep.passed);
    CHECK(rep.checks.size() == 2);
  }
}

TEST_CASE("strong-squeezing verdict agrees with PPT on two-mode states") {
  Gen g(73);
  int agree = 0, total = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Mat v = cvh::testing::random_physical_cov(g, 2, 1.0, 0.6);
    const auto sf = to_two_mode_standard_form(v);
    const auto ppt = ppt_separable(v, {1});
    if (std::abs(4 * ppt.min_nu * ppt.min_nu - 1.0) < 1e-4) continue;
    const auto z = z_spectrum(sf.matrix(), 1e-6, Bipartition::from_vector({0, 1}));
    ++total;
    if (z.inequality_holds == ppt.separable) ++agree;
  }
  CHECK(total > 150);
  CHECK(agree == total);
}

TEST_CASE("product states satisfy the inequality for any probe squeezing") {
  Gen g(74);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = g.integer(2, 3);
    const Mat v = cvh::testing::random_product_cov(g, n);
    for (const auto& b : enumerate_bipartitions(n)) {
      CHECK(z_spectrum(v, 1e-6, b).min_eig >= 1.0 - 1e-6);
      CHECK(z_spectrum(v, cvh::testing::random_probe_sigma(g, n), b).min_eig >= 1.0 - 1e-9);
    }
  }
}

TEST_CASE("pure three-mode states reproduce the PPT spectra") {
  for (double r : {0.2, 0.5, 1.0}) {
    const auto sf = to_three_mode_standard_form(ghz_state({r, 0.0}).cov());
    CHECK(sf.is_pure());
    const auto rep = verify_ppt_resemblance(sf);
    CHECK(rep.checks.size() == 6);
    CHECK(rep.passed);
    CHECK(rep.max_entry_deviation < 1e-3);
    CHECK(rep.max_eigen_deviation < 1e-4);
  }
  Gen g(75);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sf = to_three_mode_standard_form(cvh::testing::random_real_network_pure_cov(g, 3, 0.8), 1e-8);
    const auto rep = verify_ppt_resemblance(sf);
    CHECK(rep.passed);
    // limit matrix spectrum: three unit eigenvalues plus 4 nu~^2
    for (const auto& b : enumerate_bipartitions(3)) {
      const Mat z = z_limit_matrix(sf, SqueezeDirection::Momentum, b);
      for (double nu : symplectic_eigenvalues(partial_transpose(sf.matrix(), b.group())))
        CHECK(std::abs(det_minus(z, 4 * nu * nu)) < 1e-7 * std::pow(std::max(1.0, 4 * nu * nu), 6));
    }
  }
}

TEST_CASE("singled-out mode and error paths") {
  CHECK(singled_out_mode(Bipartition::from_vector({0, 1, 1})) == 0);
  CHECK(singled_out_mode(Bipartition::from_vector({0, 1, 0})) == 1);
  CHECK(singled_out_mode(Bipartition::from_vector({0, 0, 1})) == 2);
  CHECK_THROWS_AS(singled_out_mode(Bipartition::from_vector({0, 1})), ValidationError);
  const Mat half = 0.5 * Mat::Identity(4, 4);
  Mat bad = half;
  bad(0, 0) = -1.0;
  CHECK_THROWS_AS(z_matrix(bad, half, Bipartition::from_vector({0, 1})), NumericalError);
  CHECK_THROWS_AS(z_matrix(half, 0.5 * Mat::Identity(6, 6), Bipartition::from_vector({0, 1})), ValidationError);
  CHECK_THROWS_AS(squeezed_probe_covariance(2, 0.0), ValidationError);
  auto mixed = to_three_mode_standard_form(ghz_state({0.5, 0.0}).cov());
  mixed.a1 += 0.3;
  CHECK_THROWS_AS(verify_ppt_resemblance(mixed), ValidationError);
}

#include "doctest.h"

#include <cmath>
#include <sstream>

#include "cvhier/catalog.hpp"
#include "cvhier/measurement.hpp"
#include "cvhier/optimizer.hpp"
#include "cvhier/quadrature.hpp"
#include "support/generators.hpp"

using namespace cvh;
using cvh::testing::Gen;

namespace {

// midpoint rule on [-L, L]^2
template <class F>
Complex grid_integral_2d(F f, double half_width, int cells) {
  const double hstep = 2 * half_width / cells;
  Complex acc = 0.0;
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j) {
      Vec x(2);
      x << -half_width + (i + 0.5) * hstep, -half_width + (j + 0.5) * hstep;
      acc += f(x);
    }
  return acc * hstep * hstep;
}

Mat sample_cov(const Mat& s) {
  const Vec mu = s.colwise().mean().transpose();
  const Mat c = s.rowwise() - mu.transpose();
  return c.transpose() * c / (s.rows() - 1.0);
}

}  // namespace

TEST_CASE("outcome density") {
  const auto vac = GaussianEnvelope::vacuum(1);
  const GaussianMeasurement half(0.5 * Mat::Identity(2, 2));
  CHECK(outcome_pdf(vac, half, Vec::Zero(2)) == doctest::Approx(1 / (2 * M_PI)).epsilon(1e-14));

  Gen g(81);
  for (int trial = 0; trial < 10; ++trial) {
    const GaussianEnvelope st(cvh::testing::random_physical_cov(g, 1));
    const GaussianMeasurement m(cvh::testing::random_probe_sigma(g, 1));
    const Vec x = cvh::testing::random_vec(g, 2, 1.0);
    CHECK(outcome_pdf(st, m, x) == doctest::Approx(outcome_pdf(st, m, Vec(-x))).epsilon(1e-14));
    const Complex total = grid_integral_2d([&](const Vec& y) { return Complex(outcome_pdf(st, m, y)); }, 14.0, 400);
    CHECK(total.real() == doctest::Approx(1.0).epsilon(1e-6));
  }
  const GaussianEnvelope st2(cvh::testing::tmsv(0.4));
  const GaussianMeasurement m2(0.5 * Mat::Identity(4, 4));
  CHECK(quadrature_normalization(PolyGaussianState(GaussianEnvelope(st2.cov() + m2.sigma_m, false))) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(outcome_pdf(st2, half, Vec::Zero(4)), ValidationError);
}

TEST_CASE("characteristic function") {
  const auto vac = GaussianEnvelope::vacuum(1);
  const GaussianMeasurement half(0.5 * Mat::Identity(2, 2));
  CHECK(std::abs(characteristic_fn(vac, half, Vec::Zero(2)) - 1 / (2 * M_PI)) < 1e-15);
  Vec w(2);
  w << 1, 0;
  CHECK(std::abs(characteristic_fn(vac, half, w) - std::exp(-0.5) / (2 * M_PI)) < 1e-15);

  Gen g(82);
  for (int trial = 0; trial < 6; ++trial) {
    const GaussianEnvelope st(cvh::testing::random_physical_cov(g, 1, 0.5, 0.5), cvh::testing::random_vec(g, 2, 0.5));
    const GaussianMeasurement m(cvh::testing::random_probe_sigma(g, 1, 0.5));
    const Vec om = cvh::testing::random_vec(g, 2, 0.7);
    const Complex want = grid_integral_2d(
        [&](const Vec& y) { return std::exp(Complex(0, -om.dot(y))) * outcome_pdf(st, m, y); }, 14.0, 400) /
        (2 * M_PI);
    CHECK(std::abs(characteristic_fn(st, m, om) - want) < 1e-6);
    CHECK(std::abs(characteristic_fn(st, m, Vec(-om)) - std::conj(characteristic_fn(st, m, om))) < 1e-15);
  }
}

TEST_CASE("statistics form equals the symmetric functional") {
  Gen g(83);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = g.integer(2, 3);
    const GaussianEnvelope st(cvh::testing::random_physical_cov(g, n));
    const Mat sigma = cvh::testing::random_probe_sigma(g, n);
    const Vec x = cvh::testing::random_vec(g, 2 * n, 0.8);
    const auto cs = CoefficientScheme::for_level(g.integer(0, 1) ? 2 : n, n);
    CHECK(std::abs(tau_from_statistics(st, sigma, x, cs) - tau_symmetric(st, x, sigma, cs)) < 1e-8);
    if (n == 2) {
      // omega-integral by tensor quadrature instead of the closed form
      const Vec jx = symplectic_form(n) * x;
      const Vec b = -2.0 * sigma * jx;
      const Complex integral =
          gaussian_poly_integral(MultiPoly::constant(4, 1.0), CMat((sigma + st.cov()).cast<Complex>()),
                                 CVec(b.cast<Complex>()), Complex(-n * std::log(2 * M_PI)), 20);
      double sub = 0.0;
      const GaussianMeasurement m(sigma);
      for (const auto& bp : enumerate_bipartitions(n))
        sub += cs.a(bp.index) * outcome_pdf(st, m, Vec(bp.sign_diagonal().cwiseProduct(x)));
      const double via_quad = std::exp(-2 * jx.dot(sigma * jx)) * integral.real() - std::pow(2 * M_PI, n) * sub;
      CHECK(std::abs(via_quad - tau_symmetric(st, x, sigma, cs)) < 1e-8);
    }
  }
  const GaussianEnvelope t(cvh::testing::tmsv(0.5));
  const Mat half = 0.5 * Mat::Identity(4, 4);
  CHECK(std::abs(tau_from_statistics(t, half, Vec::Zero(4), CoefficientScheme::for_level(2, 2))) < 1e-15);
  CHECK_THROWS_AS(tau_from_statistics(GaussianEnvelope(half, Vec::Ones(4)), half, Vec::Zero(4),
                                      CoefficientScheme::for_level(2, 2)),
                  ValidationError);
}

TEST_CASE("sampler") {
  const GaussianEnvelope t(cvh::testing::tmsv(0.5));
  const GaussianMeasurement m(0.5 * Mat::Identity(4, 4));
  const Mat want = t.cov() + m.sigma_m;
  const auto big = sample_outcomes(t, m, 100000, 3);
  const Mat c = sample_cov(big.samples);
  CHECK(((c - want).array().abs() / want.array().abs().max(1.0)).maxCoeff() < 0.02);
  CHECK(big.samples.colwise().mean().cwiseAbs().maxCoeff() < 0.02);

  const auto small = sample_outcomes(t, m, 1000, 3);
  CHECK(small.samples == big.samples.topRows(1000));
  CHECK(sample_outcomes(t, m, 10000, 3, 3).samples == big.samples.topRows(10000));
  CHECK(sample_outcomes(t, m, 1000, 4).samples != small.samples);

  // error shrinks at the Monte-Carlo rate, averaged over seeds
  double err[3] = {0, 0, 0};
  const int sizes[3] = {1000, 10000, 100000};
  for (std::uint64_t seed = 10; seed < 14; ++seed)
    for (int k = 0; k < 3; ++k) err[k] += (sample_cov(sample_outcomes(t, m, sizes[k], seed).samples) - want).norm();
  CHECK(err[1] < err[0] / 2);
  CHECK(err[2] < err[1] / 2);
  CHECK(err[2] > err[0] / 30);
}

TEST_CASE("outcome csv round trip") {
  const GaussianEnvelope t(cvh::testing::tmsv(0.3));
  const auto s = sample_outcomes(t, GaussianMeasurement(0.5 * Mat::Identity(4, 4)), 50, 17);
  std::stringstream buf;
  write_outcome_csv(buf, s);
  CHECK(buf.str().rfind("# seed=17\nq1,p1,q2,p2\n", 0) == 0);
  const auto back = read_outcome_csv(buf);
  CHECK(back.seed == 17);
  CHECK(back.samples == s.samples);
  std::stringstream bad("q1,p1\n1,2\n3\n");
  CHECK_THROWS_AS(read_outcome_csv(bad), ValidationError);
  std::stringstream junk("q1,p1\n1,x\n");
  CHECK_THROWS_AS(read_outcome_csv(junk), ValidationError);
}

TEST_CASE("Monte-Carlo estimator") {
  const GaussianMeasurement half2(0.5 * Mat::Identity(4, 4));
  const auto cs22 = CoefficientScheme::for_level(2, 2);

  const auto vac = sample_outcomes(GaussianEnvelope::vacuum(2), half2, 20000, 5);
  const auto e0 = estimate_tau_monte_carlo(vac, half2.sigma_m, Vec::Zero(4), cs22);
  CHECK(std::abs(e0.estimate) < 3 * e0.std_error + 1e-12);

  const GaussianEnvelope t(cvh::testing::tmsv(0.5));
  OptimizerConfig cfg;
  cfg.restarts = 6;
  const auto best = maximize_tau(t, cs22, cfg).best_params;
  const double exact = tau_from_statistics(t, best.sigma(), best.x, cs22);
  CHECK(exact > 0.0);
  const auto sample = sample_outcomes(t, GaussianMeasurement(best.sigma()), 100000, 7);
  const auto est = estimate_tau_monte_carlo(sample, best.sigma(), best.x, cs22);
  CHECK(std::abs(est.estimate - exact) < 3 * est.std_error);
  CHECK(est.std_error > 0.0);
  CHECK(est.std_error < 0.1 * exact);
  const auto again = estimate_tau_monte_carlo(sample, best.sigma(), best.x, cs22);
  CHECK(again.estimate == est.estimate);
  CHECK(again.std_error == est.std_error);

  OutcomeSample tiny;
  tiny.samples = Mat::Zero(10, 4);
  CHECK_THROWS_AS(estimate_tau_monte_carlo(tiny, half2.sigma_m, Vec::Zero(4), cs22), StatisticalGuard);
  OutcomeSample flat;
  flat.samples = Mat::Zero(2000, 4);
  CHECK_THROWS_AS(estimate_tau_monte_carlo(flat, half2.sigma_m, Vec::Zero(4), cs22), NumericalError);
}

TEST_CASE("Monte-Carlo detection of GHZ entanglement") {
  const auto st = ghz_state({0.8, 0.0});
  const auto cs = CoefficientScheme::for_level(3, 3);
  OptimizerConfig cfg;
  cfg.restarts = 6;
  const auto best = maximize_tau(st, cs, cfg).best_params;
  const auto sample = sample_outcomes(st, GaussianMeasurement(best.sigma()), 100000, 11);
  const auto est = estimate_tau_monte_carlo(sample, best.sigma(), best.x, cs);
  CHECK(est.estimate - 3 * est.std_error > 0.0);
  CHECK(std::abs(est.estimate - tau_from_statistics(st, best.sigma(), best.x, cs)) < 4 * est.std_error);
}

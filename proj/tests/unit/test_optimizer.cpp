#include "doctest.h"

#include <cmath>

#include "cvhier/catalog.hpp"
#include "cvhier/optimizer.hpp"
#include "support/generators.hpp"

using namespace cvh;

TEST_CASE("Nelder-Mead minimises a quadratic") {
  auto f = [](const Vec& x) { return (x - Vec::LinSpaced(3, 1, 3)).squaredNorm() + 2.0; };
  const auto r = nelder_mead(f, Vec::Zero(3), Vec::Constant(3, 0.5), 5000, 1e-10);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK((r.x - Vec::LinSpaced(3, 1, 3)).norm() < 1e-6);
}

TEST_CASE("probe parameterisation") {
  const auto p = ProbeParameterization::vacuum(2);
  CHECK((p.sigma() - 0.5 * Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);
  const auto full = ProbeParameterization::vacuum(2, false);
  CHECK(full.probe_set(Vec::Zero(4)).probes().size() == 4);
}

TEST_CASE("vacuum is not detected, two-mode squeezed vacuum is") {
  OptimizerConfig cfg;
  cfg.restarts = 8;
  const auto vac = maximize_tau(GaussianEnvelope::vacuum(2), CoefficientScheme::for_level(2, 2), cfg);
  CHECK(vac.best_value <= 1e-9);
  CHECK_FALSE(vac.detected());

  cfg.restarts = 16;
  cfg.seed = 42;
  const GaussianEnvelope tmsv(cvh::testing::tmsv(0.5));
  const auto rep = maximize_tau(tmsv, CoefficientScheme::for_level(2, 2), cfg);
  CHECK(rep.best_value > 0.0);
  CHECK(rep.detected());
  // the report is a certificate
  CHECK(std::abs(evaluate_tau(PolyGaussianState(tmsv), rep.best_params, CoefficientScheme::for_level(2, 2)) -
                 rep.best_value) < 1e-12);
  for (double s : rep.best_params.s) CHECK(std::abs(s) <= cfg.s_max);
}

TEST_CASE("determinism and monotone restarts") {
  OptimizerConfig cfg;
  cfg.restarts = 6;
  cfg.seed = 9;
  const auto st = ghz_state({0.6, 0.3});
  const auto cs = CoefficientScheme::for_level(3, 3);
  const auto a = maximize_tau(st, cs, cfg);
  const auto b = maximize_tau(st, cs, cfg);
  CHECK(a.best_value == b.best_value);
  CHECK(a.evaluations == b.evaluations);
  cfg.jobs = 3;
  const auto c = maximize_tau(st, cs, cfg);
  CHECK(a.best_value == c.best_value);
  cfg.jobs = 1;
  double prev = -1e300;
  for (int r = 1; r <= 6; ++r) {
    cfg.restarts = r;
    const double v = maximize_tau(st, cs, cfg).best_value;
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("mixed GHZ state is genuinely tripartite entangled") {
  OptimizerConfig cfg;
  cfg.restarts = 32;
  const auto rep = maximize_tau(ghz_state({0.8, 0.2}), CoefficientScheme::for_level(3, 3), cfg);
  CHECK(rep.best_value > 0.0);
}

TEST_CASE("classification") {
  OptimizerConfig cfg;
  cfg.restarts = 12;
  auto cls = classify_state(PolyGaussianState(ghz_state({1.0, 0.0})), cfg);
  CHECK(cls.at(2).detected);
  CHECK(cls.at(3).detected);
  CHECK(cls.at(2).value >= cls.at(3).value);
  cls = classify_state(PolyGaussianState(ghz_state({1.0, 3.0})), cfg);
  CHECK_FALSE(cls.at(2).detected);
  CHECK_FALSE(cls.at(3).detected);
  cls = classify_state(PolyGaussianState(GaussianEnvelope(1.5 * Mat::Identity(6, 6))), cfg);
  CHECK_FALSE(cls.at(2).detected);
}

TEST_CASE("unsymmetric layout agrees with the symmetric optimum on a Gaussian state") {
  OptimizerConfig cfg;
  cfg.restarts = 8;
  const GaussianEnvelope tmsv(cvh::testing::tmsv(0.5));
  const auto cs = CoefficientScheme::for_level(2, 2);
  const auto sym = maximize_tau(tmsv, cs, cfg);
  cfg.symmetric = false;
  cfg.max_evals = 6000;
  const auto full = maximize_tau(tmsv, cs, cfg);
  CHECK(full.best_value > 0.0);
  CHECK(full.best_value <= sym.best_value * 1.05 + 1e-9);
}

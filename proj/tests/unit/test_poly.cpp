#include "doctest.h"

#include <cmath>

#include "cvhier/poly.hpp"
#include "support/generators.hpp"

using namespace cvh;
using cvh::testing::Gen;

namespace {

CVec random_cvec(Gen& g, int d, double scale = 1.0) {
  CVec x(d);
  for (int i = 0; i < d; ++i) x(i) = Complex(scale * g.normal(), scale * g.normal());
  return x;
}

CMat random_csym(Gen& g, int d, double scale = 0.5) {
  CMat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(scale * g.normal(), scale * g.normal());
  return linalg::symmetrized(m);
}

// Brute-force exp(1/2 (d + c)^T M (d + c)) p at 0: expand the operator power series directly.
Complex brute_force_operator(const MultiPoly& p, const CMat& m, const CVec& c) {
  const int d = p.nvars();
  // Each application of L = 1/2 (d + c)^T M (d + c) is applied to the polynomial with constant
  // shifts kept explicit: (d_i + c_i) q = dq/dx_i + c_i q.
  auto apply_l = [&](const MultiPoly& q) {
    MultiPoly out(d);
    for (int i = 0; i < d; ++i) {
      const MultiPoly di = q.derivative(i) + q * c(i);
      for (int j = 0; j < d; ++j) {
        if (m(i, j) == Complex(0.0)) continue;
        out += (di.derivative(j) + di * c(j)) * (0.5 * m(i, j));
      }
    }
    return out;
  };
  const CVec zero = CVec::Zero(d);
  Complex sum = 0.0;
  MultiPoly term = p;
  double fact = 1.0;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      term = apply_l(term);
      fact *= k;
    }
    sum += term.eval(zero) / fact;
  }
  return sum;
}

}  // namespace

TEST_CASE("polynomial evaluation") {
  CHECK(MultiPoly::constant(3, 1.0).eval(Vec(Vec::Random(3))) == Complex(1.0));
  MultiPoly p(2);
  p.add_term({2, 0}, 1.0);
  p.add_term({0, 2}, 1.0);
  CHECK(p.eval(Vec((Vec(2) << 3, 4).finished())) == Complex(25.0));
  CHECK(p.degree() == 2);
  CHECK_THROWS_AS(p.eval(Vec(Vec::Zero(3))), ValidationError);
  p.add_term({2, 0}, -1.0);
  CHECK(p.size() == 1);
}

TEST_CASE("affine substitution") {
  const MultiPoly x1 = MultiPoly::variable(2, 0);
  const auto two = poly_affine_substitute(x1, Mat(2.0 * Mat::Identity(2, 2)), Vec::Zero(2));
  CHECK(two.coefficient({1, 0}) == Complex(2.0));
  CHECK(two.size() == 1);

  const MultiPoly x1x2 = x1 * MultiPoly::variable(2, 1);
  Mat swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(MultiPoly::max_coeff_diff(poly_affine_substitute(x1x2, swap, Vec::Zero(2)), x1x2) == 0.0);

  const auto sq = poly_affine_substitute(x1 * x1, Mat(Mat::Identity(2, 2)), Vec::Unit(2, 0));
  CHECK(sq.coefficient({2, 0}) == Complex(1.0));
  CHECK(sq.coefficient({1, 0}) == Complex(2.0));
  CHECK(sq.coefficient({0, 0}) == Complex(1.0));

  Gen g(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = g.integer(1, 4);
    const MultiPoly p = cvh::testing::random_poly(g, d, 4, 8);
    Mat a = Mat::Random(d, d) + 2.0 * Mat::Identity(d, d);
    const Vec b = Vec::Random(d);
    const MultiPoly q = poly_affine_substitute(p, a, b);
    for (int k = 0; k < 5; ++k) {
      const CVec x = random_cvec(g, d);
      const CVec y = a.cast<Complex>() * x + b.cast<Complex>();
      const Complex want = p.eval(y);
      CHECK(std::abs(q.eval(x) - want) <= 1e-10 * std::max(1.0, std::abs(want)));
    }
    // undo: x = A^-1 (y - b)
    const Mat ainv = a.inverse();
    const MultiPoly back = poly_affine_substitute(q, ainv, Vec(-ainv * b));
    CHECK(MultiPoly::max_coeff_diff(back, p) < 1e-10);
  }
}

TEST_CASE("gaussian operator on simple inputs") {
  Gen g(22);
  const CMat m = random_csym(g, 3);
  const CVec c = random_cvec(g, 3);
  const Complex want = std::exp(Complex(0.5) * (c.transpose() * m * c)(0));
  const Complex got = apply_gaussian_operator(MultiPoly::constant(3, 1.0), QuadraticKernel(m, c));
  CHECK(std::abs(got - want) < 1e-12 * std::abs(want));

  MultiPoly x2(1);
  x2.add_term({2}, 1.0);
  CMat m1(1, 1);
  m1(0, 0) = 0.7;
  CHECK(std::abs(apply_gaussian_operator(x2, QuadraticKernel(m1, CVec::Zero(1))) - 0.7) < 1e-15);

  CMat bad = m;
  bad(0, 1) += 1.0;
  CHECK_THROWS_AS(QuadraticKernel(bad, c), ValidationError);
}

TEST_CASE("gaussian operator: zero kernel gives p(0)") {
  Gen g(23);
  for (int trial = 0; trial < 20; ++trial) {
    const MultiPoly p = cvh::testing::random_poly(g, 4, 5, 10);
    const Complex got = apply_gaussian_operator(p, QuadraticKernel(CMat::Zero(4, 4), CVec::Zero(4)));
    CHECK(std::abs(got - p.eval(CVec(CVec::Zero(4)))) < 1e-14);
  }
}

TEST_CASE("gaussian operator agrees with the brute-force operator series") {
  Gen g(24);
  for (int trial = 0; trial < 25; ++trial) {
    const int d = g.integer(1, 4);
    const MultiPoly p = cvh::testing::random_poly(g, d, 4, 6);
    const CMat m = random_csym(g, d, 0.3);
    const CVec c = random_cvec(g, d, 0.4);
    const Complex fast = apply_gaussian_operator(p, QuadraticKernel(m, c));
    const Complex slow = brute_force_operator(p, m, c);
    CHECK(std::abs(fast - slow) <= 1e-9 * std::max(1.0, std::abs(slow)));
  }
}

TEST_CASE("heat series terminates at floor(deg/2)") {
  Gen g(25);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = g.integer(1, 4);
    const MultiPoly p = cvh::testing::random_poly(g, d, 5, 8);
    const CMat m = random_csym(g, d);
    MultiPoly q = p;
    for (int j = 0; j <= p.degree() / 2; ++j) q = half_laplacian(q, m);
    CHECK(q.is_zero());
  }
}

TEST_CASE("shift identity") {
  Gen g(26);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = g.integer(1, 4);
    const MultiPoly p = cvh::testing::random_poly(g, d, 4, 8);
    const CMat m = random_csym(g, d);
    const CVec c = random_cvec(g, d, 0.5);
    const CVec mc = m * c;
    const MultiPoly shifted = poly_affine_substitute(p, CMat(CMat::Identity(d, d)), mc);
    const Complex lhs = apply_gaussian_operator(p, QuadraticKernel(m, c));
    const Complex rhs = apply_gaussian_operator(shifted, QuadraticKernel(m, CVec::Zero(d))) *
                        std::exp(Complex(0.5) * (c.transpose() * mc)(0));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

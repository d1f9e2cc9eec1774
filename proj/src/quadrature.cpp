#include "cvhier/quadrature.hpp"

#include <cmath>
#include <map>

namespace cvh {

GaussHermiteRule gauss_hermite(int count) {
  if (count < 1) throw ValidationError("gauss_hermite: need at least one node");
  // Golub-Welsch on the Jacobi matrix of the monic probabilists' Hermite recurrence
  Mat jac = Mat::Zero(count, count);
  for (int k = 1; k < count; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Mat> es(jac);
  GaussHermiteRule rule{es.eigenvalues(), Vec(count)};
  for (int k = 0; k < count; ++k) {
    const double v0 = es.eigenvectors()(0, k);
    rule.weights(k) = std::sqrt(2.0 * M_PI) * v0 * v0;
  }
  return rule;
}

Complex gaussian_poly_integral(const MultiPoly& f, const CMat& a_in, const CVec& b, Complex log_c, int nodes) {
  const int d = f.nvars();
  if (d < 1 || d > 2 * kMaxQuadratureModes)
    throw OracleInapplicable("quadrature oracle supports at most " + std::to_string(2 * kMaxQuadratureModes) +
                             " variables");
  if (a_in.rows() != d || a_in.cols() != d || b.size() != d)
    throw ValidationError("gaussian_poly_integral: dimension mismatch");
  const CMat a = linalg::symmetrized(a_in);
  const Mat ar = a.real();
  const Mat ai = a.imag();
  Eigen::LLT<Mat> llt(ar);
  if (llt.info() != Eigen::Success) throw OracleInapplicable("real part of the combined Gaussian is not positive definite");
  const Vec mu = llt.solve(Vec(b.real()));
  const Mat lower = llt.matrixL();
  // x = mu + r z with r^T Ar r = I
  const Mat r = lower.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(d, d));
  const Mat q = r.transpose() * ai * r;
  const Vec g = r.transpose() * (Vec(b.imag()) - ai * mu);
  const double phi0 = -0.5 * mu.dot(ai * mu) + b.imag().dot(mu);
  const double log_jac = -lower.diagonal().array().log().sum();
  const Complex prefactor = std::exp(log_c + 0.5 * mu.dot(ar * mu) + log_jac + Complex(0.0, phi0));

  const MultiPoly fz = poly_affine_substitute(f, r, mu);
  const int deg = std::max(fz.degree(), 0);
  const GaussHermiteRule rule = gauss_hermite(nodes);

  // powers[k][e] = node_k^e
  std::vector<std::vector<double>> powers(nodes, std::vector<double>(deg + 1, 1.0));
  for (int k = 0; k < nodes; ++k)
    for (int e = 1; e <= deg; ++e) powers[k][e] = powers[k][e - 1] * rule.nodes(k);

  // terms grouped by their exponents on the outer axes 0..d-2
  std::map<Exponents, std::vector<std::pair<int, Complex>>> groups;
  for (const auto& [e, c] : fz.terms()) {
    Exponents outer(e.begin(), e.end() - 1);
    groups[outer].emplace_back(e.back(), c);
  }
  if (groups.empty()) return 0.0;

  const int outer_dims = d - 1;
  std::vector<int> idx(outer_dims, 0);
  Vec zo(outer_dims);
  std::vector<Complex> moments(deg + 1);
  Complex total = 0.0;
  const double qdd = q(d - 1, d - 1);
  while (true) {
    double wo = 1.0;
    for (int i = 0; i < outer_dims; ++i) {
      zo(i) = rule.nodes(idx[i]);
      wo *= rule.weights(idx[i]);
    }
    double base = 0.0;
    double lin = g(d - 1);
    for (int i = 0; i < outer_dims; ++i) {
      base += g(i) * zo(i);
      lin -= q(d - 1, i) * zo(i);
      for (int l = 0; l < outer_dims; ++l) base -= 0.5 * q(i, l) * zo(i) * zo(l);
    }
    std::fill(moments.begin(), moments.end(), Complex(0.0));
    for (int k = 0; k < nodes; ++k) {
      const double t = rule.nodes(k);
      const double ph = lin * t - 0.5 * qdd * t * t;
      const Complex w = rule.weights(k) * Complex(std::cos(ph), std::sin(ph));
      for (int e = 0; e <= deg; ++e) moments[e] += w * powers[k][e];
    }
    Complex acc = 0.0;
    for (const auto& [outer, inner] : groups) {
      double mono = 1.0;
      for (int i = 0; i < outer_dims; ++i) mono *= powers[idx[i]][outer[i]];
      Complex s = 0.0;
      for (const auto& [e, c] : inner) s += c * moments[e];
      acc += mono * s;
    }
    total += wo * Complex(std::cos(base), std::sin(base)) * acc;

    int axis = outer_dims - 1;
    while (axis >= 0 && ++idx[axis] == nodes) idx[axis--] = 0;
    if (axis < 0) break;
  }
  return prefactor * total;
}

Complex quadrature_matrix_element(const PolyGaussianState& state, const GaussianWeylSymbol& symbol, int nodes) {
  const int n = state.modes();
  if (n > kMaxQuadratureModes) throw OracleInapplicable("quadrature oracle limited to n <= 2");
  if (symbol.dim() != state.envelope.dim()) throw ValidationError("symbol and state dimensions differ");
  const Mat& v = state.envelope.cov();
  const Vec& xbar = state.envelope.mean();
  const Mat vinv = v.inverse();
  Eigen::PartialPivLU<CMat> lu(symbol.sigma);
  const CMat sinv = lu.inverse();
  const CVec sx = sinv * symbol.mean;
  const CMat a = vinv.cast<Complex>() + sinv;
  const CVec b = (vinv * xbar).cast<Complex>() + sx;
  const Complex log_c = symbol.lognorm - 0.5 * linalg::spd_logdet(v) - 0.5 * xbar.dot(vinv * xbar) -
                        0.5 * (symbol.mean.transpose() * sx)(0);
  return gaussian_poly_integral(state.poly, a, b, log_c, nodes);
}

double quadrature_normalization(const PolyGaussianState& state, int nodes) {
  const int n = state.modes();
  if (n > kMaxQuadratureModes) throw OracleInapplicable("quadrature oracle limited to n <= 2");
  const Mat& v = state.envelope.cov();
  const Vec& xbar = state.envelope.mean();
  const Mat vinv = v.inverse();
  const Complex log_c = -n * std::log(2.0 * M_PI) - 0.5 * linalg::spd_logdet(v) - 0.5 * xbar.dot(vinv * xbar);
  return gaussian_poly_integral(state.poly, vinv.cast<Complex>(), (vinv * xbar).cast<Complex>(), log_c, nodes).real();
}

}  // namespace cvh

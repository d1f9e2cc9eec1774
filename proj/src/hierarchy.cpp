#include "cvhier/hierarchy.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace cvh {

namespace {

int bipartition_count(int n) { return (1 << (n - 1)) - 1; }

void check_level(int k, int n) {
  if (n < 2) throw ValidationError("the hierarchy needs n >= 2 modes");
  if (k < 2 || k > n) {
    std::ostringstream os;
    os << "level k = " << k << " outside [2, " << n << "]";
    throw ValidationError(os.str());
  }
}

bool is_real(const GaussianWeylSymbol& s) {
  return s.sigma.imag().cwiseAbs().maxCoeff() == 0.0 && s.mean.imag().cwiseAbs().maxCoeff() == 0.0;
}

// Element for a real symbol: everything stays in real arithmetic so the sign is exact.
Complex real_element(const Mat& v, const MultiPoly* f, const Mat& s, const Vec& x, double lognorm) {
  const int n = static_cast<int>(v.rows() / 2);
  const Mat a = s + v;
  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success) throw NumericalError("matrix element: Sigma + V not positive definite");
  const Vec ax = llt.solve(x);
  const double log_mag = lognorm + n * std::log(2.0 * M_PI) + 0.5 * linalg::spd_logdet(s) -
                         0.5 * linalg::spd_logdet(a) - 0.5 * x.dot(ax);
  Complex g = 1.0;
  if (f != nullptr && !f->is_constant()) {
    const Mat m = linalg::symmetrized(Mat(v * llt.solve(s)));
    const Vec shift = v * ax;
    g = heat_series(*f, m.cast<Complex>()).eval(shift);
  } else if (f != nullptr) {
    g = f->coefficient(Exponents(v.rows(), 0));
  }
  return std::exp(log_mag) * g;
}

Complex complex_element(const Mat& v, const MultiPoly* f, const CMat& s, const CVec& x, Complex lognorm) {
  const int n = static_cast<int>(v.rows() / 2);
  const CMat vc = v.cast<Complex>();
  const CMat a = s + vc;
  Eigen::PartialPivLU<CMat> lu(a);
  const CVec ax = lu.solve(x);
  // sqrt(det S / det(S + V)) as a product of principal roots over the spectrum of S^-1 (S + V),
  // which is the branch the Gaussian integral selects when its real part is positive definite
  const CMat ratio = s.partialPivLu().solve(a);
  const CVec lambda = Eigen::ComplexEigenSolver<CMat>(ratio, false).eigenvalues();
  Complex log_ratio = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) log_ratio += std::log(lambda(i));
  const Complex log_val = lognorm + n * std::log(2.0 * M_PI) - 0.5 * log_ratio - 0.5 * (x.transpose() * ax)(0);
  Complex g = 1.0;
  if (f != nullptr && !f->is_constant()) {
    const CMat m = linalg::symmetrized(CMat(vc * lu.solve(s)));
    const CVec shift = vc * ax;
    g = heat_series(*f, m).eval(shift);
  } else if (f != nullptr) {
    g = f->coefficient(Exponents(v.rows(), 0));
  }
  const Complex out = std::exp(log_val) * g;
  if (!std::isfinite(out.real()) || !std::isfinite(out.imag())) throw NumericalError("matrix element is not finite");
  return out;
}

Complex element(const GaussianEnvelope& env, const MultiPoly* f, const GaussianWeylSymbol& symbol) {
  if (symbol.dim() != env.dim()) throw ValidationError("matrix element: symbol and state dimensions differ");
  MultiPoly shifted;
  const MultiPoly* fp = f;
  if (env.has_mean() && f != nullptr && !f->is_constant()) {
    shifted = poly_affine_substitute(*f, Mat::Identity(env.dim(), env.dim()), env.mean());
    fp = &shifted;
  }
  if (is_real(symbol)) {
    return real_element(env.cov(), fp, symbol.sigma.real(), symbol.mean.real() - env.mean(), symbol.lognorm.real());
  }
  return complex_element(env.cov(), fp, symbol.sigma, symbol.mean - env.mean().cast<Complex>(), symbol.lognorm);
}

double diagonal_value(const Complex& e) {
  const double r = e.real();
  if (r < -kDiagonalClampTol) {
    std::ostringstream os;
    os << "diagonal matrix element " << r << " is negative";
    throw NumericalError(os.str());
  }
  return std::max(r, 0.0);
}

HierarchyResult evaluate(const GaussianEnvelope& env, const MultiPoly* f, const ProbeSet& ps,
                         const CoefficientScheme& cs) {
  const int n = env.modes();
  if (ps.modes() != n) throw ValidationError("probe set and state disagree on the mode count");
  if (cs.n != n) throw ValidationError("coefficient scheme and state disagree on the mode count");
  check_level(cs.k, n);
  HierarchyResult out{0.0, 0.0, {}, ps};
  out.first_term = std::abs(element(env, f, composite_offdiag_moments(ps)));
  double sub = 0.0;
  for (const auto& b : enumerate_bipartitions(n)) {
    const auto pm = permuted_moments(ps, b);
    const double d1 = diagonal_value(element(env, f, pm.phi1j));
    const double d2 = diagonal_value(element(env, f, pm.phi2j));
    const double a = cs.a(b.index);
    const double term = a * std::sqrt(d1 * d2);
    out.per_bipartition.push_back({b.index, a, d1, d2, term});
    sub += term;
  }
  out.value = out.first_term - sub;
  return out;
}

}  // namespace

double CoefficientScheme::a(int j) const {
  auto it = coefficients.find(j);
  if (it == coefficients.end()) throw ValidationError("no coefficient for bipartition " + std::to_string(j));
  return it->second;
}

double CoefficientScheme::sum() const {
  double s = 0.0;
  for (const auto& [j, a] : coefficients) s += a;
  return s;
}

CoefficientScheme CoefficientScheme::for_level(int k, int n) {
  check_level(k, n);
  const int count = bipartition_count(n);
  double a;
  bool heuristic = false;
  if (k == n) {
    a = 1.0;
  } else if (k == 2) {
    a = 1.0 / count;
  } else {
    // linear interpolation of 1/a between the two known endpoints
    a = 1.0 / (count - (k - 2.0) * (count - 1.0) / (n - 2.0));
    heuristic = true;
  }
  CoefficientScheme cs{k, n, {}, heuristic};
  for (int j = 1; j <= count; ++j) cs.coefficients[j] = a;
  return cs;
}

CoefficientScheme CoefficientScheme::custom(int k, int n, std::map<int, double> table) {
  check_level(k, n);
  const int count = bipartition_count(n);
  for (const auto& [j, a] : table) {
    if (j < 1 || j > count) throw ValidationError("coefficient index " + std::to_string(j) + " out of range");
    if (!(a >= 0.0) || !std::isfinite(a))
      throw ValidationError("coefficient for bipartition " + std::to_string(j) + " must be finite and >= 0");
  }
  for (int j = 1; j <= count; ++j)
    if (!table.count(j)) throw ValidationError("missing coefficient for bipartition " + std::to_string(j));
  return CoefficientScheme{k, n, std::move(table), false};
}

Complex matrix_element(const PolyGaussianState& state, const GaussianWeylSymbol& symbol) {
  return element(state.envelope, &state.poly, symbol);
}

HierarchyResult tau_general(const PolyGaussianState& state, const ProbeSet& ps, const CoefficientScheme& cs) {
  return evaluate(state.envelope, &state.poly, ps, cs);
}

HierarchyResult tau_gaussian(const GaussianEnvelope& state, const ProbeSet& ps, const CoefficientScheme& cs) {
  return evaluate(state, nullptr, ps, cs);
}

void validate_probe_covariance(const Mat& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() % 2 != 0)
    throw ValidationError("probe covariance must be 2n x 2n");
  const int n = static_cast<int>(sigma.rows() / 2);
  for (int m = 0; m < n; ++m) {
    for (int l = 0; l < n; ++l) {
      if (l == m) continue;
      if (sigma.block<2, 2>(2 * m, 2 * l).cwiseAbs().maxCoeff() > 0.0)
        throw ValidationError("probe covariance must be block diagonal");
    }
    SingleModeProbe(Eigen::Vector2d::Zero(), sigma.block<2, 2>(2 * m, 2 * m));
  }
}

double tau_symmetric(const GaussianEnvelope& state, const Vec& x, const Mat& sigma, const CoefficientScheme& cs) {
  const int n = state.modes();
  if (x.size() != state.dim() || sigma.rows() != state.dim())
    throw ValidationError("tau_symmetric: dimension mismatch");
  if (cs.n != n) throw ValidationError("coefficient scheme and state disagree on the mode count");
  check_level(cs.k, n);
  validate_probe_covariance(sigma);
  const Mat& v = state.cov();
  const Mat a = sigma + v;
  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success) throw NumericalError("tau_symmetric: Sigma + V not positive definite");
  // (Sigma^-1 + V^-1)^-1 = Sigma (Sigma + V)^-1 V
  const Mat w = linalg::symmetrized(Mat(sigma * llt.solve(v)));
  const Mat j = symplectic_form(n);
  const Vec jx = j * x;
  double value = std::exp(-2.0 * jx.dot(w * jx));
  for (const auto& b : enumerate_bipartitions(n)) {
    const Vec px = b.sign_diagonal().cwiseProduct(x);
    value -= cs.a(b.index) * std::exp(-0.5 * px.dot(llt.solve(px)));
  }
  return value * std::exp(-0.5 * linalg::spd_logdet(a));
}

}  // namespace cvh

#include "cvhier/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cvh {

MultiPoly MultiPoly::constant(int nvars, Complex value) {
  MultiPoly p(nvars);
  p.add_term(Exponents(nvars, 0), value);
  return p;
}

MultiPoly MultiPoly::variable(int nvars, int index) {
  if (index < 0 || index >= nvars) throw ValidationError("variable index out of range");
  MultiPoly p(nvars);
  Exponents e(nvars, 0);
  e[index] = 1;
  p.add_term(e, 1.0);
  return p;
}

MultiPoly MultiPoly::linear(const CVec& coeffs, Complex offset) {
  const int nv = static_cast<int>(coeffs.size());
  MultiPoly p = constant(nv, offset);
  for (int i = 0; i < nv; ++i) {
    Exponents e(nv, 0);
    e[i] = 1;
    p.add_term(e, coeffs(i));
  }
  return p;
}

int MultiPoly::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
  return d;
}

bool MultiPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && degree() == 0);
}

void MultiPoly::add_term(const Exponents& e, Complex coeff) {
  if (static_cast<int>(e.size()) != nvars_) throw ValidationError("monomial has wrong number of exponents");
  for (int v : e)
    if (v < 0) throw ValidationError("negative exponent");
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    if (std::abs(coeff) > kPruneTol) terms_.emplace(e, coeff);
    return;
  }
  it->second += coeff;
  if (std::abs(it->second) <= kPruneTol) terms_.erase(it);
}

Complex MultiPoly::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

Complex MultiPoly::eval(const CVec& x) const {
  if (x.size() != nvars_) throw ValidationError("poly_eval: dimension mismatch");
  Complex sum = 0.0;
  for (const auto& [e, c] : terms_) {
    Complex t = c;
    for (int i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= x(i);
    sum += t;
  }
  return sum;
}

MultiPoly MultiPoly::derivative(int var) const {
  if (var < 0 || var >= nvars_) throw ValidationError("derivative: variable out of range");
  MultiPoly out(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents f = e;
    f[var] -= 1;
    out.add_term(f, c * static_cast<double>(e[var]));
  }
  return out;
}

void MultiPoly::check_same_vars(const MultiPoly& o) const {
  if (o.nvars_ != nvars_) throw ValidationError("polynomials over different variable counts");
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  check_same_vars(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  check_same_vars(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

MultiPoly& MultiPoly::operator*=(Complex s) {
  MultiPoly out(nvars_);
  for (const auto& [e, c] : terms_) out.add_term(e, c * s);
  *this = std::move(out);
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  a.check_same_vars(b);
  MultiPoly out(a.nvars_);
  Exponents e(a.nvars_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  return out;
}

double MultiPoly::max_coeff_diff(const MultiPoly& a, const MultiPoly& b) {
  a.check_same_vars(b);
  double m = 0.0;
  for (const auto& [e, c] : a.terms_) m = std::max(m, std::abs(c - b.coefficient(e)));
  for (const auto& [e, c] : b.terms_) m = std::max(m, std::abs(c - a.coefficient(e)));
  return m;
}

MultiPoly poly_affine_substitute(const MultiPoly& p, const CMat& a, const CVec& b) {
  const int nv = p.nvars();
  if (a.rows() != nv || a.cols() != nv || b.size() != nv)
    throw ValidationError("poly_affine_substitute: dimension mismatch");
  // Powers of each substituted linear form, built lazily up to the needed degree.
  std::vector<std::vector<MultiPoly>> powers(nv);
  for (int i = 0; i < nv; ++i) {
    powers[i].push_back(MultiPoly::constant(nv, 1.0));
    powers[i].push_back(MultiPoly::linear(a.row(i).transpose(), b(i)));
  }
  auto power = [&](int i, int k) -> const MultiPoly& {
    while (static_cast<int>(powers[i].size()) <= k) powers[i].push_back(powers[i].back() * powers[i][1]);
    return powers[i][k];
  };
  MultiPoly out(nv);
  for (const auto& [e, c] : p.terms()) {
    MultiPoly t = MultiPoly::constant(nv, c);
    for (int i = 0; i < nv; ++i)
      if (e[i] > 0) t = t * power(i, e[i]);
    out += t;
  }
  return out;
}

MultiPoly poly_affine_substitute(const MultiPoly& p, const Mat& a, const Vec& b) {
  return poly_affine_substitute(p, CMat(a.cast<Complex>()), CVec(b.cast<Complex>()));
}

MultiPoly half_laplacian(const MultiPoly& p, const CMat& m) {
  const int nv = p.nvars();
  if (m.rows() != nv || m.cols() != nv) throw ValidationError("half_laplacian: dimension mismatch");
  MultiPoly out(nv);
  std::vector<MultiPoly> first;
  first.reserve(nv);
  for (int l = 0; l < nv; ++l) first.push_back(p.derivative(l));
  for (int l = 0; l < nv; ++l) {
    if (first[l].is_zero()) continue;
    for (int k = l; k < nv; ++k) {
      const Complex w = (k == l) ? 0.5 * m(l, l) : 0.5 * (m(l, k) + m(k, l));
      if (w == Complex(0.0)) continue;
      out += first[l].derivative(k) * w;
    }
  }
  return out;
}

MultiPoly heat_series(const MultiPoly& p, const CMat& m) {
  MultiPoly sum = p;
  MultiPoly term = p;
  const int jmax = p.degree() / 2;
  for (int j = 1; j <= jmax; ++j) {
    term = half_laplacian(term, m) * Complex(1.0 / j);
    sum += term;
  }
  return sum;
}

QuadraticKernel::QuadraticKernel(const CMat& m_in, const CVec& c_in) : m(linalg::symmetrized(m_in)), c(c_in) {
  if (m_in.rows() != m_in.cols() || m_in.rows() != c_in.size())
    throw ValidationError("QuadraticKernel: dimension mismatch");
  const double scale = std::max(1.0, m_in.cwiseAbs().maxCoeff());
  if ((m_in - m_in.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ValidationError("QuadraticKernel: M is not symmetric");
}

Complex apply_gaussian_operator(const MultiPoly& p, const QuadraticKernel& k) {
  if (k.c.size() != p.nvars()) throw ValidationError("apply_gaussian_operator: dimension mismatch");
  const CVec shift = k.m * k.c;
  // Bilinear c^T M c; Eigen's dot() would conjugate c.
  const Complex quad = (k.c.transpose() * shift)(0);
  return std::exp(0.5 * quad) * heat_series(p, k.m).eval(shift);
}

}  // namespace cvh

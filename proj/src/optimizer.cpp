#include "cvhier/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cvhier/parallel.hpp"
#include "cvhier/rng.hpp"

namespace cvh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int probe_count(const ProbeParameterization& p) { return static_cast<int>(p.s.size()); }

// Unconstrained coordinates u map to s = s_max tanh(u / s_max).
struct Layout {
  int n;
  bool symmetric;
  double s_max;

  int probes() const { return symmetric ? n : 2 * n; }
  int dim() const { return 2 * probes() + (symmetric ? 2 * n : 4 * n); }

  Vec pack(const ProbeParameterization& p) const {
    Vec u(dim());
    const int k = probes();
    for (int i = 0; i < k; ++i) {
      const double s = std::clamp(p.s[i] / s_max, -0.999999, 0.999999);
      u(i) = s_max * std::atanh(s);
      u(k + i) = p.theta[i];
    }
    u.tail(u.size() - 2 * k) = p.x;
    return u;
  }

  ProbeParameterization unpack(const Vec& u) const {
    ProbeParameterization p;
    p.symmetric = symmetric;
    const int k = probes();
    p.s.resize(k);
    p.theta.resize(k);
    for (int i = 0; i < k; ++i) {
      p.s[i] = s_max * std::tanh(u(i) / s_max);
      p.theta[i] = u(k + i);
    }
    p.x = u.tail(u.size() - 2 * k);
    return p;
  }

  Vec steps() const {
    Vec st(dim());
    const int k = probes();
    st.head(k).setConstant(0.5);
    st.segment(k, k).setConstant(0.3);
    st.tail(st.size() - 2 * k).setConstant(0.5);
    return st;
  }
};

ProbeParameterization start_point(const Layout& layout, int index, std::uint64_t seed) {
  const int k = layout.probes();
  ProbeParameterization p;
  p.symmetric = layout.symmetric;
  p.s.assign(k, 0.0);
  p.theta.assign(k, 0.0);
  p.x = Vec::Zero(layout.dim() - 2 * k);
  if (index == 0) return p;
  if (index == 1 || index == 2) {
    p.s.assign(k, index == 1 ? 3.0 : -3.0);
    return p;
  }
  CounterRng rng(seed, static_cast<std::uint64_t>(index));
  for (int i = 0; i < k; ++i) {
    p.s[i] = rng.uniform(-3.0, 3.0);
    p.theta[i] = rng.uniform(0.0, M_PI);
  }
  for (Eigen::Index i = 0; i < p.x.size(); ++i) p.x(i) = 0.5 * rng.normal();
  return p;
}

// Directions along which tau rises fastest near X = 0: for a fixed probe covariance the
// exponents are quadratic forms in X, so eigenvectors of their weighted difference are
// candidate displacement directions. Each is scanned in length.
std::vector<ProbeParameterization> spectral_starts(const GaussianEnvelope& env, const CoefficientScheme& cs,
                                                   double s_max, int count) {
  const int n = env.modes();
  const Mat j = symplectic_form(n);
  const auto parts = enumerate_bipartitions(n);
  struct Candidate {
    double value;
    ProbeParameterization p;
  };
  std::vector<Candidate> found;
  for (double s : {-3.0, -2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) {
    if (std::abs(s) > s_max) continue;
    ProbeParameterization p{true, std::vector<double>(n, s), std::vector<double>(n, 0.0), Vec::Zero(2 * n)};
    const Mat sigma = p.sigma();
    const Mat a = sigma + env.cov();
    const Eigen::LLT<Mat> llt(a);
    if (llt.info() != Eigen::Success) continue;
    const Mat ainv = llt.solve(Mat::Identity(2 * n, 2 * n));
    const Mat w = linalg::symmetrized(Mat(sigma * llt.solve(env.cov())));
    const Mat first = 2.0 * j.transpose() * w * j;
    std::vector<Mat> forms;
    Mat avg = Mat::Zero(2 * n, 2 * n);
    for (const auto& b : parts) {
      const Mat pj = b.sign_matrix();
      const Mat q = 0.5 * pj * ainv * pj - first;
      avg += cs.a(b.index) / cs.sum() * q;
      forms.push_back(q);
    }
    forms.insert(forms.begin(), avg);
    for (const Mat& q : forms) {
      const Eigen::SelfAdjointEigenSolver<Mat> es(linalg::symmetrized(q));
      for (int e = 0; e < 2; ++e) {
        const Vec dir = es.eigenvectors().col(2 * n - 1 - e);
        double best_t = 0.0, best_v = -kInf;
        for (int k = 1; k <= 40; ++k) {
          const double t = 0.1 * k;
          const double v = tau_symmetric(env, Vec(t * dir), sigma, cs);
          if (v > best_v) {
            best_v = v;
            best_t = t;
          }
        }
        p.x = best_t * dir;
        found.push_back({best_v, p});
      }
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
  std::vector<ProbeParameterization> out;
  for (int i = 0; i < static_cast<int>(found.size()) && i < count; ++i) out.push_back(found[i].p);
  return out;
}

ProbeParameterization to_full(const ProbeParameterization& p) {
  if (!p.symmetric) return p;
  const int n = p.modes();
  ProbeParameterization f{false, p.s, p.theta, Vec(4 * n)};
  f.s.insert(f.s.end(), p.s.begin(), p.s.end());
  f.theta.insert(f.theta.end(), p.theta.begin(), p.theta.end());
  f.x << p.x, -p.x;
  return f;
}

OptimizationReport run(const PolyGaussianState& state, const CoefficientScheme& cs, const OptimizerConfig& config,
                       const std::vector<ProbeParameterization>& warm_starts) {
  if (config.restarts < 1 && warm_starts.empty()) throw ValidationError("optimizer: need at least one restart");
  if (!(config.s_max > 0.0)) throw ValidationError("optimizer: s_max must be positive");
  const int n = state.modes();
  const Layout layout{n, config.symmetric, config.s_max};
  for (const auto& w : warm_starts) {
    if (w.symmetric != config.symmetric || w.modes() != n)
      throw ValidationError("optimizer: warm start does not match the parameter layout");
  }

  std::vector<Vec> starts;
  for (const auto& w : warm_starts) starts.push_back(layout.pack(w));
  if (config.spectral_starts > 0) {
    for (const auto& p : spectral_starts(state.envelope, cs, config.s_max, config.spectral_starts))
      starts.push_back(layout.pack(config.symmetric ? p : to_full(p)));
  }
  for (int r = 0; r < config.restarts; ++r) starts.push_back(layout.pack(start_point(layout, r, config.seed)));

  auto objective = [&](const Vec& u) {
    try {
      const double t = evaluate_tau(state, layout.unpack(u), cs);
      return std::isfinite(t) ? -t : kInf;
    } catch (const NumericalError&) {
      return kInf;
    } catch (const ValidationError&) {
      return kInf;
    }
  };

  std::vector<NelderMeadResult> results(starts.size());
  parallel_for(static_cast<int>(starts.size()), config.jobs, [&](int i) {
    results[i] = nelder_mead(objective, starts[i], layout.steps(), config.max_evals, config.tol);
  });

  OptimizationReport rep{-kInf, {}, static_cast<int>(starts.size()), 0, 0, {}};
  int best = -1;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    rep.evaluations += r.evaluations;
    if (r.converged) ++rep.converged_restarts;
    rep.restart_values.push_back(-r.value);
    if (std::isfinite(r.value) && (best < 0 || -r.value > rep.best_value)) {
      best = static_cast<int>(i);
      rep.best_value = -r.value;
    }
  }
  if (best < 0) {
    throw OptimizationFailure("optimizer: no restart produced a finite value (" + std::to_string(results.size()) +
                              " starts, " + std::to_string(rep.evaluations) + " evaluations)");
  }
  rep.best_params = layout.unpack(results[best].x);
  rep.best_value = evaluate_tau(state, rep.best_params, cs);
  return rep;
}

}  // namespace

Mat ProbeParameterization::sigma() const {
  const int n = modes();
  Mat out = Mat::Zero(2 * n, 2 * n);
  for (int m = 0; m < n; ++m) out.block<2, 2>(2 * m, 2 * m) = SingleModeProbe::squeezed(s[m], theta[m]).sigma();
  return out;
}

ProbeSet ProbeParameterization::probe_set(const Vec& center) const {
  const int n = modes();
  if (center.size() != 2 * n) throw ValidationError("probe_set: center has the wrong dimension");
  if (symmetric) return symmetric_probe_set(x, sigma(), center);
  std::vector<SingleModeProbe> probes;
  for (int i = 0; i < probe_count(*this); ++i) {
    const int m = i % n;
    probes.push_back(SingleModeProbe::squeezed(s[i], theta[i], center.segment<2>(2 * m) + x.segment<2>(2 * i)));
  }
  return ProbeSet(n, std::move(probes));
}

ProbeParameterization ProbeParameterization::vacuum(int n, bool symmetric) {
  const int k = symmetric ? n : 2 * n;
  return {symmetric, std::vector<double>(k, 0.0), std::vector<double>(k, 0.0), Vec::Zero(2 * k)};
}

NelderMeadResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& start, const Vec& step,
                             int max_evals, double tol) {
  const int d = static_cast<int>(start.size());
  std::vector<Vec> pts(d + 1, start);
  std::vector<double> vals(d + 1);
  for (int i = 0; i < d; ++i) pts[i + 1](i) += step(i);
  int evals = 0;
  for (int i = 0; i <= d; ++i) {
    vals[i] = f(pts[i]);
    ++evals;
  }
  std::vector<int> order(d + 1);
  bool converged = false;
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const int lo = order.front(), hi = order.back(), second = order[d - 1];
    double diam = 0.0;
    for (int i = 0; i <= d; ++i) diam = std::max(diam, (pts[i] - pts[lo]).cwiseAbs().maxCoeff());
    if (diam < tol) {
      converged = true;
      break;
    }
    if (evals >= max_evals) break;

    Vec centroid = Vec::Zero(d);
    for (int i = 0; i <= d; ++i)
      if (i != hi) centroid += pts[i];
    centroid /= d;

    const Vec xr = centroid + (centroid - pts[hi]);
    const double fr = f(xr);
    ++evals;
    if (fr < vals[lo]) {
      const Vec xe = centroid + 2.0 * (centroid - pts[hi]);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) {
        pts[hi] = xe;
        vals[hi] = fe;
      } else {
        pts[hi] = xr;
        vals[hi] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[hi] = xr;
      vals[hi] = fr;
      continue;
    }
    const bool outside = fr < vals[hi];
    const Vec xc = outside ? Vec(centroid + 0.5 * (xr - centroid)) : Vec(centroid + 0.5 * (pts[hi] - centroid));
    const double fc = f(xc);
    ++evals;
    if (fc < (outside ? fr : vals[hi])) {
      pts[hi] = xc;
      vals[hi] = fc;
      continue;
    }
    for (int i = 0; i <= d; ++i) {
      if (i == lo) continue;
      pts[i] = pts[lo] + 0.5 * (pts[i] - pts[lo]);
      vals[i] = f(pts[i]);
      ++evals;
    }
  }
  const int best = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  return {pts[best], vals[best], evals, converged};
}

double evaluate_tau(const PolyGaussianState& state, const ProbeParameterization& p, const CoefficientScheme& cs) {
  const GaussianEnvelope& env = state.envelope;
  if (p.modes() != env.modes()) throw ValidationError("probe parameters and state disagree on the mode count");
  if (state.is_gaussian()) {
    if (p.symmetric) return tau_symmetric(env, p.x, p.sigma(), cs);
    return tau_gaussian(env, p.probe_set(env.mean()), cs).value;
  }
  return tau_general(state, p.probe_set(env.mean()), cs).value;
}

OptimizationReport maximize_tau(const PolyGaussianState& state, const CoefficientScheme& cs,
                                const OptimizerConfig& config, const std::vector<ProbeParameterization>& warm_starts) {
  return run(state, cs, config, warm_starts);
}

OptimizationReport maximize_tau(const GaussianEnvelope& state, const CoefficientScheme& cs,
                                const OptimizerConfig& config, const std::vector<ProbeParameterization>& warm_starts) {
  return run(PolyGaussianState(state), cs, config, warm_starts);
}

std::map<int, Classification> classify_state(const PolyGaussianState& state, const OptimizerConfig& config,
                                             std::vector<int> ks) {
  const int n = state.modes();
  if (ks.empty())
    for (int k = 2; k <= n; ++k) ks.push_back(k);
  std::sort(ks.begin(), ks.end(), std::greater<>());
  std::map<int, Classification> out;
  std::vector<ProbeParameterization> warm;
  for (int k : ks) {
    const auto rep = maximize_tau(state, CoefficientScheme::for_level(k, n), config, warm);
    out.emplace(k, Classification{rep.detected(config.threshold), rep.best_value, rep});
    warm = {rep.best_params};
  }
  return out;
}

}  // namespace cvh

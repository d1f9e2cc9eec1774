#include "cvhier/measurement.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "cvhier/linalg.hpp"
#include "cvhier/parallel.hpp"
#include "cvhier/quadrature.hpp"
#include "cvhier/rng.hpp"

namespace cvh {

namespace {

Eigen::LLT<Mat> outcome_factor(const GaussianEnvelope& state, const GaussianMeasurement& m) {
  if (m.dim() != state.dim()) throw ValidationError("measurement and state disagree on the dimension");
  Eigen::LLT<Mat> llt(m.sigma_m + state.cov());
  if (llt.info() != Eigen::Success) throw NumericalError("sigma_M + V not positive definite");
  return llt;
}

void check_zero_mean(const GaussianEnvelope& state) {
  if (state.has_mean()) throw ValidationError("measurement form needs a zero-mean state");
}

void check_probe_inputs(int dim, const Mat& sigma, const Vec& x, const CoefficientScheme& cs) {
  if (sigma.rows() != dim || sigma.cols() != dim || x.size() != dim)
    throw ValidationError("probe covariance or displacement has the wrong dimension");
  if (2 * cs.n != dim) throw ValidationError("coefficient scheme and state disagree on the mode count");
  validate_probe_covariance(sigma);
}

// Gauss-Hermite nodes at scale kOmegaScale in coordinates whitened by the
// sample covariance, one of each +-omega pair, origin dropped.
constexpr double kOmegaScale = 0.5;

struct EcfGrid {
  Mat omegas;
  Vec weights;
};

EcfGrid make_ecf_grid(const Mat& l, int per_axis) {
  const int d = static_cast<int>(l.rows());
  const GaussHermiteRule rule = gauss_hermite(per_axis);
  const Mat lt_inv = l.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(d, d));
  long total = 1;
  for (int k = 0; k < d; ++k) total *= per_axis;
  std::vector<Vec> kept;
  std::vector<double> w;
  for (long g = 0; g < total; ++g) {
    Vec z(d);
    double weight = 1.0;
    long rest = g;
    for (int k = 0; k < d; ++k) {
      const int idx = static_cast<int>(rest % per_axis);
      rest /= per_axis;
      z(k) = rule.nodes(idx);
      weight *= rule.weights(idx);
    }
    // keep z whose first clearly nonzero entry is positive
    int lead = 0;
    while (lead < d && std::abs(z(lead)) < 1e-12) ++lead;
    if (lead == d || z(lead) < 0.0) continue;
    kept.push_back(kOmegaScale * lt_inv * z);
    w.push_back(weight);
  }
  EcfGrid grid{Mat(static_cast<int>(kept.size()), d), Vec(static_cast<int>(w.size()))};
  for (std::size_t k = 0; k < kept.size(); ++k) {
    grid.omegas.row(static_cast<int>(k)) = kept[k].transpose();
    grid.weights(static_cast<int>(k)) = w[k];
  }
  return grid;
}

// Weighted least squares for -2 log Re ecf(omega) = omega^T Q omega.
Mat fit_quadratic_form(const EcfGrid& grid, const Vec& ecf) {
  const int d = static_cast<int>(grid.omegas.cols());
  const int unknowns = d * (d + 1) / 2;
  Mat design(grid.omegas.rows(), unknowns);
  Vec target(grid.omegas.rows());
  for (int k = 0; k < grid.omegas.rows(); ++k) {
    if (!(ecf(k) > 0.0)) throw NumericalError("empirical characteristic function not positive on the fitting grid");
    const double sw = std::sqrt(grid.weights(k)) * ecf(k);
    int col = 0;
    for (int a = 0; a < d; ++a)
      for (int c = a; c < d; ++c)
        design(k, col++) = sw * (a == c ? 1.0 : 2.0) * grid.omegas(k, a) * grid.omegas(k, c);
    target(k) = sw * -2.0 * std::log(ecf(k));
  }
  const Vec coef = design.colPivHouseholderQr().solve(target);
  Mat q(d, d);
  int col = 0;
  for (int a = 0; a < d; ++a)
    for (int c = a; c < d; ++c) q(a, c) = q(c, a) = coef(col++);
  return q;
}

constexpr std::uint64_t kBootstrapDomain = 0x9E6C63D0676A9A99ULL;

double poisson_one(CounterRng& rng) {
  // inversion for Poisson(1)
  double u = rng.uniform(), p = std::exp(-1.0), cdf = p;
  int k = 0;
  while (u > cdf && k < 30) {
    ++k;
    p /= k;
    cdf += p;
  }
  return k;
}

}  // namespace

GaussianMeasurement::GaussianMeasurement(const Mat& sigma) : sigma_m(linalg::symmetrized(sigma)) {
  if (sigma.rows() != sigma.cols() || sigma.rows() % 2 != 0 || sigma.rows() == 0)
    throw ValidationError("measurement covariance must be 2n x 2n");
  if (!linalg::is_spd(sigma_m)) throw ValidationError("measurement covariance not positive definite");
}

double outcome_pdf(const GaussianEnvelope& state, const GaussianMeasurement& m, const Vec& x_m) {
  const auto llt = outcome_factor(state, m);
  if (x_m.size() != state.dim()) throw ValidationError("outcome has the wrong dimension");
  const Vec d = x_m - state.mean();
  const double logdet = 2.0 * Mat(llt.matrixL()).diagonal().array().log().sum();
  return std::exp(-0.5 * d.dot(llt.solve(d)) - state.modes() * std::log(2.0 * M_PI) - 0.5 * logdet);
}

Complex characteristic_fn(const GaussianEnvelope& state, const GaussianMeasurement& m, const Vec& omega) {
  if (omega.size() != state.dim()) throw ValidationError("omega has the wrong dimension");
  const Mat a = m.sigma_m + state.cov();
  const double mag = std::exp(-0.5 * omega.dot(a * omega) - state.modes() * std::log(2.0 * M_PI));
  return mag * std::exp(Complex(0.0, -omega.dot(state.mean())));
}

OutcomeSample sample_outcomes(const GaussianEnvelope& state, const GaussianMeasurement& m, int count,
                              std::uint64_t seed, int jobs) {
  if (count < 1) throw ValidationError("sample count must be positive");
  const auto llt = outcome_factor(state, m);
  const Mat l = llt.matrixL();
  const int d = state.dim();
  OutcomeSample out;
  out.seed = seed;
  out.samples.resize(count, d);
  constexpr int kChunk = 4096;
  const int chunks = (count + kChunk - 1) / kChunk;
  parallel_for(chunks, jobs, [&](int c) {
    Vec z(d);
    for (int i = c * kChunk; i < std::min(count, (c + 1) * kChunk); ++i) {
      CounterRng rng(seed, static_cast<std::uint64_t>(i));
      for (int k = 0; k < d; ++k) z(k) = rng.normal();
      out.samples.row(i) = (state.mean() + l * z).transpose();
    }
  });
  return out;
}

double tau_from_statistics(const GaussianEnvelope& state, const Mat& sigma, const Vec& x,
                           const CoefficientScheme& cs) {
  check_zero_mean(state);
  check_probe_inputs(state.dim(), sigma, x, cs);
  const GaussianMeasurement m(sigma);
  const auto llt = outcome_factor(state, m);
  const int n = state.modes();
  const Vec jx = symplectic_form(n) * x;
  // int e^{b^T w} (2 pi)^{-n} e^{-1/2 w^T A w} dw = e^{1/2 b^T A^{-1} b} / sqrt(det A)
  const Vec b = -2.0 * sigma * jx;
  const double logdet = 2.0 * Mat(llt.matrixL()).diagonal().array().log().sum();
  const double first = std::exp(-2.0 * jx.dot(sigma * jx) + 0.5 * b.dot(llt.solve(b)) - 0.5 * logdet);
  double sub = 0.0;
  for (const auto& bp : enumerate_bipartitions(n))
    sub += cs.a(bp.index) * outcome_pdf(state, m, Vec(bp.sign_diagonal().cwiseProduct(x)));
  return first - std::pow(2.0 * M_PI, n) * sub;
}

MonteCarloEstimate estimate_tau_monte_carlo(const OutcomeSample& sample, const Mat& sigma, const Vec& x,
                                            const CoefficientScheme& cs, const MonteCarloConfig& cfg) {
  const int count = sample.size();
  const int d = sample.dim();
  if (count < kMinMonteCarloSamples)
    throw StatisticalGuard("need at least " + std::to_string(kMinMonteCarloSamples) + " samples, got " +
                           std::to_string(count));
  if (d % 2 != 0 || d == 0) throw ValidationError("sample dimension must be even");
  check_probe_inputs(d, sigma, x, cs);
  if (cfg.bootstrap < 2) throw ValidationError("need at least two bootstrap resamples");
  if (cfg.omega_nodes < 2) throw ValidationError("need at least two omega nodes per axis");
  const int n = d / 2;
  const Mat& s = sample.samples;

  const Vec mu = s.colwise().mean().transpose();
  const Mat centred = s.rowwise() - mu.transpose();
  const Mat cov = linalg::symmetrized(Mat(centred.transpose() * centred / (count - 1.0)));
  const Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success || !(cov.diagonal().minCoeff() > 0.0))
    throw NumericalError("sample covariance degenerate: no kernel bandwidth");
  const Mat l = llt.matrixL();
  const double logdet = 2.0 * l.diagonal().array().log().sum();

  const EcfGrid grid = make_ecf_grid(l, cfg.omega_nodes);
  const int nodes = static_cast<int>(grid.omegas.rows());

  // whitened Gaussian kernel with Silverman bandwidth; E[KDE(y)] = N(y; mu, (1+h^2) cov)
  const double h = std::pow(4.0 / (d + 2.0), 1.0 / (d + 4.0)) * std::pow(static_cast<double>(count), -1.0 / (d + 4.0));
  const auto bps = enumerate_bipartitions(n);
  const int terms = static_cast<int>(bps.size());
  Mat targets(terms, d);
  Vec kde_weight(terms);
  const double two_pi_n = std::pow(2.0 * M_PI, n);
  for (int j = 0; j < terms; ++j) {
    const Vec y = bps[j].sign_diagonal().cwiseProduct(x);
    const Vec wy = l.triangularView<Eigen::Lower>().solve(Vec(y - mu));
    const double h2 = h * h;
    const double log_correction = 0.5 * d * std::log1p(h2) - 0.5 * wy.squaredNorm() * (h2 / (1.0 + h2));
    targets.row(j) = wy.transpose();
    kde_weight(j) = cs.a(bps[j].index) * two_pi_n *
                    std::exp(log_correction - 0.5 * d * std::log(2.0 * M_PI) - d * std::log(h) - 0.5 * logdet);
  }

  // Row 0 carries unit weights (the estimate itself), rows 1..B Poisson(1)
  // bootstrap multiplicities drawn from stream i for sample i, keyed apart from the sampler.
  const int reps = cfg.bootstrap + 1;
  constexpr int kChunk = 4096;
  const int chunks = (count + kChunk - 1) / kChunk;
  std::vector<Mat> ecf_part(chunks), kde_part(chunks);
  std::vector<Vec> mass_part(chunks);
  parallel_for(chunks, cfg.jobs, [&](int c) {
    const int lo = c * kChunk, hi = std::min(count, (c + 1) * kChunk), len = hi - lo;
    const Mat block = s.middleRows(lo, len);
    const Mat cosines = (block * grid.omegas.transpose()).array().cos().matrix();
    Mat kernel(len, terms);
    for (int i = 0; i < len; ++i) {
      const Vec wi = l.triangularView<Eigen::Lower>().solve(Vec(block.row(i).transpose() - mu));
      for (int j = 0; j < terms; ++j)
        kernel(i, j) = std::exp(-0.5 * (targets.row(j).transpose() - wi).squaredNorm() / (h * h));
    }
    Mat mult(reps, len);
    for (int i = 0; i < len; ++i) {
      CounterRng rng(cfg.seed ^ kBootstrapDomain, static_cast<std::uint64_t>(lo + i));
      mult(0, i) = 1.0;
      for (int r = 1; r < reps; ++r) mult(r, i) = poisson_one(rng);
    }
    ecf_part[c] = mult * cosines;
    kde_part[c] = mult * kernel;
    mass_part[c] = mult.rowwise().sum();
  });
  Mat ecf = Mat::Zero(reps, nodes), kde = Mat::Zero(reps, terms);
  Vec mass = Vec::Zero(reps);
  for (int c = 0; c < chunks; ++c) {
    ecf += ecf_part[c];
    kde += kde_part[c];
    mass += mass_part[c];
  }

  const Vec jx = symplectic_form(n) * x;
  const Vec b = -2.0 * sigma * jx;
  const double damping = -2.0 * jx.dot(sigma * jx);
  auto evaluate = [&](int r, double* first, double* sub) {
    const Vec e = ecf.row(r).transpose() / mass(r);
    const Mat q = fit_quadratic_form(grid, e);
    const Eigen::LLT<Mat> ql(q);
    if (ql.info() != Eigen::Success) throw NumericalError("fitted characteristic function is not a Gaussian");
    const double qlogdet = 2.0 * Mat(ql.matrixL()).diagonal().array().log().sum();
    // int e^{b^T w} (2 pi)^{-n} e^{-1/2 w^T Q w} dw
    *first = std::exp(damping + 0.5 * b.dot(ql.solve(b)) - 0.5 * qlogdet);
    *sub = kde.row(r).dot(kde_weight) / mass(r);
  };

  MonteCarloEstimate est;
  evaluate(0, &est.first_term, &est.subtrahend);
  est.estimate = est.first_term - est.subtrahend;
  est.bandwidth = h;
  est.samples = count;
  est.bootstrap = cfg.bootstrap;
  Vec values(cfg.bootstrap);
  for (int r = 1; r < reps; ++r) {
    double f = 0.0, sb = 0.0;
    evaluate(r, &f, &sb);
    values(r - 1) = f - sb;
  }
  const double centre = values.mean();
  est.std_error = std::sqrt((values.array() - centre).square().sum() / (cfg.bootstrap - 1.0));
  return est;
}

void write_outcome_csv(std::ostream& out, const OutcomeSample& sample) {
  out << "# seed=" << sample.seed << "\n";
  for (int k = 0; k < sample.dim(); ++k) out << (k ? "," : "") << (k % 2 ? "p" : "q") << (k / 2 + 1);
  out << "\n";
  char buf[32];
  for (int i = 0; i < sample.size(); ++i) {
    for (int k = 0; k < sample.dim(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", sample.samples(i, k));
      out << (k ? "," : "") << buf;
    }
    out << "\n";
  }
}

OutcomeSample read_outcome_csv(std::istream& in) {
  OutcomeSample out;
  std::string line;
  int lineno = 0;
  int dim = -1;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("seed=");
      if (pos != std::string::npos) {
        try {
          out.seed = std::stoull(line.substr(pos + 5));
        } catch (const std::exception&) {
          throw ValidationError("outcome csv line " + std::to_string(lineno) + ": bad seed");
        }
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (dim < 0) {
      dim = static_cast<int>(cells.size());
      if (dim == 0 || dim % 2 != 0) throw ValidationError("outcome csv line " + std::to_string(lineno) + ": header needs 2n columns");
      continue;
    }
    if (static_cast<int>(cells.size()) != dim)
      throw ValidationError("outcome csv line " + std::to_string(lineno) + ": expected " + std::to_string(dim) + " values");
    std::vector<double> row;
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || !std::isfinite(v))
        throw ValidationError("outcome csv line " + std::to_string(lineno) + ": bad number '" + c + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (dim < 0) throw ValidationError("outcome csv: missing header");
  out.samples.resize(static_cast<int>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int k = 0; k < dim; ++k) out.samples(static_cast<int>(i), k) = rows[i][k];
  return out;
}

}  // namespace cvh

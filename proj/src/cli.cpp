#include "cvhier/cli.hpp"

#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "cvhier/catalog.hpp"
#include "cvhier/measurement.hpp"
#include "cvhier/parallel.hpp"
#include "cvhier/ppt.hpp"
#include "cvhier/state_io.hpp"

namespace cvh {

namespace {

struct SearchFlags {
  int restarts = 16;
  std::uint64_t seed = 1;
  int jobs = 1;
  int max_evals = 2000;

  void attach(CLI::App* app) {
    app->add_option("--restarts", restarts, "optimizer restarts")->check(CLI::Range(1, 100000));
    app->add_option("--seed", seed, "seed of every random draw");
    app->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 1024));
    app->add_option("--max-evals", max_evals, "evaluation budget per restart")->check(CLI::Range(10, 10000000));
  }

  OptimizerConfig config() const {
    OptimizerConfig c;
    c.restarts = restarts;
    c.seed = seed;
    c.jobs = jobs;
    c.max_evals = max_evals;
    return c;
  }
};

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
  return s;
}

std::string join_ints(const std::vector<int>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
  return s;
}

std::vector<double> as_vector(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

/// Output stream for --out; "-" is the tool's standard output.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ValidationError("cannot write " + path);
    out_ = file_.get();
  }
  std::ostream& operator*() { return *out_; }
  void finish() {
    out_->flush();
    if (!*out_) throw ValidationError("write failed");
  }

 private:
  std::ostream* out_;
  std::unique_ptr<std::ofstream> file_;
};

// Whole-state PPT summary: separable only if every bipartition passes.
PptVerdict ppt_all(const Mat& cov) {
  const int n = static_cast<int>(cov.rows()) / 2;
  PptVerdict all{true, 1e300};
  for (const auto& b : enumerate_bipartitions(n)) {
    const auto v = ppt_separable(cov, b.group());
    all.separable = all.separable && v.separable;
    all.min_nu = std::min(all.min_nu, v.min_nu);
  }
  return all;
}

std::vector<int> parse_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ValidationError(std::string("bad ") + what + " list '" + text + "'");
    }
  }
  if (out.empty()) throw ValidationError(std::string("empty ") + what + " list");
  return out;
}

// ---- tau ----

struct TauCmd {
  std::string state;
  int k = 2;
  std::string coeffs;
  bool unsymmetric = false;
  SearchFlags search;

  int run(std::ostream& out) const {
    const auto st = read_state_file(state);
    const int n = st.modes();
    const CoefficientScheme cs = coeffs.empty() ? CoefficientScheme::for_level(k, n)
                                                : read_coefficients_file(coeffs, k, n);
    OptimizerConfig cfg = search.config();
    cfg.symmetric = !unsymmetric;
    const auto rep = maximize_tau(st, cs, cfg);
    out << "n = " << n << '\n';
    out << "k = " << k << '\n';
    out << "scheme = " << (coeffs.empty() ? (cs.heuristic ? "heuristic" : "built-in") : "custom") << '\n';
    out << "tau = " << format_double(rep.best_value) << '\n';
    out << "verdict = " << (rep.detected(cfg.threshold) ? "detected" : "not-detected") << '\n';
    out << "restarts = " << rep.restarts << '\n';
    out << "converged = " << rep.converged_restarts << '\n';
    out << "evaluations = " << rep.evaluations << '\n';
    out << "# best probes\n";
    out << "s = " << join_doubles(rep.best_params.s) << '\n';
    out << "theta = " << join_doubles(rep.best_params.theta) << '\n';
    out << "x = " << join_doubles(as_vector(rep.best_params.x)) << '\n';
    return kExitOk;
  }
};

// ---- ppt ----

struct PptCmd {
  std::string state;
  std::string group;
  double z_r = 0.0;

  int run(std::ostream& out) const {
    const auto st = read_state_file(state);
    const int n = st.modes();
    if (n < 2) throw ValidationError("ppt needs at least two modes");
    std::vector<Bipartition> parts;
    if (group.empty()) {
      parts = enumerate_bipartitions(n);
    } else {
      std::vector<int> v(n, 0);
      for (int m : parse_list(group, "mode")) {
        if (m < 1 || m > n) throw ValidationError("mode " + std::to_string(m) + " out of range 1.." + std::to_string(n));
        v[m - 1] = 1;
      }
      parts.push_back(Bipartition::from_vector(v));
    }
    if (!st.is_gaussian()) out << "# non-Gaussian state: verdicts use the covariance matrix only\n";
    out << "bipartition,min_nu,ppt_separable";
    if (z_r > 0.0) out << ",z_min_eig,z_inequality_holds";
    out << '\n';
    for (const auto& b : parts) {
      std::vector<int> one, other;
      for (int m = 0; m < n; ++m) (b.v[m] ? other : one).push_back(m + 1);
      const auto v = ppt_separable(st.envelope.cov(), b.group());
      out << join_ints(one, " ") << " | " << join_ints(other, " ") << ',' << format_double(v.min_nu) << ','
          << (v.separable ? "true" : "false");
      if (z_r > 0.0) {
        const auto z = z_spectrum(st.envelope.cov(), z_r, b);
        out << ',' << format_double(z.min_eig) << ',' << (z.inequality_holds ? "true" : "false");
      }
      out << '\n';
    }
    return kExitOk;
  }
};

// ---- scan ----

struct ScanCmd {
  std::string preset;
  std::string out_path = "-";
  std::string ks = "2,3";
  std::string ghz_form = "pure";
  double r_min = 0.0, r_max = 1.2, r_step = 0.02;
  double g_min = 0.0, g_max = 1.2, g_step = 0.02;
  double a_min = 0.0, a_max = 1.0, a_step = 0.02;
  double squeeze = 0.0;
  SearchFlags search;

  ScanCmd() { search.restarts = 8; }

  int run(std::ostream& stdout_) const {
    if (preset == "ghz") return run_ghz(stdout_);
    return run_cps(stdout_);
  }

  int run_ghz(std::ostream& stdout_) const {
    auto levels = parse_list(ks, "k");
    for (int k : levels)
      if (k < 2 || k > 3) throw ValidationError("ghz scan: k must be 2 or 3");
    std::sort(levels.begin(), levels.end(), std::greater<int>());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    const GhzForm form = ghz_form == "printed" ? GhzForm::Printed : GhzForm::Pure;
    const auto rs = linear_grid(r_min, r_max, r_step);
    const auto gs = linear_grid(g_min, g_max, g_step);
    OptimizerConfig cfg = search.config();
    const int outer_jobs = cfg.jobs;
    cfg.jobs = 1;
    // one row of constant r per task; g runs in order so each point warm-starts from the previous one
    std::vector<std::vector<std::string>> rows(rs.size());
    parallel_for(static_cast<int>(rs.size()), outer_jobs, [&](int ir) {
      std::map<int, std::vector<ProbeParameterization>> warm;
      for (double g : gs) {
        const auto env = ghz_state({rs[ir], g, form});
        std::map<int, double> tau;
        std::vector<ProbeParameterization> chain;
        for (int k : levels) {
          auto starts = warm[k];
          starts.insert(starts.end(), chain.begin(), chain.end());
          const auto rep = maximize_tau(env, CoefficientScheme::for_level(k, 3), cfg, starts);
          tau[k] = rep.best_value;
          warm[k] = {rep.best_params};
          chain.push_back(rep.best_params);
        }
        const auto ppt = ppt_all(env.cov());
        std::string line = format_double(rs[ir]) + "," + format_double(g);
        for (int k : sorted_ascending(levels)) line += "," + format_double(tau[k]);
        line += std::string(",") + (ppt.separable ? "true" : "false") + "," + format_double(ppt.min_nu);
        rows[ir].push_back(line);
      }
    });
    Sink sink(out_path, stdout_);
    auto& os = *sink;
    os << "# preset=ghz form=" << (form == GhzForm::Pure ? "pure" : "printed") << " seed=" << search.seed
       << " restarts=" << search.restarts << " max_evals=" << search.max_evals << " scheme=built-in\n";
    os << "# grid r=" << format_double(r_min) << ":" << format_double(r_max) << ":" << format_double(r_step)
       << " g=" << format_double(g_min) << ":" << format_double(g_max) << ":" << format_double(g_step) << '\n';
    os << "r,g";
    for (int k : sorted_ascending(levels)) os << ",tau" << k;
    os << ",ppt_separable,ppt_min_nu\n";
    for (const auto& block : rows)
      for (const auto& line : block) os << line << '\n';
    sink.finish();
    return kExitOk;
  }

  int run_cps(std::ostream& stdout_) const {
    const auto as = linear_grid(a_min, a_max, a_step);
    for (double a : as)
      if (a < 0.0 || a > 1.0 + 1e-12) throw ValidationError("cps-tsvs scan: |alpha| must lie in [0, 1]");
    OptimizerConfig cfg = search.config();
    const int outer_jobs = cfg.jobs;
    cfg.jobs = 1;
    std::vector<std::string> rows(as.size());
    parallel_for(static_cast<int>(as.size()), outer_jobs, [&](int i) {
      auto params = cps_tsvs_reference_params(std::min(1.0, as[i]));
      params.r = squeeze;
      const auto st = cps_tsvs_state(params);
      const auto rep = maximize_tau(st, CoefficientScheme::for_level(2, 2), cfg);
      const auto ppt = ppt_all(st.envelope.cov());
      rows[i] = format_double(as[i]) + "," + format_double(rep.best_value) + "," +
                (ppt.separable ? "true" : "false") + "," + format_double(ppt.min_nu);
    });
    Sink sink(out_path, stdout_);
    auto& os = *sink;
    os << "# preset=cps-tsvs r=" << format_double(squeeze) << " seed=" << search.seed
       << " restarts=" << search.restarts << " max_evals=" << search.max_evals << " scheme=built-in\n";
    os << "# grid abs_alpha=" << format_double(a_min) << ":" << format_double(a_max) << ":" << format_double(a_step)
       << '\n';
    os << "abs_alpha,tau2,ppt_separable,ppt_min_nu\n";
    for (const auto& line : rows) os << line << '\n';
    sink.finish();
    return kExitOk;
  }

  static std::vector<int> sorted_ascending(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
  }
};

// ---- evolve ----

struct EvolveCmd {
  std::string preset = "cps-tsvs";
  double alpha = 0.5;
  double squeeze = 0.0;
  double gamma = 1.0;
  double nth = 2.0;
  double t_max = 3.0;
  int steps = 60;
  std::string out_path = "-";
  SearchFlags search;

  EvolveCmd() { search.restarts = 8; }

  int run(std::ostream& stdout_) const {
    if (alpha < 0.0 || alpha > 1.0) throw ValidationError("--alpha must lie in [0, 1]");
    if (!(t_max >= 0.0)) throw ValidationError("--t-max must be non-negative");
    auto params = cps_tsvs_reference_params(alpha);
    params.r = squeeze;
    const auto st = cps_tsvs_state(params);
    const ThermalChannel ch(gamma, nth);
    const OptimizerConfig cfg = search.config();
    const auto cs = CoefficientScheme::for_level(2, 2);
    Sink sink(out_path, stdout_);
    auto& os = *sink;
    os << "# preset=cps-tsvs abs_alpha=" << format_double(alpha) << " r=" << format_double(squeeze)
       << " gamma=" << format_double(gamma) << " nth=" << format_double(nth) << " seed=" << search.seed
       << " restarts=" << search.restarts << " max_evals=" << search.max_evals << '\n';
    os << "t,tau2\n";
    std::vector<ProbeParameterization> warm;
    for (int i = 0; i <= steps; ++i) {
      const double t = steps == 0 ? 0.0 : t_max * i / steps;
      const auto rep = maximize_tau(t > 0.0 ? green_propagate(st, ch, t) : st, cs, cfg, warm);
      warm = {rep.best_params};
      os << format_double(t) << ',' << format_double(rep.best_value) << '\n';
    }
    sink.finish();
    return kExitOk;
  }
};

// ---- measure ----

struct MeasureCmd {
  std::string state;
  std::string probes;
  int samples = 100000;
  std::uint64_t seed = 1;
  int k = 0;
  std::string coeffs;
  int bootstrap = kDefaultBootstrap;
  int jobs = 1;
  std::string samples_out;

  int run(std::ostream& out) const {
    const auto st = read_state_file(state);
    if (!st.is_gaussian()) throw ValidationError("measure: the measurement form covers Gaussian states only");
    const int n = st.modes();
    const int level = k == 0 ? n : k;
    const CoefficientScheme cs = coeffs.empty() ? CoefficientScheme::for_level(level, n)
                                                : read_coefficients_file(coeffs, level, n);
    const auto p = read_probes_file(probes, n);
    const Mat sigma = p.sigma();
    if (samples < kMinMonteCarloSamples)
      throw StatisticalGuard("need at least " + std::to_string(kMinMonteCarloSamples) + " samples, got " +
                             std::to_string(samples));
    const auto sample = sample_outcomes(st.envelope, GaussianMeasurement(sigma), samples, seed, jobs);
    if (!samples_out.empty()) {
      Sink sink(samples_out, out);
      write_outcome_csv(*sink, sample);
      sink.finish();
    }
    MonteCarloConfig mc;
    mc.bootstrap = bootstrap;
    mc.seed = seed;
    mc.jobs = jobs;
    const auto est = estimate_tau_monte_carlo(sample, sigma, p.x, cs, mc);
    const double exact = tau_from_statistics(st.envelope, sigma, p.x, cs);
    out << "n = " << n << '\n';
    out << "k = " << level << '\n';
    out << "samples = " << samples << '\n';
    out << "seed = " << seed << '\n';
    out << "exact = " << format_double(exact) << '\n';
    out << "estimate = " << format_double(est.estimate) << '\n';
    out << "stderr = " << format_double(est.std_error) << '\n';
    out << "deviation_in_stderr = " << format_double((est.estimate - exact) / est.std_error) << '\n';
    out << "bandwidth = " << format_double(est.bandwidth) << '\n';
    return kExitOk;
  }
};

// ---- limits ----

struct LimitsCmd {
  std::string state;
  double ghz_r = -1.0;
  std::vector<double> abcd;

  int run(std::ostream& out) const {
    const int sources = (!state.empty()) + (ghz_r >= 0.0) + (!abcd.empty());
    if (sources != 1) throw ValidationError("limits: give exactly one of --state, --ghz, --abcd");
    ResemblanceReport rep;
    if (!abcd.empty()) {
      rep = verify_ppt_resemblance(TwoModeStandardForm{abcd[0], abcd[1], abcd[2], abcd[3]});
    } else {
      const Mat cov = !state.empty() ? read_state_file(state).envelope.cov() : ghz_state({ghz_r, 0.0}).cov();
      if (cov.rows() == 4) {
        rep = verify_ppt_resemblance(to_two_mode_standard_form(cov));
      } else if (cov.rows() == 6) {
        rep = verify_ppt_resemblance(to_three_mode_standard_form(cov, 1e-8));
      } else {
        throw ValidationError("limits: two- or three-mode states only");
      }
    }
    out << "bipartition,direction,r,entry_deviation,eigen_deviation,passed\n";
    for (const auto& c : rep.checks)
      out << join_ints(c.bipartition.v, "") << ',' << (c.direction == SqueezeDirection::Momentum ? "momentum" : "position")
          << ',' << format_double(c.r) << ',' << format_double(c.entry_deviation) << ','
          << format_double(c.eigen_deviation) << ',' << (c.passed ? "true" : "false") << '\n';
    out << "# resemblance " << (rep.passed ? "passed" : "failed") << " max_entry_deviation="
        << format_double(rep.max_entry_deviation) << " max_eigen_deviation=" << format_double(rep.max_eigen_deviation)
        << '\n';
    return rep.passed ? kExitOk : kExitNumerical;
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Separability hierarchy for polynomial-Gaussian continuous-variable states", "cvhier"};
  app.require_subcommand(1);

  TauCmd tau;
  auto* c_tau = app.add_subcommand("tau", "maximize tau_{k,n} over probe states");
  c_tau->add_option("--state", tau.state, "state file")->required();
  c_tau->add_option("--k", tau.k, "hierarchy level")->required();
  c_tau->add_option("--coeffs", tau.coeffs, "coefficient file");
  c_tau->add_flag("--unsymmetric", tau.unsymmetric, "independent probes for both composite vectors");
  tau.search.attach(c_tau);

  PptCmd ppt;
  auto* c_ppt = app.add_subcommand("ppt", "PPT test on the covariance matrix");
  c_ppt->add_option("--state", ppt.state, "state file")->required();
  c_ppt->add_option("--group", ppt.group, "modes on one side, 1-based, comma separated");
  c_ppt->add_option("--z-r", ppt.z_r, "also report the Z-matrix test with every probe squeezed by r")
      ->check(CLI::PositiveNumber);

  ScanCmd scan;
  auto* c_scan = app.add_subcommand("scan", "grid scan over a catalog family");
  c_scan->add_option("--preset", scan.preset, "ghz or cps-tsvs")->required()->check(CLI::IsMember({"ghz", "cps-tsvs"}));
  c_scan->add_option("--out", scan.out_path, "CSV output, - for stdout");
  c_scan->add_option("--k", scan.ks, "levels for ghz, comma separated");
  c_scan->add_option("--ghz-form", scan.ghz_form, "pure or printed")->check(CLI::IsMember({"pure", "printed"}));
  c_scan->add_option("--r-min", scan.r_min);
  c_scan->add_option("--r-max", scan.r_max);
  c_scan->add_option("--r-step", scan.r_step)->check(CLI::PositiveNumber);
  c_scan->add_option("--g-min", scan.g_min);
  c_scan->add_option("--g-max", scan.g_max);
  c_scan->add_option("--g-step", scan.g_step)->check(CLI::PositiveNumber);
  c_scan->add_option("--alpha-min", scan.a_min);
  c_scan->add_option("--alpha-max", scan.a_max);
  c_scan->add_option("--alpha-step", scan.a_step)->check(CLI::PositiveNumber);
  c_scan->add_option("--squeeze", scan.squeeze, "cps-tsvs squeezing r");
  scan.search.attach(c_scan);

  EvolveCmd evolve;
  auto* c_evolve = app.add_subcommand("evolve", "tau_{2,2} along thermal-loss evolution");
  c_evolve->add_option("--state-preset", evolve.preset)->check(CLI::IsMember({"cps-tsvs"}));
  c_evolve->add_option("--alpha", evolve.alpha, "|alpha|");
  c_evolve->add_option("--squeeze", evolve.squeeze, "squeezing r");
  c_evolve->add_option("--gamma", evolve.gamma)->check(CLI::PositiveNumber);
  c_evolve->add_option("--nth", evolve.nth)->check(CLI::NonNegativeNumber);
  c_evolve->add_option("--t-max", evolve.t_max);
  c_evolve->add_option("--steps", evolve.steps)->check(CLI::Range(0, 100000));
  c_evolve->add_option("--out", evolve.out_path, "CSV output, - for stdout");
  evolve.search.attach(c_evolve);

  MeasureCmd measure;
  auto* c_measure = app.add_subcommand("measure", "Monte-Carlo estimate of tau from simulated Gaussian measurements");
  c_measure->add_option("--state", measure.state, "state file")->required();
  c_measure->add_option("--probes", measure.probes, "probe file")->required();
  c_measure->add_option("--samples", measure.samples)->check(CLI::Range(1, 100000000));
  c_measure->add_option("--seed", measure.seed);
  c_measure->add_option("--k", measure.k, "hierarchy level, default n");
  c_measure->add_option("--coeffs", measure.coeffs, "coefficient file");
  c_measure->add_option("--bootstrap", measure.bootstrap)->check(CLI::Range(2, 100000));
  c_measure->add_option("--jobs", measure.jobs)->check(CLI::Range(1, 1024));
  c_measure->add_option("--samples-out", measure.samples_out, "write the simulated outcomes as CSV");

  LimitsCmd limits;
  auto* c_limits = app.add_subcommand("limits", "check the infinite-squeezing limits against PPT spectra");
  c_limits->add_option("--state", limits.state, "two-mode, or pure three-mode, state file");
  c_limits->add_option("--ghz", limits.ghz_r, "pure GHZ state with this squeezing")->check(CLI::NonNegativeNumber);
  c_limits->add_option("--abcd", limits.abcd, "two-mode standard form a b c d")->expected(4);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  try {
    if (c_tau->parsed()) return tau.run(out);
    if (c_ppt->parsed()) return ppt.run(out);
    if (c_scan->parsed()) return scan.run(out);
    if (c_evolve->parsed()) return evolve.run(out);
    if (c_measure->parsed()) return measure.run(out);
    if (c_limits->parsed()) return limits.run(out);
  } catch (const StatisticalGuard& e) {
    err << "error: " << e.what() << '\n';
    return kExitStatistical;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitInput;
}

}  // namespace cvh

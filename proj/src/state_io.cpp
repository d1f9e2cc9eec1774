#include "cvhier/state_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

namespace cvh {

namespace {

struct Record {
  int line;
  std::string key;
  std::vector<std::string> values;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<Record> read_records(std::istream& in, const std::string& source) {
  std::vector<Record> out;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const bool continuation = eq == std::string::npos && (raw[0] == ' ' || raw[0] == '\t');
    if (eq == std::string::npos && (!continuation || out.empty()))
      throw ParseError(source + ":" + std::to_string(lineno) + ": expected 'key = values'");
    if (!continuation) {
      out.push_back(Record{lineno, trim(line.substr(0, eq)), {}});
      if (out.back().key.empty()) throw ParseError(source + ":" + std::to_string(lineno) + ": missing key");
    }
    // indented lines without '=' extend the previous record
    std::string body = continuation ? line : line.substr(eq + 1);
    for (char& c : body)
      if (c == ',') c = ' ';
    std::istringstream ss(body);
    std::string tok;
    while (ss >> tok) out.back().values.push_back(tok);
  }
  return out;
}

std::string where(const std::string& source, const Record& r) {
  return source + ":" + std::to_string(r.line) + ": field '" + r.key + "'";
}

double to_double(const std::string& source, const Record& r, const std::string& tok) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || !std::isfinite(v)) throw ParseError(where(source, r) + ": bad number '" + tok + "'");
  return v;
}

int to_int(const std::string& source, const Record& r, const std::string& tok) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || v < 0 || v > 1000) throw ParseError(where(source, r) + ": bad integer '" + tok + "'");
  return static_cast<int>(v);
}

std::vector<double> numbers(const std::string& source, const Record& r, std::size_t expected) {
  if (r.values.size() != expected)
    throw ParseError(where(source, r) + ": expected " + std::to_string(expected) + " values, got " +
                     std::to_string(r.values.size()));
  std::vector<double> out;
  for (const auto& t : r.values) out.push_back(to_double(source, r, t));
  return out;
}

void join(std::ostream& out, const std::string& key, const std::vector<double>& v) {
  out << key << " =";
  for (double x : v) out << ' ' << format_double(x);
  out << '\n';
}

std::ifstream open_input(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  return f;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

PolyGaussianState read_state(std::istream& in, const std::string& source) {
  const auto recs = read_records(in, source);
  int n = -1;
  const Record* cov_rec = nullptr;
  const Record* mean_rec = nullptr;
  std::vector<const Record*> terms;
  for (const auto& r : recs) {
    if (r.key == "n") {
      if (r.values.size() != 1) throw ParseError(where(source, r) + ": expected one integer");
      n = to_int(source, r, r.values[0]);
      if (n < 1) throw ParseError(where(source, r) + ": need at least one mode");
    } else if (r.key == "covariance") {
      cov_rec = &r;
    } else if (r.key == "mean") {
      mean_rec = &r;
    } else if (r.key == "term") {
      terms.push_back(&r);
    } else {
      throw ParseError(where(source, r) + ": unknown field");
    }
  }
  if (n < 0) throw ParseError(source + ": missing field 'n'");
  if (!cov_rec) throw ParseError(source + ": missing field 'covariance'");
  const int d = 2 * n;
  const auto cv = numbers(source, *cov_rec, static_cast<std::size_t>(d * d));
  Mat cov(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) cov(i, j) = cv[i * d + j];
  if (linalg::asymmetry(cov) > 1e-12 * std::max(1.0, linalg::max_abs(cov)))
    throw ParseError(where(source, *cov_rec) + ": matrix is not symmetric");
  Vec mean = Vec::Zero(d);
  if (mean_rec) {
    const auto mv = numbers(source, *mean_rec, static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) mean(i) = mv[i];
  }
  std::optional<GaussianEnvelope> env;
  try {
    env.emplace(cov, mean);
  } catch (const ValidationError& e) {
    throw ParseError(where(source, *cov_rec) + ": " + e.what());
  }
  if (terms.empty()) return PolyGaussianState(*env);

  MultiPoly f(d);
  for (const Record* r : terms) {
    if (r->values.size() != static_cast<std::size_t>(d + 2))
      throw ParseError(where(source, *r) + ": expected " + std::to_string(d) + " exponents and re im");
    Exponents e(d);
    for (int i = 0; i < d; ++i) e[i] = to_int(source, *r, r->values[i]);
    f.add_term(e, Complex(to_double(source, *r, r->values[d]), to_double(source, *r, r->values[d + 1])));
  }
  double scale = 0.0, imag = 0.0;
  for (const auto& [e, c] : f.terms()) {
    scale = std::max(scale, std::abs(c));
    imag = std::max(imag, std::abs(c.imag()));
  }
  if (imag > 1e-12 * std::max(1.0, scale))
    throw ParseError(source + ": field 'term': the polynomial of a Wigner function must be real");
  const Complex norm = heat_series(f, env->cov().cast<Complex>()).eval(mean);
  if (std::abs(norm - 1.0) > 1e-8)
    throw ParseError(source + ": field 'term': Wigner function integrates to " + format_double(norm.real()) +
                     ", not 1");
  return PolyGaussianState(*env, std::move(f));
}

PolyGaussianState read_state_file(const std::string& path) {
  auto f = open_input(path);
  return read_state(f, path);
}

void write_state(std::ostream& out, const PolyGaussianState& state) {
  const int d = state.envelope.dim();
  out << "n = " << state.modes() << '\n';
  std::vector<double> cv;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) cv.push_back(state.envelope.cov()(i, j));
  join(out, "covariance", cv);
  if (state.envelope.has_mean()) join(out, "mean", std::vector<double>(state.envelope.mean().data(), state.envelope.mean().data() + d));
  if (state.is_gaussian()) return;
  for (const auto& [e, c] : state.poly.terms()) {
    out << "term =";
    for (int k : e) out << ' ' << k;
    out << ' ' << format_double(c.real()) << ' ' << format_double(c.imag()) << '\n';
  }
}

CoefficientScheme read_coefficients(std::istream& in, int k, int n, const std::string& source) {
  std::map<int, double> table;
  for (const auto& r : read_records(in, source)) {
    if (r.key.size() < 2 || r.key[0] != 'a') throw ParseError(where(source, r) + ": expected a<j>");
    const int j = to_int(source, r, r.key.substr(1));
    if (table.count(j)) throw ParseError(where(source, r) + ": duplicate index");
    table[j] = numbers(source, r, 1)[0];
  }
  try {
    return CoefficientScheme::custom(k, n, std::move(table));
  } catch (const ValidationError& e) {
    throw ParseError(source + ": " + e.what());
  }
}

CoefficientScheme read_coefficients_file(const std::string& path, int k, int n) {
  auto f = open_input(path);
  return read_coefficients(f, k, n, path);
}

ProbeParameterization read_probes(std::istream& in, int n, const std::string& source) {
  ProbeParameterization p = ProbeParameterization::vacuum(n, true);
  bool have_x = false;
  for (const auto& r : read_records(in, source)) {
    if (r.key == "s") {
      p.s = numbers(source, r, static_cast<std::size_t>(n));
    } else if (r.key == "theta") {
      p.theta = numbers(source, r, static_cast<std::size_t>(n));
    } else if (r.key == "x") {
      const auto v = numbers(source, r, static_cast<std::size_t>(2 * n));
      p.x = Eigen::Map<const Vec>(v.data(), 2 * n);
      have_x = true;
    } else {
      throw ParseError(where(source, r) + ": unknown field");
    }
  }
  if (!have_x) throw ParseError(source + ": missing field 'x'");
  return p;
}

ProbeParameterization read_probes_file(const std::string& path, int n) {
  auto f = open_input(path);
  return read_probes(f, n, path);
}

void write_probes(std::ostream& out, const ProbeParameterization& p) {
  if (!p.symmetric) throw ValidationError("probe files hold the symmetric layout only");
  join(out, "s", p.s);
  join(out, "theta", p.theta);
  join(out, "x", std::vector<double>(p.x.data(), p.x.data() + p.x.size()));
}

}  // namespace cvh

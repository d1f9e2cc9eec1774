#pragma once

// Plain-text documents read by the command-line tool.
//
// State file, one `key = values` record per line, `#` starts a comment,
// indented lines without `=` continue the previous record:
//   n = 2
//   covariance = v11 v12 ... (2n x 2n, row-major)
//   mean = m1 ... m2n                     (optional, default zeros)
//   term = e1 ... e2n re im               (repeatable, default F = 1)
// Coefficient file: `a<j> = value` for every bipartition index j.
// Probe file: `s = ...` and `theta = ...` (n values each), `x = ...` (2n values).

#include <iosfwd>
#include <map>
#include <string>

#include "cvhier/optimizer.hpp"
#include "cvhier/state.hpp"

namespace cvh {

/// Input document error; message names the line and the field.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

PolyGaussianState read_state(std::istream& in, const std::string& source = "state");
PolyGaussianState read_state_file(const std::string& path);
/// Writes every number with 17 significant digits, so reading it back is exact.
void write_state(std::ostream& out, const PolyGaussianState& state);

CoefficientScheme read_coefficients(std::istream& in, int k, int n, const std::string& source = "coefficients");
CoefficientScheme read_coefficients_file(const std::string& path, int k, int n);

ProbeParameterization read_probes(std::istream& in, int n, const std::string& source = "probes");
ProbeParameterization read_probes_file(const std::string& path, int n);
void write_probes(std::ostream& out, const ProbeParameterization& p);

/// %.17g
std::string format_double(double v);

}  // namespace cvh

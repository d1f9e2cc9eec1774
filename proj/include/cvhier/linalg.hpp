#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cvh {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// Error taxonomy. The CLI maps these onto its exit codes.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidBipartition : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OracleInapplicable : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OptimizationFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StatisticalGuard : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace linalg {

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double asymmetry(const Mat& m) { return max_abs(m - m.transpose()); }

template <class Derived>
typename Derived::PlainObject symmetrized(const Eigen::MatrixBase<Derived>& m) {
  return 0.5 * (m + m.transpose());
}

// log det of a symmetric positive definite matrix; throws if not SPD.
inline double spd_logdet(const Mat& m) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError("matrix is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

inline bool is_spd(const Mat& m) {
  Eigen::LLT<Mat> llt(m);
  return llt.info() == Eigen::Success;
}

// Complex log-determinant via LU (principal branch of the sum of logs).
inline Complex logdet(const CMat& m) {
  Eigen::PartialPivLU<CMat> lu(m);
  const CMat& packed = lu.matrixLU();
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    if (packed(i, i) == Complex(0.0)) throw NumericalError("singular complex matrix");
    acc += std::log(packed(i, i));
  }
  // permutation sign
  if (lu.permutationP().determinant() < 0) acc += Complex(0.0, M_PI);
  return acc;
}

}  // namespace linalg
}  // namespace cvh

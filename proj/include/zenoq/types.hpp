#pragma once
// Scalar/matrix aliases and the error taxonomy shared by every module.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace zenoq {

using Real = double;
using Complex = std::complex<double>;

// 2x2 operators act on the target qubit; 4x4 on the target(+)detector pair.
using Op2 = Eigen::Matrix2cd;
using Op4 = Eigen::Matrix4cd;

// Column-stacked form of an Op2: (a11, a21, a12, a22).
using VecOp = Eigen::Vector4cd;

// A channel as a matrix acting on VecOp.
using SuperOp = Eigen::Matrix4cd;

using Bloch = Eigen::Vector3d;

// A documented precondition was violated by the caller.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative numeric routine failed; carries any partial factorization.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
  NumericalError(const std::string& what, const Op4& partial)
      : std::runtime_error(what), partial_schur(partial), has_partial(true) {}

  Op4 partial_schur = Op4::Zero();
  bool has_partial = false;
};

// A spectral decomposition cannot support the requested use (e.g. defective).
class DecompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zenoq

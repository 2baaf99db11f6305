#pragma once
// Fixed-size complex matrix algebra: Pauli constructors, Kronecker product
// (target first, detector second), detector partial trace, column-stacking
// maps, Hermitian matrix exponential, and a general 4x4 eigensolver with
// defectiveness detection.

#include <array>

#include "zenoq/types.hpp"

namespace zenoq {

// Tolerance below which a matrix is accepted as Hermitian (max-entry norm).
inline constexpr double kHermTol = 1e-12;

// Eigenvector-matrix condition number above which a spectrum is flagged
// defective and spectral-form evolution must not be used.
inline constexpr double kDefectiveCond = 1e8;

Op2 identity2();
Op2 sigma_x();
Op2 sigma_y();
Op2 sigma_z();

// Kronecker product with the target as the first factor:
// result[(2a+b),(2c+d)] = A(a,c) * B(b,d).
Op4 tensor(const Op2& target, const Op2& detector);

// Trace over the detector (second) factor; preserves the total trace.
Op2 partial_trace_detector(const Op4& m);

// vec([[a,b],[c,d]]) = (a, c, b, d): column stacking.
VecOp vec(const Op2& a);
Op2 unvec(const VecOp& v);

// exp(-i H t) via spectral decomposition. H must be Hermitian within
// kHermTol; violations raise ContractError.
Op4 herm_expm(const Op4& h, double t);

// Deterministic phase gauge: rotates the largest-magnitude entry (lowest
// index on ties) real nonnegative. Zero vectors pass through unchanged.
VecOp phase_fixed(const VecOp& v);

struct EigenPair4 {
  Complex value;
  VecOp vector;     // unit 2-norm; largest-magnitude entry rotated real >= 0
  double residual;  // ||M v - value v||_2
};

struct Eig4Result {
  // Sorted by descending |value|; ties by descending Re, then descending Im.
  std::array<EigenPair4, 4> pairs;
  // Eigenvector matrix condition number exceeded kDefectiveCond.
  bool defective = false;
};

// Dense non-normal eigensolver: Hessenberg + shifted complex QR to Schur form
// (200-sweep cap), eigenvectors by triangular back-substitution. Raises
// NumericalError carrying the partial Schur factor on non-convergence.
Eig4Result eig_general(const Op4& m);

}  // namespace zenoq

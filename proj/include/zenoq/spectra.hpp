#pragma once
// Channel spectra: eigen-decomposition with fixed/almost-fixed/transient
// classification, state decomposition into eigen-operators, n-cycle evolution
// (iterative with a spectral cross-check), and CPTP diagnostics.

#include <array>
#include <vector>

#include "zenoq/model.hpp"
#include "zenoq/qcore.hpp"
#include "zenoq/types.hpp"

namespace zenoq {

inline constexpr double kEpsFixed = 1e-10;
inline constexpr double kEpsAlmost = 1e-2;  // the slow-decay reporting threshold

enum class EigenClass { kFixed, kAlmostFixed, kTransient };

struct SpectralData {
  // Sorted by descending |value|; ties by descending Re, then descending Im.
  std::array<Complex, 4> values;
  // unvec of the phase-fixed unit eigenvectors (Frobenius norm 1).
  std::array<Op2, 4> eigen_ops;
  std::array<double, 4> residuals;
  std::array<EigenClass, 4> classes;
  bool defective = false;

  // Index of the eigenvalue nearest 1 (the Brouwer direction).
  int brouwer_index() const;
  // Smallest |value - 1| over the non-Brouwer eigenvalues.
  double min_gap() const;
};

// Classification: fixed iff |v-1| <= eps_fixed; almost-fixed iff
// eps_fixed < |v-1| <= eps_almost; transient otherwise.
SpectralData spectral_decompose(const SuperOp& s, double eps_fixed = kEpsFixed,
                                double eps_almost = kEpsAlmost);

struct EigenCoefficients {
  std::array<Complex, 4> c;
};

// Solves rho = sum_j c_j V_j in vec space. Requires a non-defective
// decomposition (DecompositionError otherwise).
EigenCoefficients state_decompose(const QubitState& rho,
                                  const SpectralData& sd);

struct Trajectory {
  std::vector<QubitState> states;  // length n+1; states[0] == rho0
  // True when the spectral form was also evaluated (non-defective input);
  // spectral_max_dev is then the largest trace-norm gap between the paths.
  bool spectral_checked = false;
  double spectral_max_dev = 0.0;
};

// Repeated application of s to rho0 for n cycles; cross-checked against the
// closed spectral form sum_j value_j^k c_j V_j whenever that form exists.
Trajectory evolve_n(const SuperOp& s, const QubitState& rho0, int n);

struct CptpDiagnostics {
  double trace_dev;     // worst column violation of trace preservation
  double min_choi_eig;  // most negative Choi eigenvalue (Hermitized Choi)
  double herm_dev;      // worst violation of Phi(A^dag) = Phi(A)^dag
};

CptpDiagnostics validate_cptp(const SuperOp& s);

}  // namespace zenoq

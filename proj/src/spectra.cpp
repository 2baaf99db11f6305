#include "zenoq/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "zenoq/measurement.hpp"

namespace zenoq {

int SpectralData::brouwer_index() const {
  int b = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 4; ++j) {
    const double gap = std::abs(values[j] - Complex(1.0));
    if (gap < best) {
      best = gap;
      b = j;
    }
  }
  return b;
}

double SpectralData::min_gap() const {
  const int b = brouwer_index();
  double m = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 4; ++j) {
    if (j == b) continue;
    m = std::min(m, std::abs(values[j] - Complex(1.0)));
  }
  return m;
}

SpectralData spectral_decompose(const SuperOp& s, double eps_fixed, double eps_almost) {
  if (!(eps_fixed >= 0.0) || !(eps_almost >= eps_fixed))
    throw ContractError("spectral_decompose: need 0 <= eps_fixed <= eps_almost");
  const Eig4Result eig = eig_general(s);
  SpectralData sd;
  sd.defective = eig.defective;
  for (int j = 0; j < 4; ++j) {
    sd.values[j] = eig.pairs[j].value;
    sd.eigen_ops[j] = unvec(eig.pairs[j].vector);
    sd.residuals[j] = eig.pairs[j].residual;
    const double gap = std::abs(sd.values[j] - Complex(1.0));
    sd.classes[j] = gap <= eps_fixed    ? EigenClass::kFixed
                    : gap <= eps_almost ? EigenClass::kAlmostFixed
                                        : EigenClass::kTransient;
  }
  return sd;
}

EigenCoefficients state_decompose(const QubitState& rho, const SpectralData& sd) {
  if (sd.defective)
    throw DecompositionError(
        "state_decompose: eigenbasis is numerically defective, expansion "
        "unsupported");
  Op4 vmat;
  for (int j = 0; j < 4; ++j) vmat.col(j) = vec(sd.eigen_ops[j]);
  const VecOp c = vmat.fullPivLu().solve(vec(rho.matrix()));
  EigenCoefficients ec;
  for (int j = 0; j < 4; ++j) ec.c[j] = c(j);
  return ec;
}

Trajectory evolve_n(const SuperOp& s, const QubitState& rho0, int n) {
  if (n < 0) throw ContractError("evolve_n: cycle count must be nonnegative");

  Trajectory tr;
  tr.states.reserve(static_cast<size_t>(n) + 1);
  tr.states.push_back(rho0);

  VecOp v = vec(rho0.matrix());
  for (int k = 1; k <= n; ++k) {
    v = s * v;
    // Hermitize and renormalize against accumulated roundoff; for a
    // trace-preserving map the correction stays near machine epsilon.
    Op2 m = unvec(v);
    m = 0.5 * (m + m.adjoint()).eval();
    const double trc = m.trace().real();
    if (!(std::abs(trc) > 1e-6))
      throw NumericalError("evolve_n: trajectory trace collapsed");
    m /= trc;
    try {
      tr.states.push_back(QubitState::from_matrix(m));
    } catch (const ContractError&) {
      // clip eigenvalue noise just below zero, renormalize, revalidate
      Eigen::SelfAdjointEigenSolver<Op2> es(m);
      if (es.eigenvalues()(0) < -1e-9)
        throw NumericalError("evolve_n: trajectory left the state set");
      Eigen::Vector2d w = es.eigenvalues().cwiseMax(0.0);
      w /= w.sum();
      tr.states.push_back(QubitState::from_matrix(
          es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint()));
    }
  }

  // Cross-check against the closed-form propagation when the eigenbasis is
  // well conditioned; iterative states stay authoritative either way.
  try {
    const SpectralData sd = spectral_decompose(s);
    if (!sd.defective) {
      const EigenCoefficients ec = state_decompose(rho0, sd);
      std::array<Complex, 4> lam_pow{1.0, 1.0, 1.0, 1.0};
      double worst = 0.0;
      for (int k = 0; k <= n; ++k) {
        Op2 m = Op2::Zero();
        for (int j = 0; j < 4; ++j) m += ec.c[j] * lam_pow[j] * sd.eigen_ops[j];
        m = 0.5 * (m + m.adjoint()).eval();
        worst = std::max(
            worst, 0.5 * trace_norm2(m - tr.states[static_cast<size_t>(k)].matrix()));
        for (int j = 0; j < 4; ++j) lam_pow[j] *= sd.values[j];
      }
      tr.spectral_checked = true;
      tr.spectral_max_dev = worst;
    }
  } catch (const NumericalError&) {
    // eigensolver failure leaves the iterative trajectory standing alone
  }
  return tr;
}

CptpDiagnostics validate_cptp(const SuperOp& s) {
  CptpDiagnostics d{};

  d.trace_dev = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double target = (k == 0 || k == 3) ? 1.0 : 0.0;
    d.trace_dev = std::max(d.trace_dev, std::abs(s(0, k) + s(3, k) - Complex(target)));
  }

  d.herm_dev = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          d.herm_dev = std::max(
              d.herm_dev, std::abs(s(j + 2 * i, l + 2 * k) -
                                   std::conj(s(i + 2 * j, k + 2 * l))));

  const Op4 c = choi_matrix(s);
  const Eigen::SelfAdjointEigenSolver<Op4> es(0.5 * (c + c.adjoint()),
                                              Eigen::EigenvaluesOnly);
  d.min_choi_eig = es.eigenvalues()(0);
  return d;
}

}  // namespace zenoq

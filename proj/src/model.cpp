#include "zenoq/model.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace zenoq {

void validate(const ModelParams& p) {
  if (!std::isfinite(p.g) || !std::isfinite(p.dtf) || !std::isfinite(p.dtm))
    throw ContractError("ModelParams: g, dtf, dtm must be finite");
  if (p.g < 0.0 || p.dtf < 0.0 || p.dtm < 0.0)
    throw ContractError("ModelParams: g, dtf, dtm must be nonnegative");
}

double big_omega(const ModelParams& p) { return std::sqrt(p.g * p.g + 4.0); }

QubitState::QubitState() : m_(0.5 * Op2::Identity()) {}

QubitState QubitState::from_matrix(const Op2& m) {
  if (!m.allFinite()) throw ContractError("QubitState: non-finite matrix");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermTol)
    throw ContractError("QubitState: matrix is not Hermitian");
  if (std::abs(m.trace() - Complex(1.0)) > 1e-12)
    throw ContractError("QubitState: trace deviates from 1 by more than 1e-12");
  const Op2 h = 0.5 * (m + m.adjoint());
  const Eigen::SelfAdjointEigenSolver<Op2> es(h);
  if (es.eigenvalues()(0) < -1e-12)
    throw ContractError("QubitState: eigenvalue below -1e-12, not a state");
  return QubitState(h);
}

QubitState QubitState::from_bloch(const Bloch& r) {
  if (!r.allFinite()) throw ContractError("QubitState: non-finite Bloch vector");
  if (r.norm() > 1.0 + 1e-10)
    throw ContractError("QubitState: Bloch vector leaves the unit ball");
  Op2 m;
  m << 0.5 * (1.0 + r.z()), 0.5 * Complex(r.x(), -r.y()),
      0.5 * Complex(r.x(), r.y()), 0.5 * (1.0 - r.z());
  return QubitState(m);
}

QubitState QubitState::ground() { return from_bloch(Bloch(0, 0, 1)); }

QubitState QubitState::excited() { return from_bloch(Bloch(0, 0, -1)); }

QubitState QubitState::maximally_mixed() { return QubitState(); }

Bloch QubitState::bloch() const {
  return Bloch(2.0 * m_(1, 0).real(), 2.0 * m_(1, 0).imag(),
               m_(0, 0).real() - m_(1, 1).real());
}

double trace_norm2(const Op2& a) {
  const Eigen::JacobiSVD<Op2> svd(a);
  return svd.singularValues().sum();
}

double trace_distance(const QubitState& a, const QubitState& b) {
  return 0.5 * trace_norm2(a.matrix() - b.matrix());
}

Op4 joint_hamiltonian(const ModelParams& p) {
  validate(p);
  return p.g * tensor(sigma_x(), sigma_x()) + tensor(sigma_z(), identity2()) +
         tensor(identity2(), sigma_z());
}

SuperOp cycle_channel(const ModelParams& p, const QubitState& rho_d) {
  validate(p);
  const Op4 um = herm_expm(joint_hamiltonian(p), p.dtm);
  Op2 uf;
  uf << std::exp(Complex(0.0, -p.dtf)), 0, 0, std::exp(Complex(0.0, p.dtf));

  SuperOp m;
  for (int k = 0; k < 4; ++k) {
    VecOp e = VecOp::Zero();
    e(k) = 1.0;
    const Op2 x = uf * unvec(e) * uf.adjoint();
    const Op4 joint = um * tensor(x, rho_d.matrix()) * um.adjoint();
    m.col(k) = vec(partial_trace_detector(joint));
  }
  return m;
}

SuperOp cycle_channel_kron(const ModelParams& p, const QubitState& rho_d) {
  validate(p);
  using M16 = Eigen::Matrix<Complex, 16, 16>;
  using Lift = Eigen::Matrix<Complex, 16, 4>;
  using Tr = Eigen::Matrix<Complex, 4, 16>;

  const Op4 um = herm_expm(joint_hamiltonian(p), p.dtm);
  Op2 uf;
  uf << std::exp(Complex(0.0, -p.dtf)), 0, 0, std::exp(Complex(0.0, p.dtf));

  // Column-stacking convention: conjugation by U acts as conj(U) (x) U.
  SuperOp wf;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      wf.block<2, 2>(2 * a, 2 * b) = std::conj(uf(a, b)) * uf;

  M16 wm;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      wm.block<4, 4>(4 * a, 4 * b) = std::conj(um(a, b)) * um;

  // Lift: vec(rho_T) -> vec(rho_T (x) rho_D) with the target as first factor.
  Lift lift = Lift::Zero();
  for (int t = 0; t < 2; ++t)
    for (int tp = 0; tp < 2; ++tp)
      for (int d = 0; d < 2; ++d)
        for (int dp = 0; dp < 2; ++dp)
          lift((2 * t + d) + 4 * (2 * tp + dp), t + 2 * tp) = rho_d.matrix()(d, dp);

  // Partial trace over the detector on vectorized joint operators.
  Tr tr = Tr::Zero();
  for (int t = 0; t < 2; ++t)
    for (int tp = 0; tp < 2; ++tp)
      for (int d = 0; d < 2; ++d)
        tr(t + 2 * tp, (2 * t + d) + 4 * (2 * tp + d)) = 1.0;

  return tr * wm * lift * wf;
}

// Closed-form ground-detector superoperator, kept verbatim as a fixed
// reference for the reconciliation report. Several entries are known to
// deviate from the numerically exact channel; reconcile quantifies each
// deviation. The brute-force channel is authoritative throughout.
SuperOp analytic_superop(const ModelParams& p) {
  validate(p);
  const double g = p.g;
  const double w = 1.0;
  const double om = std::sqrt(g * g + 4.0 * w * w);
  const double cb = std::cos(om * p.dtm), sb = std::sin(om * p.dtm);
  const double cg = std::cos(g * p.dtm), sg = std::sin(g * p.dtm);
  const double den = om * om * (g + om) * (g + om);
  const Complex ef = std::exp(Complex(0.0, 2.0 * w * p.dtf));
  const double q = om * g + g * g + 4.0 * w * w;

  SuperOp m = SuperOp::Zero();
  m(0, 0) = 2.0 *
            ((g * g * g * om + g * g * g * g + 2.0 * g * g * w * w) * cb * cb +
             4.0 * om * g * w * w + 4.0 * g * g * w * w + 8.0 * w * w * w * w) /
            den;
  m(0, 3) = q * q * sb * sb / den;
  m(3, 0) = g * g * sb * sb / (om * om);
  m(3, 3) = q * q * cb * cb / den;
  m(1, 1) = cg * (om * g + om * om) * ef *
            (q * cb + Complex(0.0, 2.0 * (w * om + 2.0 * w * g)) * sb) / den;
  m(2, 2) = std::conj(m(1, 1));
  m(1, 2) = std::conj(ef) * g * sb * sg * q / den;
  m(2, 1) = std::conj(m(1, 2));
  return m;
}

SuperOp idealized_channel(double theta, double phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi))
    throw ContractError("idealized_channel: non-finite angle");
  const double c2 = std::cos(theta) * std::cos(theta);
  const double s2 = std::sin(theta) * std::sin(theta);
  const Complex e2 = std::exp(Complex(0.0, 2.0 * phi));

  SuperOp m = SuperOp::Zero();
  m(0, 0) = c2;
  m(0, 3) = s2;
  m(3, 0) = s2;
  m(3, 3) = c2;
  m(1, 1) = c2 * e2;
  m(2, 1) = s2 * e2;
  m(1, 2) = s2 * std::conj(e2);
  m(2, 2) = c2 * std::conj(e2);
  return m;
}

}  // namespace zenoq

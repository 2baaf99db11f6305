#include "zenoq/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace zenoq {

Op2 identity2() { return Op2::Identity(); }

Op2 sigma_x() {
  Op2 m;
  m << 0, 1, 1, 0;
  return m;
}

Op2 sigma_y() {
  Op2 m;
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Op2 sigma_z() {
  Op2 m;
  m << 1, 0, 0, -1;
  return m;
}

Op4 tensor(const Op2& target, const Op2& detector) {
  Op4 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.block<2, 2>(2 * i, 2 * j) = target(i, j) * detector;
  return r;
}

Op2 partial_trace_detector(const Op4& m) {
  Op2 r;
  for (int t = 0; t < 2; ++t)
    for (int u = 0; u < 2; ++u)
      r(t, u) = m(2 * t, 2 * u) + m(2 * t + 1, 2 * u + 1);
  return r;
}

VecOp vec(const Op2& a) {
  VecOp v;
  v << a(0, 0), a(1, 0), a(0, 1), a(1, 1);
  return v;
}

Op2 unvec(const VecOp& v) {
  Op2 a;
  a << v(0), v(2), v(1), v(3);
  return a;
}

Op4 herm_expm(const Op4& h, double t) {
  if (!h.allFinite()) throw ContractError("herm_expm: non-finite generator");
  const double dev = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (!(dev <= kHermTol))
    throw ContractError("herm_expm: generator is not Hermitian (deviation " +
                        std::to_string(dev) + ")");
  const Eigen::SelfAdjointEigenSolver<Op4> es(0.5 * (h + h.adjoint()));
  Eigen::Vector4cd phases;
  for (int k = 0; k < 4; ++k)
    phases(k) = std::exp(Complex(0.0, -es.eigenvalues()(k) * t));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

VecOp phase_fixed(const VecOp& v) {
  int k = 0;
  double best = -1.0;
  for (int i = 0; i < 4; ++i) {
    const double a = std::abs(v(i));
    if (a > best) {
      best = a;
      k = i;
    }
  }
  if (best <= 0.0) return v;
  VecOp w = v * (std::conj(v(k)) / best);
  w(k) = Complex(std::abs(w(k)), 0.0);  // exact up to the rotation's roundoff
  return w;
}

namespace {

// Eigenvector of an upper-triangular T for the eigenvalue at diagonal slot i,
// by back-substitution. Vanishing pivots (repeated eigenvalues) are perturbed
// to eps * ||T||; for genuinely defective matrices this yields nearly
// dependent vectors, which the condition-number check downstream flags.
VecOp triangular_eigvec(const Op4& t, int i) {
  const Complex lambda = t(i, i);
  const double small = std::numeric_limits<double>::epsilon() *
                       std::max(1.0, t.cwiseAbs().maxCoeff());
  VecOp y = VecOp::Zero();
  y(i) = 1.0;
  for (int j = i - 1; j >= 0; --j) {
    Complex s = 0.0;
    for (int k = j + 1; k <= i; ++k) s += t(j, k) * y(k);
    Complex d = t(j, j) - lambda;
    if (std::abs(d) < small) d = Complex(small, 0.0);
    y(j) = -s / d;
  }
  return y;
}

}  // namespace

Eig4Result eig_general(const Op4& m) {
  if (!m.allFinite()) throw ContractError("eig_general: non-finite input");

  Eigen::ComplexSchur<Op4> schur;
  schur.setMaxIterations(200);
  schur.compute(m, /*computeU=*/true);
  if (schur.info() != Eigen::Success)
    throw NumericalError("eig_general: QR iteration exceeded 200 sweeps",
                         schur.matrixT());

  const Op4& t = schur.matrixT();
  const Op4& u = schur.matrixU();

  std::array<EigenPair4, 4> raw;
  for (int i = 0; i < 4; ++i) {
    VecOp v = u * triangular_eigvec(t, i);
    v /= v.norm();
    v = phase_fixed(v);
    raw[i].value = t(i, i);
    raw[i].vector = v;
    raw[i].residual = (m * v - raw[i].value * v).norm();
  }

  std::array<int, 4> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(raw[a].value), mb = std::abs(raw[b].value);
    if (ma != mb) return ma > mb;
    if (raw[a].value.real() != raw[b].value.real())
      return raw[a].value.real() > raw[b].value.real();
    return raw[a].value.imag() > raw[b].value.imag();
  });

  Eig4Result res;
  Op4 vmat;
  for (int i = 0; i < 4; ++i) {
    res.pairs[i] = raw[order[i]];
    vmat.col(i) = res.pairs[i].vector;
  }

  const Eigen::JacobiSVD<Op4> svd(vmat);
  const double smin = svd.singularValues()(3);
  const double cond =
      svd.singularValues()(0) / std::max(smin, std::numeric_limits<double>::min());
  res.defective = !(cond <= kDefectiveCond);
  return res;
}

}  // namespace zenoq

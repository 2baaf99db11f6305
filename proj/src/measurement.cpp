#include "zenoq/measurement.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace zenoq {

Op4 choi_matrix(const SuperOp& s) {
  // C[(2i+k),(2j+l)] = <k| Phi(|i><j|) |l> under the column-stacking layout.
  Op4 c;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) c(2 * i + k, 2 * j + l) = s(k + 2 * l, i + 2 * j);
  return c;
}

double KrausSet::completeness_dev() const {
  Op2 sum = Op2::Zero();
  for (const Op2& k : ops) sum += k.adjoint() * k;
  return (sum - Op2::Identity()).cwiseAbs().maxCoeff();
}

KrausSet kraus_from_channel(const SuperOp& s, double rank_tol) {
  const Op4 c = choi_matrix(s);
  const Eigen::SelfAdjointEigenSolver<Op4> es(0.5 * (c + c.adjoint()));
  if (es.eigenvalues()(0) < -1e-6)
    throw ContractError(
        "kraus_from_channel: Choi eigenvalue below -1e-6, map is not completely "
        "positive");

  KrausSet ks;
  for (int r = 3; r >= 0; --r) {  // descending Choi eigenvalues
    const double mu = es.eigenvalues()(r);
    if (mu <= rank_tol) continue;
    const VecOp w = phase_fixed(es.eigenvectors().col(r));
    Op2 k;
    for (int i = 0; i < 2; ++i)
      for (int col = 0; col < 2; ++col) k(i, col) = std::sqrt(mu) * w(2 * col + i);
    ks.ops.push_back(k);
  }
  return ks;
}

SuperOp channel_from_kraus(const KrausSet& ks) {
  SuperOp m = SuperOp::Zero();
  for (const Op2& k : ks.ops)
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) m.block<2, 2>(2 * a, 2 * c) += std::conj(k(a, c)) * k;
  return m;
}

PovmSet povm_from_kraus(const KrausSet& ks) {
  PovmSet pv;
  pv.elements.reserve(ks.ops.size());
  for (const Op2& k : ks.ops) {
    const Op2 e = k.adjoint() * k;
    pv.elements.push_back(0.5 * (e + e.adjoint()));
  }
  return pv;
}

std::vector<double> outcome_probabilities(const PovmSet& pv, const QubitState& rho) {
  std::vector<double> p;
  p.reserve(pv.elements.size());
  for (const Op2& e : pv.elements) p.push_back((e * rho.matrix()).trace().real());
  return p;
}

QubitState post_measurement_state(const KrausSet& ks, int j, const QubitState& rho) {
  if (j < 0 || j >= static_cast<int>(ks.ops.size()))
    throw ContractError("post_measurement_state: outcome index out of range");
  const Op2& k = ks.ops[static_cast<size_t>(j)];
  const Op2 num = k * rho.matrix() * k.adjoint();
  const double p = num.trace().real();
  if (p <= 1e-14)
    throw ContractError("post_measurement_state: outcome probability " +
                        std::to_string(p) + " is numerically zero");
  const Op2 out = 0.5 * (num + num.adjoint()) / p;
  return QubitState::from_matrix(out);
}

}  // namespace zenoq

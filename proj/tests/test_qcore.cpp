// Core linear algebra: layouts, gauges, exponentials, and the dense
// eigensolver, each checked against an independently coded oracle.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "zenoq/qcore.hpp"
#include "zenoq/rng.hpp"

using namespace zenoq;

namespace {

double max_abs(const Op4& m) { return m.cwiseAbs().maxCoeff(); }
double max_abs2(const Op2& m) { return m.cwiseAbs().maxCoeff(); }

// Series oracle for exp(-i H t): scaling and squaring plus a Taylor sum.
// Shares no code with the spectral implementation under test.
Op4 series_expm(const Op4& h, double t) {
  Op4 a = Complex(0.0, -t) * h;
  int squarings = 0;
  while (a.cwiseAbs().maxCoeff() > 0.25) {
    a *= 0.5;
    ++squarings;
  }
  Op4 sum = Op4::Identity();
  Op4 term = Op4::Identity();
  for (int k = 1; k <= 30; ++k) {
    term = (term * a / static_cast<double>(k)).eval();
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = (sum * sum).eval();
  return sum;
}

// Characteristic polynomial lambda^4 + c[3] l^3 + c[2] l^2 + c[1] l + c[0]
// by the Faddeev-LeVerrier trace recursion.
std::array<Complex, 4> char_poly(const Op4& m) {
  std::array<Complex, 4> c{};
  Op4 n = m;
  c[3] = -n.trace();
  n = m * (n + c[3] * Op4::Identity());
  c[2] = -n.trace() / 2.0;
  n = m * (n + c[2] * Op4::Identity());
  c[1] = -n.trace() / 3.0;
  n = m * (n + c[1] * Op4::Identity());
  c[0] = -n.trace() / 4.0;
  return c;
}

// Durand-Kerner roots of the quartic above. Independent of any QR code.
std::array<Complex, 4> poly_roots(const std::array<Complex, 4>& c) {
  auto p = [&](Complex x) {
    return ((((x + c[3]) * x + c[2]) * x + c[1]) * x) + c[0];
  };
  std::array<Complex, 4> r{};
  const Complex base(0.4, 0.9);
  Complex acc(1.0, 0.0);
  for (auto& root : r) {
    acc *= base;
    root = acc;
  }
  for (int it = 0; it < 500; ++it) {
    double moved = 0.0;
    for (int i = 0; i < 4; ++i) {
      Complex denom(1.0, 0.0);
      for (int j = 0; j < 4; ++j)
        if (j != i) denom *= r[i] - r[j];
      const Complex delta = p(r[i]) / denom;
      r[i] -= delta;
      moved = std::max(moved, std::abs(delta));
    }
    if (moved < 1e-15) break;
  }
  return r;
}

// Worst-case distance under the best greedy pairing of two size-4 multisets.
double multiset_gap(const std::array<Complex, 4>& a, const std::array<Complex, 4>& b) {
  std::array<bool, 4> used{};
  double worst = 0.0;
  for (const Complex& x : a) {
    int best = -1;
    double bd = 1e300;
    for (int j = 0; j < 4; ++j) {
      if (used[static_cast<size_t>(j)]) continue;
      const double d = std::abs(x - b[static_cast<size_t>(j)]);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    used[static_cast<size_t>(best)] = true;
    worst = std::max(worst, bd);
  }
  return worst;
}

}  // namespace

TEST_CASE("pauli matrices satisfy their algebra") {
  const Op2 i2 = identity2(), sx = sigma_x(), sy = sigma_y(), sz = sigma_z();
  CHECK(max_abs2(sx * sx - i2) == 0.0);
  CHECK(max_abs2(sy * sy - i2) == 0.0);
  CHECK(max_abs2(sz * sz - i2) == 0.0);
  CHECK(max_abs2(sx * sy - Complex(0, 1) * sz) == 0.0);
  CHECK(max_abs2(sy * sz - Complex(0, 1) * sx) == 0.0);
  CHECK(max_abs2(sx * sy + sy * sx) == 0.0);
  CHECK(sz(0, 0) == Complex(1.0));
  CHECK(sz(1, 1) == Complex(-1.0));
  CHECK(sx(0, 1) == Complex(1.0));
  CHECK(sy(0, 1) == Complex(0.0, -1.0));
}

TEST_CASE("tensor puts the target on the slow index") {
  Op2 a, b;
  a << Complex(1), Complex(2), Complex(3), Complex(4);
  b << Complex(5), Complex(6), Complex(7), Complex(8);
  const Op4 t = tensor(a, b);
  // result[(2p+q),(2r+s)] = a(p,r) b(q,s)
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s)
          CHECK(t(2 * p + q, 2 * r + s) == a(p, r) * b(q, s));
  CHECK(max_abs(tensor(identity2(), identity2()) - Op4::Identity()) == 0.0);

  Rng rng(7);
  for (int k = 0; k < 20; ++k) {
    const Op2 c = rng.herm2(), d = rng.herm2();
    CHECK(max_abs(tensor(a, b) * tensor(c, d) - tensor((a * c).eval(), (b * d).eval())) < 1e-12);
  }
}

TEST_CASE("partial trace removes the detector factor") {
  Rng rng(11);
  for (int k = 0; k < 20; ++k) {
    const Op2 a = rng.herm2(), b = rng.herm2();
    CHECK(max_abs2(partial_trace_detector(tensor(a, b)) - (a * b.trace()).eval()) < 1e-13);
  }
  // Basis oracle on a full random joint operator.
  Op4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = rng.cnormal();
  const Op2 r = partial_trace_detector(m);
  for (int t = 0; t < 2; ++t)
    for (int u = 0; u < 2; ++u)
      CHECK(std::abs(r(t, u) - (m(2 * t + 0, 2 * u + 0) + m(2 * t + 1, 2 * u + 1))) < 1e-15);
  CHECK(std::abs(r.trace() - m.trace()) < 1e-14);
}

TEST_CASE("vec stacks columns and carries conjugation as a kron factor") {
  Op2 x;
  x << Complex(1, 1), Complex(3, -2), Complex(2, 5), Complex(4, 0);
  const VecOp v = vec(x);
  CHECK(v(0) == x(0, 0));
  CHECK(v(1) == x(1, 0));
  CHECK(v(2) == x(0, 1));
  CHECK(v(3) == x(1, 1));
  CHECK(max_abs2(unvec(v) - x) == 0.0);

  Rng rng(13);
  for (int k = 0; k < 20; ++k) {
    const Op4 u4 = series_expm(rng.herm4(), 1.0);
    // Any 2x2 unitary embedded from a Hermitian generator.
    Op2 h = rng.herm2();
    Op2 u = Op2::Identity();
    {
      Eigen::SelfAdjointEigenSolver<Op2> es(h);
      const Op2 vmat = es.eigenvectors();
      Op2 d = Op2::Zero();
      for (int i = 0; i < 2; ++i)
        d(i, i) = std::exp(Complex(0.0, -es.eigenvalues()(i)));
      u = vmat * d * vmat.adjoint();
    }
    const Op2 rho = rng.herm2();
    const VecOp lhs = vec((u * rho * u.adjoint()).eval());
    const VecOp rhs = tensor(u.conjugate(), u) * vec(rho);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    (void)u4;
  }
}

TEST_CASE("hermitian exponential matches the series oracle") {
  Rng rng(17);
  for (int k = 0; k < 50; ++k) {
    const Op4 h = rng.herm4();
    const double t = rng.uniform(-2.0, 2.0);
    const Op4 u = herm_expm(h, t);
    CHECK(max_abs(u - series_expm(h, t)) < 1e-13);
    CHECK(max_abs(u * u.adjoint() - Op4::Identity()) < 1e-14);
  }
}

TEST_CASE("hermitian exponential satisfies the group law") {
  Rng rng(19);
  const Op4 h = rng.herm4();
  const double t1 = 0.37, t2 = 1.21;
  CHECK(max_abs(herm_expm(h, t1) * herm_expm(h, t2) - herm_expm(h, t1 + t2)) < 1e-13);
  CHECK(max_abs(herm_expm(h, 0.0) - Op4::Identity()) < 1e-15);
}

TEST_CASE("hermitian exponential rejects non-hermitian input") {
  Op4 h = Op4::Identity();
  h(0, 1) = Complex(1e-6, 0.0);  // asymmetric well above the gate
  CHECK_THROWS_AS(herm_expm(h, 1.0), ContractError);
}

TEST_CASE("phase gauge is deterministic and norm preserving") {
  Rng rng(23);
  for (int k = 0; k < 30; ++k) {
    VecOp v;
    for (int i = 0; i < 4; ++i) v(i) = rng.cnormal();
    const VecOp w = phase_fixed(v);
    CHECK(std::abs(w.norm() - v.norm()) < 1e-14);
    int big = 0;
    for (int i = 1; i < 4; ++i)
      if (std::abs(w(i)) > std::abs(w(big))) big = i;
    CHECK(w(big).imag() == 0.0);
    CHECK(w(big).real() >= 0.0);
    // Idempotent, and any input phase is quotiented away.
    CHECK((phase_fixed(w) - w).cwiseAbs().maxCoeff() < 1e-15);
    const Complex ph = std::exp(Complex(0.0, rng.uniform(0.0, 6.28)));
    CHECK((phase_fixed(VecOp(ph * v)) - w).cwiseAbs().maxCoeff() < 1e-13);
  }
  // Magnitude tie resolved toward the lowest index.
  VecOp tie;
  tie << Complex(0, 1), Complex(0, 0), Complex(0, 1), Complex(0, 0);
  const VecOp fixed = phase_fixed(tie);
  CHECK(fixed(0) == Complex(1.0, 0.0));
  CHECK(std::abs(fixed(2) - Complex(1.0, 0.0)) < 1e-15);
  const VecOp zero = phase_fixed(VecOp(VecOp::Zero()));
  CHECK(zero.norm() == 0.0);
}

TEST_CASE("eigensolver agrees with the characteristic polynomial oracle") {
  Rng rng(29);
  for (int k = 0; k < 60; ++k) {
    Op4 m;
    if (k % 3 == 0) {
      m = rng.herm4();
    } else {
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = rng.cnormal();
    }
    m /= std::max(1.0, max_abs(m));
    const Eig4Result r = eig_general(m);
    std::array<Complex, 4> got{};
    for (int i = 0; i < 4; ++i) got[static_cast<size_t>(i)] = r.pairs[static_cast<size_t>(i)].value;
    CHECK(multiset_gap(got, poly_roots(char_poly(m))) < 1e-8);
    for (const EigenPair4& p : r.pairs) {
      CHECK(std::abs(p.vector.norm() - 1.0) < 1e-12);
      CHECK((m * p.vector - p.value * p.vector).norm() <= p.residual + 1e-12);
      if (!r.defective) CHECK(p.residual < 1e-10);
      // Reported vectors carry the canonical phase.
      CHECK((phase_fixed(p.vector) - p.vector).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("eigenvalues are sorted by modulus, then real, then imaginary part") {
  Rng rng(31);
  for (int k = 0; k < 30; ++k) {
    Op4 m;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = rng.cnormal();
    const Eig4Result r = eig_general(m);
    std::array<Complex, 4> v{};
    for (int i = 0; i < 4; ++i) v[static_cast<size_t>(i)] = r.pairs[static_cast<size_t>(i)].value;
    std::array<Complex, 4> expect = v;
    std::stable_sort(expect.begin(), expect.end(), [](const Complex& a, const Complex& b) {
      if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
      if (a.real() != b.real()) return a.real() > b.real();
      return a.imag() > b.imag();
    });
    for (int i = 0; i < 4; ++i) CHECK(v[static_cast<size_t>(i)] == expect[static_cast<size_t>(i)]);
  }
}

TEST_CASE("diagonal input reproduces exact pairs") {
  Op4 m = Op4::Zero();
  m(0, 0) = Complex(3.0, 0.0);
  m(1, 1) = Complex(0.0, 2.0);
  m(2, 2) = Complex(-1.0, 0.0);
  m(3, 3) = Complex(0.5, 0.0);
  const Eig4Result r = eig_general(m);
  CHECK(!r.defective);
  CHECK(std::abs(r.pairs[0].value - Complex(3.0, 0.0)) < 1e-14);
  CHECK(std::abs(r.pairs[1].value - Complex(0.0, 2.0)) < 1e-14);
  CHECK(std::abs(r.pairs[2].value - Complex(-1.0, 0.0)) < 1e-14);
  CHECK(std::abs(r.pairs[3].value - Complex(0.5, 0.0)) < 1e-14);
  // Eigenvectors are (phase-fixed) basis vectors.
  CHECK(std::abs(r.pairs[0].vector(0) - Complex(1.0)) < 1e-14);
  CHECK(std::abs(r.pairs[3].vector(3) - Complex(1.0)) < 1e-14);
}

TEST_CASE("jordan blocks are flagged defective") {
  Op4 j = Op4::Zero();
  j(0, 0) = j(1, 1) = Complex(1.0);
  j(0, 1) = Complex(1.0);
  j(2, 2) = Complex(0.5);
  j(3, 3) = Complex(0.25);
  CHECK(eig_general(j).defective);

  // A rotated block keeps the spectrum even when roundoff splits the
  // double eigenvalue enough to dodge the condition threshold.
  Rng rng(37);
  const Op4 q = series_expm(rng.herm4(), 1.0);
  const Eig4Result r = eig_general((q * j * q.adjoint()).eval());
  for (const EigenPair4& p : r.pairs) CHECK(p.residual < 1e-12);
  std::array<Complex, 4> got{};
  for (int i = 0; i < 4; ++i) got[static_cast<size_t>(i)] = r.pairs[static_cast<size_t>(i)].value;
  const std::array<Complex, 4> expect{Complex(1), Complex(1), Complex(0.5), Complex(0.25)};
  CHECK(multiset_gap(got, expect) < 1e-6);
}

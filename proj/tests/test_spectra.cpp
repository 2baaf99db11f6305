// Channel spectra: eigenvalue classification, modal state decomposition,
// trajectory cross-checks, and complete-positivity diagnostics.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "zenoq/model.hpp"
#include "zenoq/qcore.hpp"
#include "zenoq/reconcile.hpp"
#include "zenoq/rng.hpp"
#include "zenoq/spectra.hpp"

using namespace zenoq;

namespace {

// Least-squares slope and intercept of y against x.
void linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                double* slope, double* intercept) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  *slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  *intercept = (sy - *slope * sx) / n;
}

SuperOp benchmark_channel() {
  return cycle_channel(kBenchmarkParams, QubitState::ground());
}

}  // namespace

TEST_CASE("idealized channel at zero phase has a doubly degenerate spectrum") {
  for (const double theta : {0.3, 0.7, M_PI / 3.0, 1.2}) {
    const SpectralData sd = spectral_decompose(idealized_channel(theta, 0.0));
    CHECK(!sd.defective);
    const double c2t = std::cos(2.0 * theta);
    CHECK(std::abs(sd.values[0] - Complex(1.0)) < 1e-10);
    CHECK(std::abs(sd.values[1] - Complex(1.0)) < 1e-10);
    CHECK(std::abs(sd.values[2] - Complex(c2t)) < 1e-10);
    CHECK(std::abs(sd.values[3] - Complex(c2t)) < 1e-10);
    CHECK(sd.classes[0] == EigenClass::kFixed);
    CHECK(sd.classes[1] == EigenClass::kFixed);
    CHECK(sd.classes[2] == EigenClass::kTransient);
    CHECK(sd.classes[3] == EigenClass::kTransient);
  }
}

TEST_CASE("small free phase lifts the degeneracy quadratically") {
  for (const double theta : {0.6, M_PI / 3.0, 1.1}) {
    std::vector<double> lx, ly;
    for (int i = 0; i < 10; ++i) {
      const double phi = 1e-4 * std::pow(100.0, i / 9.0);  // up to 1e-2
      const SpectralData sd = spectral_decompose(idealized_channel(theta, phi));
      const double gap = sd.min_gap();
      REQUIRE(gap > 0.0);
      lx.push_back(std::log(phi));
      ly.push_back(std::log(gap));
    }
    double slope = 0.0, intercept = 0.0;
    linear_fit(lx, ly, &slope, &intercept);
    const double cot = std::cos(theta) / std::sin(theta);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.01));
    CHECK(std::exp(intercept) == doctest::Approx(2.0 * cot * cot).epsilon(0.01));
  }
}

TEST_CASE("benchmark channel spectrum is frozen") {
  const SpectralData sd = spectral_decompose(benchmark_channel());
  CHECK(!sd.defective);
  CHECK(std::abs(sd.values[0]) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(sd.values[1]) == doctest::Approx(0.999937).epsilon(1e-4));
  CHECK(std::abs(sd.values[2]) == doctest::Approx(0.731555).epsilon(1e-4));
  CHECK(std::abs(sd.values[3]) == doctest::Approx(0.731509).epsilon(1e-4));
  CHECK(sd.min_gap() == doctest::Approx(6.322495984001364e-05).epsilon(1e-9));
  CHECK(sd.brouwer_index() == 0);
  CHECK(sd.classes[0] == EigenClass::kFixed);
  CHECK(sd.classes[1] == EigenClass::kAlmostFixed);
  CHECK(sd.classes[2] == EigenClass::kTransient);
  CHECK(sd.classes[3] == EigenClass::kTransient);
  for (const double r : sd.residuals) CHECK(r < 1e-10);
}

TEST_CASE("classification thresholds are honored") {
  // Diagonal superop with handpicked eigenvalues in each class.
  SuperOp m = SuperOp::Zero();
  m(0, 0) = Complex(1.0);
  m(1, 1) = Complex(1.0 - 5e-11);  // inside eps_fixed
  m(2, 2) = Complex(1.0 - 5e-3);   // inside eps_almost
  m(3, 3) = Complex(0.2);
  const SpectralData sd = spectral_decompose(m);
  CHECK(sd.classes[0] == EigenClass::kFixed);
  CHECK(sd.classes[1] == EigenClass::kFixed);
  CHECK(sd.classes[2] == EigenClass::kAlmostFixed);
  CHECK(sd.classes[3] == EigenClass::kTransient);
  CHECK(sd.brouwer_index() == 0);
  CHECK(sd.min_gap() == doctest::Approx(5e-11).epsilon(1e-6));
}

TEST_CASE("eigenvalues of a real-parameter channel pair up under conjugation") {
  Rng rng(83);
  for (int k = 0; k < 20; ++k) {
    const ModelParams p{rng.uniform(0.1, 3.0), rng.uniform(0.0, 20.0), rng.uniform(0.0, 20.0)};
    const SpectralData sd = spectral_decompose(cycle_channel(p, QubitState::ground()));
    for (const Complex& v : sd.values) {
      double best = 1e300;
      for (const Complex& w : sd.values) best = std::min(best, std::abs(std::conj(v) - w));
      CHECK(best < 1e-9);
    }
  }
}

TEST_CASE("states decompose into eigen-operators and reconstruct") {
  Rng rng(89);
  for (int k = 0; k < 25; ++k) {
    const ModelParams p{rng.uniform(0.1, 3.0), rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)};
    const SpectralData sd = spectral_decompose(cycle_channel(p, QubitState::ground()));
    if (sd.defective) continue;
    const QubitState rho = QubitState::from_bloch(rng.ball());
    const EigenCoefficients ec = state_decompose(rho, sd);
    Op2 rebuilt = Op2::Zero();
    for (int j = 0; j < 4; ++j)
      rebuilt += ec.c[static_cast<size_t>(j)] * sd.eigen_ops[static_cast<size_t>(j)];
    CHECK((rebuilt - rho.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("decomposition refuses a defective basis") {
  SuperOp j = SuperOp::Zero();
  j(0, 0) = j(1, 1) = Complex(1.0);
  j(0, 1) = Complex(1.0);
  j(2, 2) = Complex(0.5);
  j(3, 3) = Complex(0.25);
  const SpectralData sd = spectral_decompose(j);
  REQUIRE(sd.defective);
  CHECK_THROWS_AS(state_decompose(QubitState::maximally_mixed(), sd), DecompositionError);
}

TEST_CASE("evolution handles trivial and invalid cycle counts") {
  const SuperOp m = benchmark_channel();
  const QubitState rho = QubitState::from_bloch(Bloch(0.3, 0.2, 0.1));
  const Trajectory t0 = evolve_n(m, rho, 0);
  REQUIRE(t0.states.size() == 1);
  CHECK(trace_distance(t0.states[0], rho) < 1e-15);
  CHECK_THROWS_AS(evolve_n(m, rho, -1), ContractError);
}

TEST_CASE("the brouwer eigen-operator is invariant over many cycles") {
  const SuperOp m = benchmark_channel();
  const SpectralData sd = spectral_decompose(m);
  const Op2 v = sd.eigen_ops[static_cast<size_t>(sd.brouwer_index())];
  // Normalize the eigen-operator into a state; eigenvalue is exactly 1 here.
  const QubitState fp = QubitState::from_matrix((v / v.trace()).eval());
  const Trajectory t = evolve_n(m, fp, 100);
  REQUIRE(t.states.size() == 101);
  CHECK(trace_distance(t.states.back(), fp) < 1e-12);
  CHECK(t.spectral_checked);
  CHECK(t.spectral_max_dev < 1e-8);
  // The z-axis value of the frozen fixed point.
  CHECK(fp.bloch()(2) == doctest::Approx(-0.00559).epsilon(0.02));
  CHECK(std::abs(fp.bloch()(0)) < 1e-9);
  CHECK(std::abs(fp.bloch()(1)) < 1e-9);
}

TEST_CASE("idealized trajectory contracts transverse components geometrically") {
  const SuperOp m = idealized_channel(M_PI / 3.0, 0.0);  // cos(2 theta) = -1/2
  const QubitState rho = QubitState::from_bloch(Bloch(0.3, 0.4, 0.5));
  const Trajectory t = evolve_n(m, rho, 6);
  REQUIRE(t.states.size() == 7);
  for (int n = 0; n <= 6; ++n) {
    const Bloch b = t.states[static_cast<size_t>(n)].bloch();
    const double f = std::pow(-0.5, n);
    CHECK(b(0) == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(b(1) == doctest::Approx(0.4 * f).epsilon(1e-9));
    CHECK(b(2) == doctest::Approx(0.5 * f).epsilon(1e-9));
  }
  CHECK(t.spectral_checked);
  CHECK(t.spectral_max_dev < 1e-10);
}

TEST_CASE("cptp diagnostics pass a physical channel and flag broken maps") {
  const CptpDiagnostics ok = validate_cptp(benchmark_channel());
  CHECK(ok.trace_dev < 1e-12);
  CHECK(ok.min_choi_eig > -1e-10);
  CHECK(ok.herm_dev < 1e-12);

  // Uniform scaling breaks trace preservation by exactly the scale excess.
  const CptpDiagnostics scaled = validate_cptp(SuperOp(1.1 * SuperOp::Identity()));
  CHECK(scaled.trace_dev == doctest::Approx(0.1).epsilon(1e-10));

  // Transposition is positive but not completely positive.
  SuperOp transpose_map = SuperOp::Zero();
  transpose_map(0, 0) = transpose_map(3, 3) = Complex(1.0);
  transpose_map(1, 2) = transpose_map(2, 1) = Complex(1.0);
  const CptpDiagnostics tr = validate_cptp(transpose_map);
  CHECK(tr.trace_dev < 1e-14);
  CHECK(tr.herm_dev < 1e-14);
  CHECK(tr.min_choi_eig < -0.9);
}

TEST_CASE("random cycle channels are all physical") {
  Rng rng(97);
  for (int k = 0; k < 50; ++k) {
    const ModelParams p{rng.uniform(0.0, 3.0), rng.uniform(0.0, 20.0), rng.uniform(0.0, 20.0)};
    const CptpDiagnostics d = validate_cptp(cycle_channel(p, QubitState::from_bloch(rng.ball())));
    CHECK(d.trace_dev < 1e-12);
    CHECK(d.min_choi_eig > -1e-10);
    CHECK(d.herm_dev < 1e-12);
  }
}

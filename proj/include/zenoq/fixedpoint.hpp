#pragma once
// Fixed-point machinery: Brouwer fixed-point extraction, parameter-space
// scans for unit-modulus eigenvalue crossings, detector-state sweeps,
// inverse design of freezing configurations, eigenvalue refinement, and
// frequency-scaling probes.

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "zenoq/model.hpp"
#include "zenoq/spectra.hpp"
#include "zenoq/types.hpp"

namespace zenoq {

// The invariant state guaranteed for every channel: the eigenvector nearest
// eigenvalue 1, Hermitized, trace-normalized, tiny negative parts clipped.
// If several eigenvalues sit within kEpsFixed of 1, the maximally mixed
// state is projected onto that subspace along the other eigenspaces (the
// n -> infinity limit of the channel started at I/2). No eigenvalue within
// 1e-8 of 1 raises NumericalError: the input cannot be a faithful channel.
QubitState brouwer_fixed_point(const SuperOp& s);

struct ScanGrid {
  double g_lo = 0.05, g_hi = 2.0;
  int g_n = 40;
  double dtf_lo = 0.1, dtf_hi = 20.0;
  int dtf_n = 100;
  double dtm_lo = 0.1, dtm_hi = 20.0;
  int dtm_n = 100;
  Bloch detector = Bloch(0.0, 0.0, 1.0);

  long points() const {
    return static_cast<long>(g_n) * dtf_n * dtm_n;
  }
  // Raises ContractError on nonpositive counts or invalid ranges.
  void check() const;
};

struct ScanRecord {
  long idx = 0;
  ModelParams params;
  Bloch detector = Bloch::Zero();
  std::array<Complex, 4> eigenvalues{};
  Bloch fixed_point = Bloch::Zero();
  double min_gap = 0.0;  // min over non-Brouwer eigenvalues of |lambda - 1|
  bool defective = false;
};

// Evaluates the channel at every grid point (row-major over g, dtf, dtm) and
// returns the records with min_gap <= eps, ordered by grid index. Per-point
// numerical failures are returned as defective records rather than aborting.
// Results are identical for any worker count.
std::vector<ScanRecord> zeno_scan(const ScanGrid& grid, double eps,
                                  int workers = 1);

// Fixed parameters, detector states on a Fibonacci-sphere x radius grid
// (ground direction prepended; radii k/(n_radii-1) including 0 and 1).
// Returns every record; idx = direction_index * n_radii + radius_index.
std::vector<ScanRecord> detector_sweep(const ModelParams& p, int n_dirs,
                                       int n_radii, int workers = 1);

struct SearchConfig {
  double tol = 1e-8;        // residual target for convergence
  long budget = 20000;      // total channel evaluations
  int coarse_samples = 2048;
  int top_k = 16;           // local refinements started from the best seeds
  std::uint64_t seed = 42;
  // Optional explicit starting points, always refined and taking precedence
  // over random seeds among results that meet the tolerance.
  std::vector<std::pair<ModelParams, Bloch>> hints;
  // Coarse-sampling box (refinement may leave it but not the physical domain).
  double g_lo = 0.05, g_hi = 3.0;
  double dtf_lo = 0.0, dtf_hi = 6.4;
  double dtm_lo = 0.02, dtm_hi = 6.4;
};

struct DesignResult {
  ModelParams params;
  QubitState detector;
  double residual = 0.0;  // ||Phi(target) - target||_tr at the optimum
  std::array<double, 4> eigen_moduli{};  // descending
  bool attractive = false;  // all non-preserved moduli <= 1 - 1e-6
  bool converged = false;   // residual <= tol within budget
  long evaluations = 0;
};

// Derivative-free search (coarse sampling + Nelder-Mead refinement) over
// (g, dtf, dtm, detector Bloch ball) minimizing ||Phi(target) - target||_tr.
// Budget exhaustion yields converged = false, never an exception.
DesignResult freeze_design(const QubitState& target, const SearchConfig& cfg);

// Nelder-Mead refinement of the parameters inside a +-box_frac box around
// start, minimizing the non-Brouwer spectral gap min |lambda - 1| of the
// ground-detector channel.
struct RefineResult {
  ModelParams params;
  double min_gap = 0.0;
  bool ok = false;  // min_gap <= target reached within budget
  long evaluations = 0;
};

RefineResult refine_unit_eigenvalue(const ModelParams& start,
                                    const QubitState& detector,
                                    double box_frac = 0.01,
                                    double target = 1e-10, long budget = 6000);

// A pure state preserved by a channel whose spectrum contains a second
// unit-modulus eigenvalue: Brouwer point plus the Hermitized unit-eigenvalue
// coherence eigen-operator, scaled to the PSD boundary (pulled inward by
// 1e-9). Raises DecompositionError when no second eigenvalue lies within
// eps_unit of 1.
QubitState preserved_state(const SuperOp& s, double eps_unit = 1e-6);

struct ScalingFit {
  double exponent = 0.0;     // log-log slope of (1 - lambda_1) vs dtf
  double coefficient = 0.0;  // exp(intercept)
  bool degenerate = false;   // all gaps at noise level; fit meaningless
};

// Frequency-scaling probe along dtm = 0.05 dtf^2, g = theta/dtm (ground
// detector): fits min non-Brouwer |lambda - 1| against dtf in log-log.
// dtf_list must span at least one decade (ContractError otherwise).
ScalingFit scaling_probe(double theta, const std::vector<double>& dtf_list);

}  // namespace zenoq

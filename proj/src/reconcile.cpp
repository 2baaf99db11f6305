#include "zenoq/reconcile.hpp"

#include <algorithm>
#include <cmath>

#include "zenoq/fixedpoint.hpp"
#include "zenoq/measurement.hpp"
#include "zenoq/rng.hpp"
#include "zenoq/spectra.hpp"

namespace zenoq {

namespace {

using nlohmann::json;

json cplx(const Complex& z) { return json::array({z.real(), z.imag()}); }

json op2_json(const Op2& m) {
  // row-major, re/im interleaved
  return json::array({m(0, 0).real(), m(0, 0).imag(), m(0, 1).real(), m(0, 1).imag(),
                      m(1, 0).real(), m(1, 0).imag(), m(1, 1).real(), m(1, 1).imag()});
}

json dev_table(const SuperOp& a, const SuperOp& b) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int j = 0; j < 4; ++j) row.push_back(std::abs(a(i, j) - b(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json params_json(const ModelParams& p) {
  return json{{"g", p.g}, {"dtf", p.dtf}, {"dtm", p.dtm}};
}

// Exact closed-form ground-detector superoperator, derived independently of
// the tabulated reference; agrees with the brute-force channel to roundoff.
SuperOp corrected_superop(const ModelParams& p) {
  const double g = p.g;
  const double om = big_omega(p);
  const double cb = std::cos(om * p.dtm), sb = std::sin(om * p.dtm);
  const double cg = std::cos(g * p.dtm), sg = std::sin(g * p.dtm);
  const Complex ef = std::exp(Complex(0.0, 2.0 * p.dtf));

  SuperOp m = SuperOp::Zero();
  m(0, 0) = (g * g * cb * cb + 4.0) / (om * om);
  m(0, 3) = sg * sg;
  m(3, 0) = g * g * sb * sb / (om * om);
  m(3, 3) = cg * cg;
  m(1, 1) = cg * (Complex(cb, 0.0) + Complex(0.0, 2.0 * sb / om)) * ef;
  m(2, 2) = std::conj(m(1, 1));
  m(1, 2) = (g / om) * sb * sg * std::conj(ef);
  m(2, 1) = std::conj(m(1, 2));
  return m;
}

// Population-sector contraction eigenvalue, three closed forms.
double pop_eig_exact(const ModelParams& p) {
  const double om = big_omega(p);
  const double cg = std::cos(p.g * p.dtm), sb = std::sin(om * p.dtm);
  return cg * cg - (p.g * p.g / (om * om)) * sb * sb;
}

double pop_eig_ref_linear(const ModelParams& p) {
  const double om = big_omega(p);
  const double cg = std::cos(p.g * p.dtm), sb = std::sin(om * p.dtm);
  return cg * cg - (p.g / om) * sb * sb;
}

double pop_eig_ref_block(const ModelParams& p) {
  const double om = big_omega(p);
  const double sb = std::sin(om * p.dtm);
  return 1.0 - sb * sb * (1.0 + p.g * p.g / (om * om));
}

// Best complex scale alpha minimizing ||comp - alpha*ref||_F, then the
// relative residual of the match.
double scale_match_dev(const Op2& comp, const Op2& ref) {
  const Complex num = (ref.adjoint() * comp).trace();
  const double den = ref.squaredNorm();
  const Complex alpha = num / den;
  return (comp - alpha * ref).norm() / comp.norm();
}

constexpr bool on_pattern(int i, int j) {
  return (i == 0 && (j == 0 || j == 3)) || (i == 3 && (j == 0 || j == 3)) ||
         (i == 1 && (j == 1 || j == 2)) || (i == 2 && (j == 1 || j == 2));
}

}  // namespace

json reconcile_report(int n_random_points, std::uint64_t seed) {
  if (n_random_points < 1)
    throw ContractError("reconcile_report: need at least one sample point");

  json rep;
  rep["seed"] = seed;
  rep["n_random_points"] = n_random_points;

  Rng rng(seed);
  const QubitState ground = QubitState::ground();

  double dual_max = 0.0;
  double zero_pattern_max = 0.0;
  double colsum_max = 0.0;
  Eigen::Matrix4d entry_max = Eigen::Matrix4d::Zero();
  double corrected_max = 0.0;
  double fix_cross_scale_max = 0.0;
  double fix_pop_trig_max = 0.0;
  double fix_coh_imag_max = 0.0;
  double pop_exact_max = 0.0, pop_linear_max = 0.0, pop_block_max = 0.0;
  json per_point = json::array();

  for (int i = 0; i < n_random_points; ++i) {
    ModelParams p;
    p.g = rng.uniform(0.05, 2.0);
    p.dtf = rng.uniform(0.1, 20.0);
    p.dtm = rng.uniform(0.1, 20.0);

    const SuperOp oracle = cycle_channel(p, ground);
    const SuperOp dual = cycle_channel_kron(p, ground);
    dual_max = std::max(dual_max, (oracle - dual).cwiseAbs().maxCoeff());

    const SuperOp ref = analytic_superop(p);
    const SuperOp fix = corrected_superop(p);
    double point_max = 0.0;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        const double d = std::abs(ref(r, c) - oracle(r, c));
        entry_max(r, c) = std::max(entry_max(r, c), d);
        point_max = std::max(point_max, d);
        if (!on_pattern(r, c)) {
          zero_pattern_max = std::max(zero_pattern_max, std::abs(ref(r, c)));
          zero_pattern_max = std::max(zero_pattern_max, std::abs(oracle(r, c)));
        }
      }
    corrected_max = std::max(corrected_max, (fix - oracle).cwiseAbs().maxCoeff());

    for (int c : {0, 3}) {
      colsum_max = std::max(colsum_max, std::abs(ref(0, c) + ref(3, c) - Complex(1.0)));
    }

    const double om = big_omega(p);
    fix_cross_scale_max = std::max(
        fix_cross_scale_max, std::abs(ref(1, 2) * Complex(p.g + om) - oracle(1, 2)));
    fix_pop_trig_max =
        std::max({fix_pop_trig_max, std::abs(fix(0, 3) - oracle(0, 3)),
                  std::abs(fix(3, 3) - oracle(3, 3))});
    fix_coh_imag_max = std::max(fix_coh_imag_max, std::abs(fix(1, 1) - oracle(1, 1)));

    const double pop_oracle = (oracle(0, 0) + oracle(3, 3)).real() - 1.0;
    pop_exact_max = std::max(pop_exact_max, std::abs(pop_eig_exact(p) - pop_oracle));
    pop_linear_max =
        std::max(pop_linear_max, std::abs(pop_eig_ref_linear(p) - pop_oracle));
    pop_block_max =
        std::max(pop_block_max, std::abs(pop_eig_ref_block(p) - pop_oracle));

    per_point.push_back(json{{"params", params_json(p)}, {"max_abs_dev", point_max}});
  }

  rep["dual_path"] = json{{"n_points", n_random_points}, {"max_dev", dual_max}};

  // Strong-coupling limit: coupling dominates the level splitting by 1e8.
  json degenerate;
  {
    const ModelParams p{1e8, 0.9e-8, 1.7e-8};
    const SuperOp oracle = cycle_channel(p, ground);
    const SuperOp ref = analytic_superop(p);
    degenerate["params"] = params_json(p);
    degenerate["dev_by_entry"] = dev_table(ref, oracle);
    degenerate["max_abs_dev"] = (ref - oracle).cwiseAbs().maxCoeff();
    double off23 = 0.0;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        if (!(r == 1 && c == 2) && !(r == 2 && c == 1))
          off23 = std::max(off23, std::abs(ref(r, c) - oracle(r, c)));
    degenerate["max_abs_dev_outside_coherence_cross"] = off23;
    degenerate["coherence_cross_rescaled_dev"] =
        std::abs(ref(1, 2) * Complex(p.g + big_omega(p)) - oracle(1, 2));
  }

  rep["reference_superop"] = json{
      {"zero_pattern_max_abs", zero_pattern_max},
      {"column_sum_max_dev", colsum_max},
      {"max_abs_dev_by_entry", dev_table(SuperOp::Zero(), SuperOp::Zero())},
      {"per_point", per_point},
      {"degenerate_limit", degenerate},
      {"corrections",
       json{{"coherence_cross_scale",
             json{{"description",
                   "multiply the (1,2) entry by g+Omega; the tabulated form is "
                   "short by that factor"},
                  {"max_dev_after", fix_cross_scale_max}}},
            {"population_mixing_trig",
             json{{"description",
                   "the (0,3) and (3,3) entries oscillate at the coupling angle "
                   "g*dtm, not at Omega*dtm"},
                  {"max_dev_after", fix_pop_trig_max}}},
            {"coherence_diag_imag",
             json{{"description",
                   "the imaginary part of the (1,1) entry carries 2/Omega, not "
                   "2(Omega+2g)/(Omega(g+Omega))"},
                  {"max_dev_after", fix_coh_imag_max}}},
            {"all_corrected_max_dev", corrected_max}}}};
  {
    json rows = json::array();
    for (int r = 0; r < 4; ++r) {
      json row = json::array();
      for (int c = 0; c < 4; ++c) row.push_back(entry_max(r, c));
      rows.push_back(row);
    }
    rep["reference_superop"]["max_abs_dev_by_entry"] = rows;
  }

  rep["population_eigenvalue"] = json{
      {"exact_form", "cos^2(g*dtm) - (g^2/Omega^2) sin^2(Omega*dtm)"},
      {"max_dev_exact", pop_exact_max},
      {"max_dev_reference_linear_ratio", pop_linear_max},
      {"max_dev_reference_block", pop_block_max},
      {"closest", "exact_form"}};

  // Benchmark configuration: eigenvalues, refinement, eigenvectors, and the
  // tabulated measurement pair.
  json bench;
  bench["params"] = params_json(kBenchmarkParams);
  bench["detector"] = json::array({0.0, 0.0, 1.0});
  {
    const SuperOp ch = cycle_channel(kBenchmarkParams, ground);
    const SuperOp dual = cycle_channel_kron(kBenchmarkParams, ground);
    bench["dual_path_dev"] = (ch - dual).cwiseAbs().maxCoeff();

    const SpectralData sd = spectral_decompose(ch);
    json vals = json::array(), moduli = json::array(), devs = json::array();
    double max_mod_dev = 0.0;
    for (int j = 0; j < 4; ++j) {
      vals.push_back(cplx(sd.values[j]));
      const double m = std::abs(sd.values[j]);
      moduli.push_back(m);
      const double d = std::abs(m - kBenchmarkModuliRef[static_cast<size_t>(j)]);
      devs.push_back(d);
      max_mod_dev = std::max(max_mod_dev, d);
    }
    bench["eigenvalues"] = vals;
    bench["eigenvalue_moduli"] = moduli;
    bench["reference_moduli"] = kBenchmarkModuliRef;
    bench["moduli_dev"] = devs;
    bench["max_moduli_dev"] = max_mod_dev;

    const RefineResult rr =
        refine_unit_eigenvalue(kBenchmarkParams, ground, 0.01, 1e-12, 6000);
    bench["refinement"] = json{{"params", params_json(rr.params)},
                               {"min_gap", rr.min_gap},
                               {"evaluations", rr.evaluations},
                               {"reached_1e-8", rr.min_gap <= 1e-8}};

    // Eigenvectors at the refined configuration, matched to the tabulated
    // forms up to complex scale.
    const SuperOp rch = cycle_channel(rr.params, ground);
    const SpectralData rsd = spectral_decompose(rch);
    const int b = rsd.brouwer_index();
    int pop = -1, coh_unit = -1, coh_decay = -1;
    for (int j = 0; j < 4; ++j) {
      if (j == b) continue;
      const Op2& v = rsd.eigen_ops[j];
      const double dnorm = std::abs(v(0, 0)) + std::abs(v(1, 1));
      const double onorm = std::abs(v(0, 1)) + std::abs(v(1, 0));
      if (dnorm >= onorm) {
        pop = j;
      } else if (coh_unit < 0) {
        coh_unit = j;
      } else {
        coh_decay = j;
      }
    }
    // among the two coherence slots the larger modulus is the preserved one
    if (coh_unit >= 0 && coh_decay >= 0 &&
        std::abs(rsd.values[coh_decay]) > std::abs(rsd.values[coh_unit]))
      std::swap(coh_unit, coh_decay);

    json evecs;
    {
      const QubitState fp = brouwer_fixed_point(rch);
      const Bloch fb = fp.bloch();
      evecs["fixed_point"] =
          json{{"computed", op2_json(fp.matrix())},
               {"bloch", json::array({fb.x(), fb.y(), fb.z()})},
               {"trace_distance_to_maximally_mixed",
                trace_distance(fp, QubitState::maximally_mixed())}};
    }
    if (pop >= 0) {
      Op2 ref;
      ref << 1, 0, 0, -1;
      evecs["population"] = json{{"computed", op2_json(rsd.eigen_ops[pop])},
                                 {"reference", op2_json(ref)},
                                 {"scale_match_dev",
                                  scale_match_dev(rsd.eigen_ops[pop], ref)}};
    }
    if (coh_unit >= 0) {
      Op2 ref;
      ref << 0, Complex(0.42, -0.27), Complex(0.42, 0.27), 0;
      evecs["preserved_coherence"] =
          json{{"computed", op2_json(rsd.eigen_ops[coh_unit])},
               {"reference", op2_json(ref)},
               {"scale_match_dev", scale_match_dev(rsd.eigen_ops[coh_unit], ref)}};
    }
    if (coh_decay >= 0) {
      Op2 ref;
      ref << 0, Complex(0.27, 0.42), Complex(0.24, -0.42), 0;
      evecs["decaying_coherence"] =
          json{{"computed", op2_json(rsd.eigen_ops[coh_decay])},
               {"reference", op2_json(ref)},
               {"scale_match_dev", scale_match_dev(rsd.eigen_ops[coh_decay], ref)},
               // the tabulated pair has unequal moduli, a Hermitian eigenpair
               // of a Hermiticity-preserving map cannot; recorded as given
               {"reference_offdiag_moduli",
                json::array({std::hypot(0.27, 0.42), std::hypot(0.24, 0.42)})}};
    }
    bench["eigenvectors"] = evecs;
  }

  // Tabulated measurement pair: completeness, induced POVM axis, and the
  // channel the pair generates.
  {
    KrausSet ref;
    const Op2 base = kKrausRefA * Op2::Identity();
    const Op2 dev = kKrausRefB * sigma_x() + kKrausRefC * sigma_y();
    ref.ops.push_back(base + dev);
    ref.ops.push_back(base - dev);

    json kj;
    kj["completeness_dev"] = ref.completeness_dev();

    const PovmSet pv = povm_from_kraus(ref);
    const Op2& e0 = pv.elements[0];
    const Bloch axis(2.0 * e0(0, 1).real(), -2.0 * e0(0, 1).imag(),
                     e0(0, 0).real() - e0(1, 1).real());
    kj["povm_axis_computed"] = json::array({axis.x(), axis.y(), axis.z()});
    kj["povm_axis_reference"] =
        json::array({kPovmAxisRef.x(), kPovmAxisRef.y(), kPovmAxisRef.z()});
    kj["povm_axis_dev"] = (axis - kPovmAxisRef).cwiseAbs().maxCoeff();

    json mods = json::array();
    const SpectralData ksd = spectral_decompose(channel_from_kraus(ref));
    for (int j = 0; j < 4; ++j) mods.push_back(std::abs(ksd.values[j]));
    kj["reference_channel_eigen_moduli"] = mods;
    bench["kraus_reference"] = kj;
  }

  rep["benchmark"] = bench;
  return rep;
}

}  // namespace zenoq

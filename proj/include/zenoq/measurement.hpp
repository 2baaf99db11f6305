#pragma once
// Measurement-theoretic view of a channel: Choi matrix, canonical Kraus
// extraction, POVM elements, outcome probabilities, post-measurement states.

#include <vector>

#include "zenoq/model.hpp"
#include "zenoq/types.hpp"

namespace zenoq {

// Choi matrix C[(2i+k),(2j+l)] = Phi(E_ij)[k,l]; Hermitian for
// Hermiticity-preserving maps, trace 2 for trace-preserving ones.
Op4 choi_matrix(const SuperOp& s);

struct KrausSet {
  std::vector<Op2> ops;  // 1 to 4 operators

  // max-entry norm of sum K^dag K - I.
  double completeness_dev() const;
};

// Canonical Kraus set from the Choi eigendecomposition: eigenvalues kept
// while > rank_tol, descending order, each vector phase-fixed. Choi
// eigenvalues below -1e-6 raise ContractError (map is not CP); small
// negative ones are clipped.
KrausSet kraus_from_channel(const SuperOp& s, double rank_tol = 1e-10);

// Phi(rho) = sum_j K_j rho K_j^dag assembled in vec space; exact for exact
// inputs, completeness is not required.
SuperOp channel_from_kraus(const KrausSet& ks);

struct PovmSet {
  std::vector<Op2> elements;  // E_j = K_j^dag K_j, Hermitized
};

PovmSet povm_from_kraus(const KrausSet& ks);

// p_j = tr(E_j rho), as real numbers.
std::vector<double> outcome_probabilities(const PovmSet& ps,
                                          const QubitState& rho);

// K_j rho K_j^dag / p_j. Raises ContractError when p_j <= 1e-14.
QubitState post_measurement_state(const KrausSet& ks, int j,
                                  const QubitState& rho);

}  // namespace zenoq

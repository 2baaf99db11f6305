#pragma once
// Physical model: cycle parameters, qubit states, the joint Hamiltonian, the
// exact one-cycle channel (two independent constructions), the closed-form
// ground-detector superoperator as printed in the source material, and the
// infinite-frequency idealized channel.

#include "zenoq/qcore.hpp"
#include "zenoq/types.hpp"

namespace zenoq {

// Dimensionless cycle parameters; the target/detector level splitting omega
// is the unit of frequency throughout (omega == 1 internally).
struct ModelParams {
  double g = 0.0;    // coupling / omega
  double dtf = 0.0;  // omega * (free-evolution interval)
  double dtm = 0.0;  // omega * (measurement interval)
};

// Raises ContractError unless all fields are finite and nonnegative.
void validate(const ModelParams& p);

// Omega = sqrt(g^2 + 4): the coupled-sector precession frequency in
// omega-units. Computed on demand, never stored.
double big_omega(const ModelParams& p);

// 2x2 Hermitian, positive semidefinite, unit-trace density matrix with a
// Bloch-vector view. Constructors validate: trace within 1e-12 of 1,
// eigenvalues >= -1e-12, |bloch| <= 1 + 1e-10.
class QubitState {
 public:
  QubitState();  // maximally mixed

  static QubitState from_matrix(const Op2& m);
  static QubitState from_bloch(const Bloch& r);
  static QubitState ground();         // |0><0|, Bloch (0,0,1)
  static QubitState excited();        // |1><1|, Bloch (0,0,-1)
  static QubitState maximally_mixed();

  const Op2& matrix() const { return m_; }
  Bloch bloch() const;

 private:
  explicit QubitState(const Op2& m) : m_(m) {}
  Op2 m_;
};

// Trace distance ||a - b||_tr = sum of singular values of the difference.
double trace_distance(const QubitState& a, const QubitState& b);
double trace_norm2(const Op2& a);  // trace norm of an arbitrary 2x2

// H_M = g sx(x)sx + sz(x)I + I(x)sz (omega-units), target first.
Op4 joint_hamiltonian(const ModelParams& p);

// One cycle: free z-precession for dtf, then joint evolution under H_M for
// dtm with a fresh detector in rho_d, detector traced out. Built by pushing
// the four vec-basis operators through the map.
SuperOp cycle_channel(const ModelParams& p, const QubitState& rho_d);

// Same channel assembled algebraically: lift to the joint vec space, apply
// conj(U) (x) U factors, contract. Exists as an independent oracle; must
// agree with cycle_channel entrywise to 1e-12.
SuperOp cycle_channel_kron(const ModelParams& p, const QubitState& rho_d);

// The printed closed-form superoperator for ground-state detectors,
// transcribed verbatim (including its misprints; see reconcile). Exactly
// eight nonzero entries.
SuperOp analytic_superop(const ModelParams& p);

// Infinite-frequency limit: z-rotation by phi, then partial x-dephasing of
// strength theta (theta = g*dtm held fixed as dtm -> 0). Implemented directly
// as a Bloch map to avoid cancellation at large g.
SuperOp idealized_channel(double theta, double phi);

}  // namespace zenoq

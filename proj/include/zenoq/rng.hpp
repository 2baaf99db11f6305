#pragma once
// Deterministic random sources. All draws are mapped from mt19937_64 by hand
// so that streams are identical across standard libraries; distribution
// objects from <random> do not guarantee that.

#include <cstdint>
#include <random>

#include "zenoq/types.hpp"

namespace zenoq {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller (explicit formula, no library state).
  double normal();

  Complex cnormal();

  // Gaussian-entried matrices, Hermitized. Typical entry scale is O(1).
  Op2 herm2();
  Op4 herm4();

  // Uniform direction on the unit sphere.
  Bloch direction();

  // Uniform point in the closed unit ball.
  Bloch ball();

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace zenoq

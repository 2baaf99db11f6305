#include "zenoq/rng.hpp"

#include <cmath>

namespace zenoq {

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller; u is kept away from 0 so the log is finite.
  double u = 0.0;
  do {
    u = uniform();
  } while (u <= 0.0);
  const double v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  spare_ = r * std::sin(2.0 * M_PI * v);
  have_spare_ = true;
  return r * std::cos(2.0 * M_PI * v);
}

Complex Rng::cnormal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im);
}

Op2 Rng::herm2() {
  Op2 a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = cnormal();
  return 0.5 * (a + a.adjoint()).eval();
}

Op4 Rng::herm4() {
  Op4 a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = cnormal();
  return 0.5 * (a + a.adjoint()).eval();
}

Bloch Rng::direction() {
  // Normalized Gaussian triple; the degenerate draw is retried.
  while (true) {
    const Bloch v(normal(), normal(), normal());
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

Bloch Rng::ball() { return std::cbrt(uniform()) * direction(); }

}  // namespace zenoq

#pragma once
// Reconciliation report: the tabulated reference values kept in this library
// (closed-form superoperator entries, eigenvalue formulas, benchmark
// eigenpairs, measurement-operator constants) compared against the
// brute-force channel, with per-entry deviations and the corrections that
// close them. Deviations are findings; the channel's dual-path
// self-agreement is the correctness gate.

#include <array>
#include <cstdint>

#include <json.hpp>

#include "zenoq/model.hpp"

namespace zenoq {

// Benchmark configuration: a coupling/window choice with a second eigenvalue
// of nearly unit modulus, used throughout tests and reports.
inline constexpr ModelParams kBenchmarkParams{0.865, 15.13, 14.96};

// Tabulated eigenvalue moduli at the benchmark, sorted descending.
inline constexpr std::array<double, 4> kBenchmarkModuliRef{1.0, 1.0, 0.73, 0.73};

// Tabulated measurement-operator pair at the benchmark: a*I +/- b*sx +/- c*sy.
inline constexpr Complex kKrausRefA{0.36, 0.55};
inline constexpr double kKrausRefB = 0.22;
inline constexpr double kKrausRefC = 0.14;

// Tabulated measurement axis of the induced two-outcome POVM.
inline const Bloch kPovmAxisRef(0.32, 0.20, 0.0);

nlohmann::json reconcile_report(int n_random_points = 100,
                                std::uint64_t seed = 42);

}  // namespace zenoq

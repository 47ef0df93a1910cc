#pragma once

// Per-unit global phases for the three protocols, and the normalized
// random-walk statistic Z = (1/M) * sum_m exp(-i Phi_m) that multiplies the
// accumulated first-order pulse error.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace ddsim {

enum class ProtocolKind { standard, randomized, correlated };

struct PhaseProtocol {
  ProtocolKind kind = ProtocolKind::standard;
  int elimination_size = 0;  // G, correlated only; requires 1 < G <= M
  std::uint64_t seed = 0;
};

const char* protocol_name(ProtocolKind kind);

// M phases, one per repetition of the basic unit:
//   standard   -> all zeros;
//   randomized -> independent uniforms on [0, 2*pi);
//   correlated -> consecutive groups of G phases, each a uniformly rotated,
//                 uniformly permuted copy of the G-th roots-of-unity angles,
//                 so each complete group's phase factors sum to zero exactly.
//                 A trailing partial group (M mod G != 0) cannot satisfy the
//                 constraint and is filled with independent uniforms.
// Pure in (protocol, repetitions): same inputs give the same list everywhere.
std::vector<double> generate_phases(const PhaseProtocol& protocol,
                                    int repetitions);

// (1/M) * sum_m exp(-i phases[m]); throws on an empty list.
std::complex<double> z_statistic(std::span<const double> phases);

}  // namespace ddsim

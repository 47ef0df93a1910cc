#pragma once

namespace ddsim::constants {

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

// Gyromagnetic ratios over 2*pi, in Hz per gauss. Standard NMR table values
// (CODATA-derived); negative-gamma species are entered with their magnitude,
// the Larmor sign convention is applied in free_hamiltonian().
inline constexpr double gamma_1h_hz_per_gauss = 4257.6;
inline constexpr double gamma_13c_hz_per_gauss = 1070.5;

// All Hamiltonian entries are angular frequencies (rad/s), all times seconds.
inline constexpr double angular(double frequency_hz) { return two_pi * frequency_hz; }

}  // namespace ddsim::constants

#pragma once

// Exact propagation of a spin qubit, optionally coupled to nuclear spins,
// through a pulse-sequence program with finite-width, error-afflicted pulses.
//
// Model: qubit reduced to two levels; each nuclear spin n carries a Larmor
// term omega_n I_z (omega_n = -gamma_n * B) and a pure-dephasing hyperfine
// coupling (1/2) sigma_z (x) (a_perp I_x + a_par I_z), with I = sigma/2 on
// the nuclear factor. Nuclear terms stay active during finite-width pulses,
// which is what produces spurious harmonic response.

#include <cstdint>
#include <string>
#include <vector>

#include "ddsim/sequence.hpp"
#include "ddsim/smallmat.hpp"

namespace ddsim {

struct ControlError {
  double detuning = 0.0;    // Delta, rad/s, applied as (Delta/2) sigma_z
  double rabi_scale = 1.0;  // multiplies the nominal Rabi frequency; > 0
};

struct NuclearSpin {
  std::string label;
  double a_perp = 0.0;  // rad/s; >= 0 (sign is a transverse-axis gauge choice)
  double a_par = 0.0;   // rad/s
  double gamma = 0.0;   // rad/(s*gauss)
};

// label must be "1H" or "13C" for a table lookup; couplings are ordinary
// frequencies in Hz here, converted to angular internally
NuclearSpin make_nucleus(const std::string& label, double a_perp_hz,
                         double a_par_hz);
NuclearSpin make_nucleus(const std::string& label, double a_perp_hz,
                         double a_par_hz, double gamma_hz_per_gauss);

struct SpinSystem {
  std::vector<NuclearSpin> nuclei;
  double b_field = 0.0;  // gauss

  int n_nuclei() const { return static_cast<int>(nuclei.size()); }
  int nuclear_dim() const { return 1 << n_nuclei(); }
  int dim() const { return 2 * nuclear_dim(); }
};

inline constexpr int max_hilbert_dim = 32;

// Static Hamiltonian (rad/s): Larmor plus hyperfine terms; zero matrix for a
// bare qubit. Throws if the Hilbert dimension exceeds the cap.
ComplexMatrix free_hamiltonian(const SpinSystem& system);

// Propagator of one finite-width rectangular pulse: the control term
// (1/2)(rabi_scale*omega)[sigma_x cos(phi) + sigma_y sin(phi)]
//   + (1/2) detuning * sigma_z
// acts on the qubit while the free Hamiltonian keeps running. Requires
// event.duration > 0 (use instantaneous_pulse for ideal pulses).
ComplexMatrix pulse_propagator(const SpinSystem& system,
                               const ControlError& err, double omega_nominal,
                               const PulseEvent& event);

// Ideal pi rotation about the axis (cos phi, sin phi, 0), identity on the
// nuclear factor.
ComplexMatrix instantaneous_pulse(const SpinSystem& system, double phi);

// Propagator of one unit with all pulse phases shifted by extra_phase; free
// evolution fills the gaps. Throws if pulses overlap (negative gap).
ComplexMatrix unit_propagator(const SpinSystem& system, const PulseUnit& unit,
                              const ControlError& err, double omega_nominal,
                              double extra_phase = 0.0);

// Error-free reference: instantaneous pi pulses at the event centers, free
// evolution everywhere else. Limit of unit_propagator as the pulse duration
// shrinks at fixed centers and vanishing control error.
ComplexMatrix ideal_unit_propagator(const SpinSystem& system,
                                    const PulseUnit& unit);

// Time-ordered product over all M repetitions, unit m shifted by
// program.unit_phases[m].
ComplexMatrix sequence_propagator(const SpinSystem& system,
                                  const SequenceProgram& program,
                                  const ControlError& err,
                                  double omega_nominal);

// diag(e^{-i phi/2}, e^{+i phi/2}) on the qubit factor, identity on the rest:
// returns Rz(phi) * u * Rz(phi)^dagger. Conjugating a unit propagator by
// Rz(phi) equals shifting every pulse phase in the unit by phi, because the
// free Hamiltonian commutes with sigma_z on the qubit.
ComplexMatrix qubit_phase_conjugate(const ComplexMatrix& u, double phi);

// Pi_m Rz(phases[m]) u_unit Rz(phases[m])^dagger, applied in sequence order.
// Fast equivalent of sequence_propagator for a precomputed base unit.
ComplexMatrix repeat_with_phases(const ComplexMatrix& u_unit,
                                 std::span<const double> phases);

// <+x| Tr_nuc[ U (|+x><+x| (x) 1/2^n) U^dagger ] |+x> for a given propagator.
double population_signal(const SpinSystem& system, const ComplexMatrix& u);

// Averaged population signal of the full program, nuclear bath maximally
// mixed, sensor initialized and read out along +x.
double sensing_signal(const SpinSystem& system, const SequenceProgram& program,
                      const ControlError& err, double omega_nominal);

}  // namespace ddsim

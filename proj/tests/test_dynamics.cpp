#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ddsim/constants.hpp"
#include "ddsim/dynamics.hpp"
#include "ddsim/phases.hpp"
#include "ddsim/rng.hpp"
#include "ddsim/sequence.hpp"
#include "ddsim/smallmat.hpp"
#include "helpers.hpp"

using namespace ddsim;
using ddsim::testing::contains;
using ddsim::testing::thrown;
using constants::angular;
using constants::pi;

namespace {

const cxd im(0.0, 1.0);

SpinSystem proton_system() {
  SpinSystem s;
  s.b_field = 400.0;
  s.nuclei.push_back(make_nucleus("1H", 2e3, 4e3));
  return s;
}

std::vector<double> random_angles(int n, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<double> out(n);
  for (double& p : out) p = rng.uniform_angle();
  return out;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("a resonant pulse of nominal length is a pi rotation") {
  const SpinSystem bare;
  const double omega = angular(20e6);
  const double dur = pi / omega;
  const ControlError clean;
  const ComplexMatrix ux =
      pulse_propagator(bare, clean, omega, PulseEvent{0.0, dur, 0.0});
  CHECK(max_abs_diff(ux, -im * pauli_x()) < 1e-10);
  const ComplexMatrix uy =
      pulse_propagator(bare, clean, omega, PulseEvent{0.0, dur, pi / 2});
  CHECK(max_abs_diff(uy, -im * pauli_y()) < 1e-10);
  CHECK(max_abs_diff(instantaneous_pulse(bare, 0.0), -im * pauli_x()) <
        1e-15);
}

TEST_CASE("propagators stay unitary with nuclei and control errors") {
  const SpinSystem sys = proton_system();
  ControlError err;
  err.detuning = angular(2e6);
  err.rabi_scale = 1.13;
  const double omega = angular(20e6);
  const PulseUnit unit = build_unit(UnitKind::xy8, 8, 215e-9, 15e-9);
  CHECK(is_unitary(unit_propagator(sys, unit, err, omega), 1e-10));
  CHECK(is_unitary(ideal_unit_propagator(sys, unit), 1e-10));
  CHECK(is_unitary(
      pulse_propagator(sys, err, omega, PulseEvent{0.0, 15e-9, 1.0}),
      1e-10));
}

TEST_CASE("an uncoupled nucleus factors out of the propagator") {
  SpinSystem sys;
  sys.b_field = 400.0;
  sys.nuclei.push_back(make_nucleus("1H", 0.0, 0.0));

  ControlError err;
  err.detuning = angular(1e6);
  const double omega = angular(20e6);
  const PulseUnit unit = build_unit(UnitKind::xy8, 8, 215e-9, 15e-9);

  const ComplexMatrix full = unit_propagator(sys, unit, err, omega);
  const ComplexMatrix qubit =
      unit_propagator(SpinSystem{}, unit, err, omega);
  const double larmor = -sys.nuclei[0].gamma * sys.b_field;
  const ComplexMatrix nuc =
      hermitian_expm(0.5 * larmor * pauli_z(), unit.total_duration);
  CHECK(max_abs_diff(full, kron(qubit, nuc)) < 1e-12);
}

TEST_CASE("finite pulses converge to the instantaneous limit") {
  const SpinSystem sys = proton_system();
  const double tau = 1e-6;
  const ControlError clean;
  const PulseUnit reference = build_unit(UnitKind::xy8, 8, tau, 0.0);
  const ComplexMatrix ideal = ideal_unit_propagator(sys, reference);

  double previous = -1.0;
  for (double dur : {1e-7, 1e-8, 1e-9}) {
    const PulseUnit unit = build_unit(UnitKind::xy8, 8, tau, dur);
    const ComplexMatrix u = unit_propagator(sys, unit, clean, pi / dur);
    const double dev = max_abs_diff(u, ideal);
    if (previous > 0.0) CHECK(dev < 0.2 * previous);  // first order in width
    previous = dev;
  }
  CHECK(previous < 1e-5);
}

TEST_CASE("zero-width events inside a unit use the ideal pulse") {
  const SpinSystem sys = proton_system();
  const PulseUnit unit = build_unit(UnitKind::xy8, 8, 1e-6, 0.0);
  const ComplexMatrix via_unit =
      unit_propagator(sys, unit, ControlError{}, angular(20e6));
  const ComplexMatrix via_ideal = ideal_unit_propagator(sys, unit);
  CHECK(max_abs_diff(via_unit, via_ideal) < 1e-12);
}

TEST_CASE("a centered pi pulse refocuses pure dephasing") {
  // a_perp = 0 leaves only sigma_z-type coupling, which one echo cancels
  SpinSystem sys;
  sys.b_field = 400.0;
  sys.nuclei.push_back(make_nucleus("1H", 0.0, 50e3));

  const std::vector<double> x_only = {0.0};
  const PulseUnit unit =
      build_unit(UnitKind::custom, 1, 2e-6, 0.0, x_only);
  const SequenceProgram program = assemble(unit, 1, {0.0});
  const double signal =
      sensing_signal(sys, program, ControlError{}, angular(20e6));
  CHECK(std::abs(signal - 1.0) < 1e-12);

  // repeated cp with any unit phases keeps refocusing it
  const PulseUnit cp = build_unit(UnitKind::cp, 2, 2e-6, 0.0);
  const SequenceProgram many = assemble(cp, 4, random_angles(4, 9));
  CHECK(std::abs(sensing_signal(sys, many, ControlError{}, angular(20e6)) -
                 1.0) < 1e-12);
}

TEST_CASE("error-free xy8 acts as the identity on a bare qubit") {
  const SpinSystem bare;
  const PulseUnit unit = build_unit(UnitKind::xy8, 8, 215e-9, 15e-9);
  const ComplexMatrix u0 =
      unit_propagator(bare, unit, ControlError{}, pi / 15e-9);
  for (int m : {1, 6, 24}) {
    const ComplexMatrix u = repeat_with_phases(u0, random_angles(m, 31 + m));
    CHECK(std::abs(survival_probability(u, QuantumState::plus_x()) - 1.0) <
          1e-12);
  }
}

TEST_CASE("phase conjugation equals shifting every pulse phase") {
  const SpinSystem sys = proton_system();
  ControlError err;
  err.detuning = angular(0.5e6);
  err.rabi_scale = 1.05;
  const double omega = pi / 15e-9;
  const PulseUnit unit = build_unit(UnitKind::xy8, 8, 215e-9, 15e-9);
  const double phi = 2.1;
  const ComplexMatrix shifted =
      unit_propagator(sys, shift_unit_phase(unit, phi), err, omega);
  const ComplexMatrix conjugated =
      qubit_phase_conjugate(unit_propagator(sys, unit, err, omega), phi);
  CHECK(max_abs_diff(shifted, conjugated) < 1e-11);
}

TEST_CASE("repeated conjugation matches the brute-force program") {
  const SpinSystem sys = proton_system();
  ControlError err;
  err.detuning = angular(1e6);
  err.rabi_scale = 0.9;
  const double omega = pi / 15e-9;
  const PulseUnit unit = build_unit(UnitKind::xy8, 8, 215e-9, 15e-9);
  const auto phases = random_angles(5, 123);

  const ComplexMatrix fast = repeat_with_phases(
      unit_propagator(sys, unit, err, omega), phases);
  const ComplexMatrix brute = sequence_propagator(
      sys, assemble(unit, 5, phases), err, omega);
  CHECK(max_abs_diff(fast, brute) < 1e-10);
}

TEST_CASE("species table and input validation") {
  const NuclearSpin h = make_nucleus("1H", 2e3, 4e3);
  CHECK(h.gamma == doctest::Approx(angular(4257.6)).epsilon(1e-15));
  CHECK(h.a_perp == doctest::Approx(angular(2e3)).epsilon(1e-15));
  const NuclearSpin c = make_nucleus("13C", 10e3, 200e3);
  CHECK(c.gamma == doctest::Approx(angular(1070.5)).epsilon(1e-15));
  const NuclearSpin x = make_nucleus("19F", 1e3, 1e3, 4005.2);
  CHECK(x.gamma == doctest::Approx(angular(4005.2)).epsilon(1e-15));
  CHECK(contains(thrown([] { make_nucleus("19F", 1e3, 1e3); }),
                 "unknown species"));
  CHECK_THROWS_AS(make_nucleus("1H", -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("free hamiltonian has the dephasing block structure") {
  SpinSystem sys;
  sys.b_field = 100.0;
  sys.nuclei.push_back(make_nucleus("1H", 6e3, 10e3));
  const ComplexMatrix h = free_hamiltonian(sys);
  REQUIRE(h.rows() == 4);
  CHECK(is_hermitian(h, 1e-12));

  const double larmor = -angular(4257.6) * 100.0;
  const double a_perp = angular(6e3);
  const double a_par = angular(10e3);
  // qubit-diagonal blocks: (larmor +- a_par/2) I_z +- (a_perp/2) I_x
  CHECK(h(0, 0).real() ==
        doctest::Approx(0.5 * (larmor + 0.5 * a_par)).epsilon(1e-12));
  CHECK(h(2, 2).real() ==
        doctest::Approx(0.5 * (larmor - 0.5 * a_par)).epsilon(1e-12));
  CHECK(h(0, 1).real() == doctest::Approx(0.25 * a_perp).epsilon(1e-12));
  CHECK(h(2, 3).real() == doctest::Approx(-0.25 * a_perp).epsilon(1e-12));
  // no qubit flips anywhere
  CHECK(std::abs(h(0, 2)) == 0.0);
  CHECK(std::abs(h(1, 3)) == 0.0);
  // a bare qubit idles
  CHECK(max_abs(free_hamiltonian(SpinSystem{})) == 0.0);
}

TEST_CASE("hilbert space is capped") {
  SpinSystem sys;
  sys.b_field = 400.0;
  for (int n = 0; n < 5; ++n)
    sys.nuclei.push_back(make_nucleus("1H", 1e3, 1e3));
  CHECK(contains(thrown([&] { free_hamiltonian(sys); }), "cap"));
}

TEST_CASE("dimension mismatches are rejected") {
  const SpinSystem sys = proton_system();
  CHECK_THROWS_AS(population_signal(sys, identity(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(pulse_propagator(sys, ControlError{}, angular(20e6),
                                   PulseEvent{0.0, 0.0, 0.0}),
                  std::invalid_argument);
  ControlError bad;
  bad.rabi_scale = 0.0;
  CHECK_THROWS_AS(pulse_propagator(sys, bad, angular(20e6),
                                   PulseEvent{0.0, 1e-8, 0.0}),
                  std::invalid_argument);
}

}  // TEST_SUITE

#include "ddsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include "ddsim/constants.hpp"

namespace ddsim {

using constants::angular;
using constants::pi;

NuclearSpin make_nucleus(const std::string& label, double a_perp_hz,
                         double a_par_hz) {
  double gamma_hz_per_gauss = 0.0;
  if (label == "1H") {
    gamma_hz_per_gauss = constants::gamma_1h_hz_per_gauss;
  } else if (label == "13C") {
    gamma_hz_per_gauss = constants::gamma_13c_hz_per_gauss;
  } else {
    throw std::invalid_argument("make_nucleus: unknown species '" + label +
                                "', pass its gyromagnetic ratio explicitly");
  }
  return make_nucleus(label, a_perp_hz, a_par_hz, gamma_hz_per_gauss);
}

NuclearSpin make_nucleus(const std::string& label, double a_perp_hz,
                         double a_par_hz, double gamma_hz_per_gauss) {
  if (a_perp_hz < 0)
    throw std::invalid_argument(
        "make_nucleus: a_perp must be >= 0 (its sign is a gauge choice)");
  return NuclearSpin{label, angular(a_perp_hz), angular(a_par_hz),
                     angular(gamma_hz_per_gauss)};
}

namespace {

void check_dim_cap(const SpinSystem& system, const char* where) {
  if (system.dim() > max_hilbert_dim)
    throw std::invalid_argument(std::string(where) +
                                ": Hilbert dimension exceeds the cap of " +
                                std::to_string(max_hilbert_dim));
}

// sigma_x cos(phi) + sigma_y sin(phi)
ComplexMatrix equatorial_pauli(double phi) {
  return std::cos(phi) * pauli_x() + std::sin(phi) * pauli_y();
}

// operator acting on nuclear factor `index` alone, embedded in the full
// nuclear space (first factor slowest)
ComplexMatrix embed_nuclear(const SpinSystem& system, int index,
                            const ComplexMatrix& op) {
  ComplexMatrix out = identity(1 << index);
  out = kron(out, op);
  const int rest = system.n_nuclei() - index - 1;
  if (rest > 0) out = kron(out, identity(1 << rest));
  return out;
}

// control term of one pulse on the full Hilbert space
ComplexMatrix control_hamiltonian(const SpinSystem& system,
                                  const ControlError& err, double omega_nominal,
                                  double phi) {
  ComplexMatrix hq = 0.5 * err.rabi_scale * omega_nominal *
                         equatorial_pauli(phi) +
                     0.5 * err.detuning * pauli_z();
  if (system.n_nuclei() == 0) return hq;
  return kron(hq, identity(system.nuclear_dim()));
}

// exp(-i h_free t) through a cached eigendecomposition of the static
// Hamiltonian; the zero Hamiltonian short-circuits to the identity
class FreeEvolver {
 public:
  explicit FreeEvolver(const SpinSystem& system)
      : dim_(system.dim()), hamiltonian_(free_hamiltonian(system)) {
    trivial_ = max_abs(hamiltonian_) == 0.0;
    if (!trivial_) {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hamiltonian_);
      if (solver.info() != Eigen::Success)
        throw std::runtime_error("free evolution: eigendecomposition failed");
      eigenvalues_ = solver.eigenvalues();
      eigenvectors_ = solver.eigenvectors();
    }
  }

  const ComplexMatrix& hamiltonian() const { return hamiltonian_; }

  ComplexMatrix at(double t) const {
    if (trivial_ || t == 0.0) return identity(dim_);
    Eigen::VectorXcd phases(eigenvalues_.size());
    for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
      const double theta = -eigenvalues_[k] * t;
      phases[k] = cxd(std::cos(theta), std::sin(theta));
    }
    return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
  }

 private:
  int dim_;
  ComplexMatrix hamiltonian_;
  bool trivial_ = true;
  Eigen::VectorXd eigenvalues_;
  ComplexMatrix eigenvectors_;
};

struct PropagatorKey {
  double phase;
  double duration;
  bool operator<(const PropagatorKey& o) const {
    if (phase != o.phase) return phase < o.phase;
    return duration < o.duration;
  }
};

ComplexMatrix unit_propagator_impl(const SpinSystem& system,
                                   const FreeEvolver& free,
                                   const PulseUnit& unit,
                                   const ControlError& err,
                                   double omega_nominal, double extra_phase,
                                   std::map<PropagatorKey, ComplexMatrix>& cache,
                                   std::map<double, ComplexMatrix>& gap_cache) {
  const double gap_tol = 1e-9 * std::max(unit.total_duration, 1e-30);
  ComplexMatrix u = identity(system.dim());
  double t = 0.0;
  for (const auto& ev : unit.events) {
    const double gap = ev.start - t;
    if (gap < -gap_tol)
      throw std::invalid_argument(
          "unit_propagator: overlapping pulses (negative gap)");
    if (gap > gap_tol) {
      auto it = gap_cache.find(gap);
      if (it == gap_cache.end())
        it = gap_cache.emplace(gap, free.at(gap)).first;
      u = it->second * u;
    }
    const double phi = wrap_angle(ev.phase + extra_phase);
    const PropagatorKey key{phi, ev.duration};
    auto it = cache.find(key);
    if (it == cache.end()) {
      ComplexMatrix up =
          ev.duration == 0.0
              ? instantaneous_pulse(system, phi)
              : pulse_propagator(system, err, omega_nominal,
                                 PulseEvent{ev.start, ev.duration, phi});
      it = cache.emplace(key, std::move(up)).first;
    }
    u = it->second * u;
    t = ev.end();
  }
  const double tail = unit.total_duration - t;
  if (tail < -gap_tol)
    throw std::invalid_argument(
        "unit_propagator: last pulse ends after the unit duration");
  if (tail > gap_tol) {
    auto it = gap_cache.find(tail);
    if (it == gap_cache.end())
      it = gap_cache.emplace(tail, free.at(tail)).first;
    u = it->second * u;
  }
  return u;
}

}  // namespace

ComplexMatrix free_hamiltonian(const SpinSystem& system) {
  check_dim_cap(system, "free_hamiltonian");
  ComplexMatrix h = ComplexMatrix::Zero(system.dim(), system.dim());
  if (system.n_nuclei() == 0) return h;

  const ComplexMatrix iq = identity(2);
  for (int n = 0; n < system.n_nuclei(); ++n) {
    const auto& spin = system.nuclei[n];
    const double larmor = -spin.gamma * system.b_field;  // rad/s
    const ComplexMatrix iz = embed_nuclear(system, n, 0.5 * pauli_z());
    const ComplexMatrix ix = embed_nuclear(system, n, 0.5 * pauli_x());
    h += kron(iq, larmor * iz);
    h += kron(0.5 * pauli_z(), spin.a_perp * ix + spin.a_par * iz);
  }
  return h;
}

ComplexMatrix pulse_propagator(const SpinSystem& system,
                               const ControlError& err, double omega_nominal,
                               const PulseEvent& event) {
  check_dim_cap(system, "pulse_propagator");
  if (!(event.duration > 0))
    throw std::invalid_argument(
        "pulse_propagator: zero-duration event, use instantaneous_pulse");
  if (!(err.rabi_scale > 0))
    throw std::invalid_argument("pulse_propagator: rabi_scale must be > 0");
  const ComplexMatrix h =
      free_hamiltonian(system) +
      control_hamiltonian(system, err, omega_nominal, event.phase);
  return hermitian_expm(h, event.duration);
}

ComplexMatrix instantaneous_pulse(const SpinSystem& system, double phi) {
  check_dim_cap(system, "instantaneous_pulse");
  // exp(-i (pi/2) sigma_phi) = -i sigma_phi
  const ComplexMatrix rot = cxd(0, -1) * equatorial_pauli(phi);
  if (system.n_nuclei() == 0) return rot;
  return kron(rot, identity(system.nuclear_dim()));
}

ComplexMatrix unit_propagator(const SpinSystem& system, const PulseUnit& unit,
                              const ControlError& err, double omega_nominal,
                              double extra_phase) {
  const FreeEvolver free(system);
  std::map<PropagatorKey, ComplexMatrix> cache;
  std::map<double, ComplexMatrix> gap_cache;
  return unit_propagator_impl(system, free, unit, err, omega_nominal,
                              extra_phase, cache, gap_cache);
}

ComplexMatrix ideal_unit_propagator(const SpinSystem& system,
                                    const PulseUnit& unit) {
  check_dim_cap(system, "ideal_unit_propagator");
  const FreeEvolver free(system);
  std::map<double, ComplexMatrix> gap_cache;
  const double gap_tol = 1e-9 * std::max(unit.total_duration, 1e-30);
  ComplexMatrix u = identity(system.dim());
  double t = 0.0;
  for (const auto& ev : unit.events) {
    const double gap = ev.center() - t;
    if (gap < -gap_tol)
      throw std::invalid_argument(
          "ideal_unit_propagator: pulse centers out of order");
    if (gap > gap_tol) {
      auto it = gap_cache.find(gap);
      if (it == gap_cache.end())
        it = gap_cache.emplace(gap, free.at(gap)).first;
      u = it->second * u;
    }
    u = instantaneous_pulse(system, ev.phase) * u;
    t = ev.center();
  }
  const double tail = unit.total_duration - t;
  if (tail < -gap_tol)
    throw std::invalid_argument(
        "ideal_unit_propagator: last center lies after the unit duration");
  if (tail > gap_tol) {
    auto it = gap_cache.find(tail);
    if (it == gap_cache.end())
      it = gap_cache.emplace(tail, free.at(tail)).first;
    u = it->second * u;
  }
  return u;
}

ComplexMatrix sequence_propagator(const SpinSystem& system,
                                  const SequenceProgram& program,
                                  const ControlError& err,
                                  double omega_nominal) {
  if (static_cast<int>(program.unit_phases.size()) != program.repetitions)
    throw std::invalid_argument(
        "sequence_propagator: unit phase list length must equal repetitions");
  const FreeEvolver free(system);
  std::map<PropagatorKey, ComplexMatrix> cache;
  std::map<double, ComplexMatrix> gap_cache;
  ComplexMatrix u = identity(system.dim());
  for (int m = 0; m < program.repetitions; ++m) {
    u = unit_propagator_impl(system, free, program.unit, err, omega_nominal,
                             program.unit_phases[m], cache, gap_cache) *
        u;
  }
  return u;
}

ComplexMatrix qubit_phase_conjugate(const ComplexMatrix& u, double phi) {
  const Eigen::Index dim = u.rows();
  const Eigen::Index half = dim / 2;
  const cxd lower(std::cos(phi / 2), -std::sin(phi / 2));   // e^{-i phi/2}
  const cxd raise = std::conj(lower);
  Eigen::VectorXcd d(dim);
  d.head(half).setConstant(lower);
  d.tail(half).setConstant(raise);
  return d.asDiagonal() * u * d.conjugate().asDiagonal();
}

ComplexMatrix repeat_with_phases(const ComplexMatrix& u_unit,
                                 std::span<const double> phases) {
  ComplexMatrix u = identity(static_cast<int>(u_unit.rows()));
  for (double phi : phases) u = qubit_phase_conjugate(u_unit, phi) * u;
  return u;
}

double population_signal(const SpinSystem& system, const ComplexMatrix& u) {
  const int dn = system.nuclear_dim();
  if (u.rows() != system.dim() || u.cols() != system.dim())
    throw std::invalid_argument("population_signal: dimension mismatch");
  // A = (<+x| (x) 1) U (|+x> (x) 1); signal = ||A||_F^2 / 2^n, which equals
  // the average over initial nuclear basis states, summed over final ones
  const ComplexMatrix a = 0.5 * (u.topLeftCorner(dn, dn) +
                                 u.topRightCorner(dn, dn) +
                                 u.bottomLeftCorner(dn, dn) +
                                 u.bottomRightCorner(dn, dn));
  const double p = a.squaredNorm() / dn;
  return std::clamp(p, 0.0, 1.0);
}

double sensing_signal(const SpinSystem& system, const SequenceProgram& program,
                      const ControlError& err, double omega_nominal) {
  check_dim_cap(system, "sensing_signal");
  return population_signal(system,
                           sequence_propagator(system, program, err,
                                               omega_nominal));
}

}  // namespace ddsim

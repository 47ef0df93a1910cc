#pragma once

// First-order pulse-error machinery: extract (alpha, beta, epsilon) from a
// single-pulse propagator, estimate the unit error constant C, and predict
// the whole-sequence off-diagonal error for any phase list.
//
// A general 2x2 pi-pulse propagator has the form
//   [ e^{-i alpha} sin(eps)          i e^{-i(beta+phi)} cos(eps) ]
//   [ i e^{+i(beta+phi)} cos(eps)    e^{+i alpha} sin(eps)       ]
// and, to first order in eps, an even-N unit propagates as
//   [ 1, i C eps; i C* eps, 1 ] with C -> C e^{-i Phi} under a global
// phase shift Phi of all pulses in the unit.

#include <complex>
#include <span>

#include "ddsim/dynamics.hpp"
#include "ddsim/smallmat.hpp"

namespace ddsim {

struct PulseParams {
  double alpha = 0.0;    // radians
  double beta = 0.0;     // radians
  double epsilon = 0.0;  // dimensionless flip-angle error, in [0, pi/2]
  double residual = 0.0; // max-norm misfit of the reconstruction
};

// Branch choices: args in (-pi, pi], epsilon = asin(|u00|) >= 0.
// Throws if u is not 2x2 unitary within 1e-10.
PulseParams extract_pulse_params(const ComplexMatrix& u, double phi);

// The general pi-pulse matrix for the given parameters and pulse phase.
ComplexMatrix pulse_matrix(const PulseParams& params, double phi);

struct UnitErrorConstant {
  std::complex<double> c = 0.0;
  double epsilon = 0.0;   // per-pulse error the estimate was taken at
  bool degenerate = false;  // no pulse error: |c| reported as 0
};

// Numeric estimate C = U01 / (i * eps) from the qubit-only unit propagator,
// with eps taken from a single pulse of the same realization. Valid to
// O(eps); degenerate when eps vanishes (ideal pulses).
UnitErrorConstant unit_error_constant(const PulseUnit& unit,
                                      const ControlError& err,
                                      double omega_nominal);

// Predicted upper-right entry of the M-unit propagator to first order:
// i * Z(phases) * M * c * eps  with  Z = (1/M) sum_m e^{-i Phi_m}.
std::complex<double> predict_sequence_offdiag(const UnitErrorConstant& c,
                                              double epsilon,
                                              std::span<const double> phases);

}  // namespace ddsim

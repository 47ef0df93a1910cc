#include "ddsim/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "ddsim/constants.hpp"

namespace ddsim {

using constants::pi;

namespace {

double wrap_pi(double x) {
  // to (-pi, pi]
  double w = std::fmod(x + pi, 2 * pi);
  if (w <= 0) w += 2 * pi;
  return w - pi;
}

}  // namespace

PulseParams extract_pulse_params(const ComplexMatrix& u, double phi) {
  if (u.rows() != 2 || u.cols() != 2)
    throw std::invalid_argument("extract_pulse_params: expected a 2x2 matrix");
  if (!is_unitary(u, 1e-10))
    throw std::invalid_argument("extract_pulse_params: input is not unitary");

  const cxd u00 = u(0, 0);
  const cxd u10 = u(1, 0);

  PulseParams p;
  p.epsilon = std::asin(std::min(std::abs(u00), 1.0));
  p.alpha = std::abs(u00) > 0 ? -std::arg(u00) : 0.0;
  const cxd w = u10 / cxd(0, 1);
  p.beta = std::abs(w) > 0 ? wrap_pi(std::arg(w) - phi) : 0.0;
  p.residual = max_abs_diff(u, pulse_matrix(p, phi));
  return p;
}

ComplexMatrix pulse_matrix(const PulseParams& params, double phi) {
  const double s = std::sin(params.epsilon);
  const double c = std::cos(params.epsilon);
  const cxd ea(std::cos(params.alpha), std::sin(params.alpha));
  const cxd eb(std::cos(params.beta + phi), std::sin(params.beta + phi));
  ComplexMatrix u(2, 2);
  u << std::conj(ea) * s, cxd(0, 1) * std::conj(eb) * c,
       cxd(0, 1) * eb * c, ea * s;
  return u;
}

UnitErrorConstant unit_error_constant(const PulseUnit& unit,
                                      const ControlError& err,
                                      double omega_nominal) {
  if (unit.events.empty())
    throw std::invalid_argument("unit_error_constant: unit has no pulses");

  const SpinSystem qubit_only{};

  UnitErrorConstant out;
  const double duration = unit.events.front().duration;
  if (duration > 0) {
    const ComplexMatrix single = pulse_propagator(
        qubit_only, err, omega_nominal, PulseEvent{0.0, duration, 0.0});
    out.epsilon = extract_pulse_params(single, 0.0).epsilon;
  }
  // ideal pulses (zero width, or no error) leave nothing to divide by
  if (out.epsilon < 1e-10) {
    out.degenerate = true;
    out.c = 0.0;
    return out;
  }
  const ComplexMatrix u =
      unit_propagator(qubit_only, unit, err, omega_nominal, 0.0);
  out.c = u(0, 1) / (cxd(0, 1) * out.epsilon);
  return out;
}

std::complex<double> predict_sequence_offdiag(const UnitErrorConstant& c,
                                              double epsilon,
                                              std::span<const double> phases) {
  std::complex<double> sum = 0.0;  // M * Z
  for (double p : phases) sum += std::complex<double>(std::cos(p), -std::sin(p));
  return cxd(0, 1) * sum * c.c * epsilon;
}

}  // namespace ddsim

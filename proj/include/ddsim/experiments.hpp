#pragma once

// Experiment drivers: robustness fidelity maps over (detuning, amplitude)
// control-error grids, protocol difference maps, and DD-frequency
// spectroscopy scans, all Monte-Carlo averaged over phase realizations.
//
// Reproducibility: the child seed of grid point p, realization r is
// derive_seed(derive_seed(seed, p), r), so results are bit-identical for a
// given spec regardless of worker count, and protocols sharing a master seed
// share realization streams point-for-point (common random numbers).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddsim/dynamics.hpp"
#include "ddsim/phases.hpp"
#include "ddsim/sequence.hpp"

namespace ddsim {

// resolved description of the basic unit used by a scan; tau may be left 0
// for spectroscopy, where it is derived per frequency point
struct UnitSpec {
  UnitKind kind = UnitKind::xy8;
  int n_pulses = 8;
  double tau = 0.0;             // seconds, center-to-center
  double pulse_duration = 0.0;  // seconds
  std::vector<double> custom_phases;
  std::optional<PresetTable> presets;

  PulseUnit build(double tau_override) const;
};

struct FidelityMapSpec {
  UnitSpec unit;
  int repetitions = 1;  // M
  PhaseProtocol protocol;
  std::vector<double> detuning_axis;   // units of the nominal Rabi frequency
  std::vector<double> amplitude_axis;  // relative Rabi deviation
  int realizations = 1;
  std::uint64_t seed = 0;
  double omega = 0.0;  // nominal Rabi frequency, rad/s
};

struct SpectroscopySpec {
  SpinSystem system;
  UnitSpec unit;
  int total_pulses = 0;
  std::vector<double> frequency_axis_hz;  // DD frequency 1/(2 tau)
  PhaseProtocol protocol;
  int realizations = 1;
  std::uint64_t seed = 0;
  ControlError error;
  double omega = 0.0;  // rad/s; 0 -> derived as pi / pulse_duration
};

struct ScanResult {
  std::string axis1_name;  // CSV column name
  std::string axis1_label; // display label
  std::vector<double> axis1;
  std::string axis2_name;
  std::string axis2_label;
  std::vector<double> axis2;  // empty for 1-D scans

  std::string value_name = "value";
  // row-major over (axis1 outer, axis2 inner); axis1.size() rows for 1-D
  std::vector<double> values;
  std::vector<double> stderrs;
  std::vector<double> ideal;  // spectroscopy reference trace, else empty

  nlohmann::json provenance;

  std::size_t n_points() const {
    return axis1.size() * std::max<std::size_t>(1, axis2.size());
  }
};

// throw std::invalid_argument on an invalid spec, before any computation
void validate(const FidelityMapSpec& spec);
void validate(const SpectroscopySpec& spec);

// Survival probability of |+x> (no nuclear spins) on every grid point,
// averaged over phase realizations.
ScanResult run_fidelity_map(const FidelityMapSpec& spec, int threads = 1);

// Pointwise fidelity(spec_b) - fidelity(spec_a) with propagated Monte-Carlo
// standard errors; the axes of the two specs must agree.
ScanResult run_difference_map(const FidelityMapSpec& spec_a,
                              const FidelityMapSpec& spec_b, int threads = 1);

// Averaged population signal vs DD frequency, plus the ideal error-free
// reference trace (instantaneous pulses, standard phases) in `ideal`.
ScanResult run_spectroscopy(const SpectroscopySpec& spec, int threads = 1);

// deterministic index-space parallelism helper: fn(i) for i in [0, count),
// partitioned over `threads` workers; results must be written by index
void parallel_for_index(std::size_t count, int threads,
                        const std::function<void(std::size_t)>& fn);

}  // namespace ddsim

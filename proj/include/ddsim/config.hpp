#pragma once

// Run configuration files: INI-style sections with `key = value` lines and
// '#' comments. Every physical quantity carries an explicit unit (ns, kHz,
// G, ...); dimensionless keys reject units. The parser validates the whole
// file and reports every error at once, each with its line number.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddsim/dynamics.hpp"
#include "ddsim/phases.hpp"
#include "ddsim/sequence.hpp"

namespace ddsim {

struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> errors);
  std::vector<std::string> errors;
};

struct RunConfig {
  std::string command;  // fidelity-map | diff-map | spectroscopy | zstats | unit-check

  // [sequence]
  UnitKind unit = UnitKind::xy8;
  int n_pulses = 8;
  double pulse_duration = 0.0;  // s
  double pulse_spacing = 0.0;   // s, meaning set by spacing_convention
  std::string spacing_convention = "edge";  // edge | center
  std::vector<double> custom_phases;        // radians, unit = custom
  std::string preset_file;
  int repetitions = 0;   // M, map commands
  int total_pulses = 0;  // spectroscopy

  // [protocol] (or [protocol_a]/[protocol_b] for diff-map)
  PhaseProtocol protocol;
  PhaseProtocol protocol_b;

  // [errors]
  double detuning_over_omega = 0.0;
  double rabi_scale = 1.0;

  // [grid]
  double detuning_min = -0.3, detuning_max = 0.3;
  int detuning_steps = 61;
  double amplitude_min = -0.3, amplitude_max = 0.3;
  int amplitude_steps = 61;

  // [scan]
  double frequency_min_hz = 0.0, frequency_max_hz = 0.0;
  int frequency_steps = 0;

  // [system]
  double b_field = 0.0;  // gauss
  std::vector<NuclearSpin> nuclei;

  // [zstats]
  long samples = 0;
  int bins = 40;

  // [monte_carlo]
  int realizations = 0;  // 0 -> per-command default (100 maps, 50 spectroscopy)
  std::uint64_t seed = 0;

  // [output]
  std::string prefix;
  bool plot = true;
  double clip_min = 0.0, clip_max = 0.0;  // equal -> automatic

  std::string config_text;  // raw file content, embedded in provenance

  // center-to-center pulse spacing implied by pulse_spacing + convention
  double tau() const {
    return spacing_convention == "edge" ? pulse_spacing + pulse_duration
                                        : pulse_spacing;
  }
};

// `command_hint` (usually the CLI subcommand) supplies the command when the
// file omits the `command` key; a conflicting explicit key is an error.
// Throws ConfigError listing every problem found.
RunConfig parse_config(const std::string& text, const std::string& origin,
                       const std::string& command_hint = "");

RunConfig load_config_file(const std::string& path,
                           const std::string& command_hint = "");

}  // namespace ddsim

#pragma once

// Basic DD pulse units: timed, phased pi-pulse events on CPMG timing
// (centers at odd multiples of tau/2), composed M times with per-unit
// global phase shifts.

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace ddsim {

struct PulseEvent {
  double start = 0.0;     // seconds
  double duration = 0.0;  // seconds; 0 encodes an instantaneous ideal pi pulse
  double phase = 0.0;     // radians, axis angle in the x-y plane

  double center() const { return start + 0.5 * duration; }
  double end() const { return start + duration; }
};

struct PulseUnit {
  std::vector<PulseEvent> events;  // time-ordered, non-overlapping
  double total_duration = 0.0;     // seconds
  std::string label;

  int n_pulses() const { return static_cast<int>(events.size()); }
};

struct SequenceProgram {
  PulseUnit unit;
  int repetitions = 1;              // M
  std::vector<double> unit_phases;  // per-unit global shifts, length M
};

enum class UnitKind { xy8, yy8, cp, custom };

const char* unit_kind_name(UnitKind kind);
// accepts the names returned by unit_kind_name; throws on anything else
UnitKind parse_unit_kind(const std::string& name);

// Named phase-pattern presets: label -> per-pulse phases (radians).
using PresetTable = std::map<std::string, std::vector<double>>;

// Preset file format: one unit per line, `label N phase_1 ... phase_N`
// (radians); '#' starts a comment. Throws with line numbers on bad input.
PresetTable load_presets(std::istream& in, const std::string& origin = "presets");
PresetTable load_preset_file(const std::string& path);

// Builds one DD unit on CPMG timing: pulse centers at tau/2, 3*tau/2, ...,
// total duration n_pulses * tau. `tau` is the center-to-center spacing and
// must exceed the pulse duration. xy8 uses the fixed pattern
// (0, pi/2, 0, pi/2, pi/2, 0, pi/2, 0); cp is all zeros; yy8 is resolved
// through `presets` (it ships unfilled, see data/presets.txt); custom takes
// an explicit phase list of length n_pulses.
PulseUnit build_unit(UnitKind kind, int n_pulses, double tau,
                     double pulse_duration,
                     std::span<const double> custom_phases = {},
                     const PresetTable* presets = nullptr);

// wraps to [0, 2*pi)
double wrap_angle(double phi);

// Same unit with every pulse phase incremented by phi (mod 2*pi).
PulseUnit shift_unit_phase(const PulseUnit& unit, double phi);

// Program whose m-th repetition is shift_unit_phase(unit, phases[m]).
SequenceProgram assemble(const PulseUnit& unit, int repetitions,
                         std::vector<double> phases);

}  // namespace ddsim

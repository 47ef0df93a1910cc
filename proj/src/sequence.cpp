#include "ddsim/sequence.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ddsim/constants.hpp"

namespace ddsim {

using constants::pi;
using constants::two_pi;

double wrap_angle(double phi) {
  double w = std::fmod(phi, two_pi);
  if (w < 0) w += two_pi;
  if (w >= two_pi) w = 0.0;  // fmod can round up to two_pi
  return w;
}

PresetTable load_presets(std::istream& in, const std::string& origin) {
  PresetTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string label;
    if (!(ss >> label)) continue;  // blank line
    int n = 0;
    if (!(ss >> n) || n < 1)
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": expected a positive pulse count after '" +
                               label + "'");
    std::vector<double> phases(n);
    for (int k = 0; k < n; ++k) {
      if (!(ss >> phases[k]))
        throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                 ": expected " + std::to_string(n) +
                                 " phases for '" + label + "'");
    }
    double extra;
    if (ss >> extra)
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": trailing values after " + std::to_string(n) +
                               " phases for '" + label + "'");
    if (!table.emplace(label, std::move(phases)).second)
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": duplicate preset '" + label + "'");
  }
  return table;
}

PresetTable load_preset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open preset file '" + path + "'");
  return load_presets(in, path);
}

namespace {

PulseUnit make_unit(std::span<const double> phases, double tau,
                    double pulse_duration, std::string label) {
  PulseUnit unit;
  unit.label = std::move(label);
  const int n = static_cast<int>(phases.size());
  unit.total_duration = n * tau;
  unit.events.reserve(n);
  for (int k = 1; k <= n; ++k) {
    const double center = (k - 0.5) * tau;
    unit.events.push_back(PulseEvent{center - 0.5 * pulse_duration,
                                     pulse_duration,
                                     wrap_angle(phases[k - 1])});
  }
  return unit;
}

constexpr double xy8_phases[8] = {0,      pi / 2, 0,      pi / 2,
                                  pi / 2, 0,      pi / 2, 0};

}  // namespace

const char* unit_kind_name(UnitKind kind) {
  switch (kind) {
    case UnitKind::xy8: return "xy8";
    case UnitKind::yy8: return "yy8";
    case UnitKind::cp: return "cp";
    case UnitKind::custom: return "custom";
  }
  return "?";
}

UnitKind parse_unit_kind(const std::string& name) {
  if (name == "xy8") return UnitKind::xy8;
  if (name == "yy8") return UnitKind::yy8;
  if (name == "cp") return UnitKind::cp;
  if (name == "custom") return UnitKind::custom;
  throw std::invalid_argument("unknown unit kind '" + name +
                              "' (expected xy8, yy8, cp, or custom)");
}

PulseUnit build_unit(UnitKind kind, int n_pulses, double tau,
                     double pulse_duration,
                     std::span<const double> custom_phases,
                     const PresetTable* presets) {
  if (n_pulses < 1)
    throw std::invalid_argument("build_unit: n_pulses must be >= 1");
  if (pulse_duration < 0)
    throw std::invalid_argument("build_unit: pulse_duration must be >= 0");
  if (!(tau > pulse_duration))
    throw std::invalid_argument(
        "build_unit: tau must exceed the pulse duration (pulses overlap)");

  switch (kind) {
    case UnitKind::xy8:
      if (n_pulses != 8)
        throw std::invalid_argument("build_unit: xy8 requires n_pulses = 8");
      return make_unit(xy8_phases, tau, pulse_duration, "xy8");
    case UnitKind::yy8: {
      if (n_pulses != 8)
        throw std::invalid_argument("build_unit: yy8 requires n_pulses = 8");
      if (presets == nullptr || !presets->count("yy8"))
        throw std::invalid_argument(
            "build_unit: yy8 is preset-defined and its entry is not present; "
            "transcribe the published yy8 phase pattern into the preset file "
            "(see data/presets.txt)");
      const auto& p = presets->at("yy8");
      if (static_cast<int>(p.size()) != 8)
        throw std::invalid_argument("build_unit: yy8 preset must list 8 phases");
      return make_unit(p, tau, pulse_duration, "yy8");
    }
    case UnitKind::cp:
      if (n_pulses % 2 != 0)
        throw std::invalid_argument(
            "build_unit: built-in units require an even pulse count");
      return make_unit(std::vector<double>(n_pulses, 0.0), tau, pulse_duration,
                       "cp");
    case UnitKind::custom:
      if (static_cast<int>(custom_phases.size()) != n_pulses)
        throw std::invalid_argument(
            "build_unit: custom phase list length must equal n_pulses");
      return make_unit(custom_phases, tau, pulse_duration, "custom");
  }
  throw std::invalid_argument("build_unit: unknown unit kind");
}

PulseUnit shift_unit_phase(const PulseUnit& unit, double phi) {
  PulseUnit shifted = unit;
  for (auto& ev : shifted.events) ev.phase = wrap_angle(ev.phase + phi);
  return shifted;
}

SequenceProgram assemble(const PulseUnit& unit, int repetitions,
                         std::vector<double> phases) {
  if (repetitions < 1)
    throw std::invalid_argument("assemble: repetitions must be >= 1");
  if (static_cast<int>(phases.size()) != repetitions)
    throw std::invalid_argument(
        "assemble: phase list length must equal repetitions");
  return SequenceProgram{unit, repetitions, std::move(phases)};
}

}  // namespace ddsim

#include "ddsim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ddsim {

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::ostringstream os;
  os << "invalid config (" << errors.size()
     << (errors.size() == 1 ? " error)" : " errors)");
  for (const auto& e : errors) os << "\n  " << e;
  return os.str();
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string section, key, value;
  int lineno = 0;
  bool used = false;
};

struct UnitDef {
  const char* name;
  double factor;
};

constexpr UnitDef time_units[] = {
    {"ns", 1e-9}, {"us", 1e-6}, {"ms", 1e-3}, {"s", 1.0}};
constexpr UnitDef frequency_units[] = {
    {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
constexpr UnitDef field_units[] = {{"G", 1.0}, {"T", 1e4}};
constexpr UnitDef gyro_units[] = {{"Hz/G", 1.0}, {"kHz/G", 1e3}};

struct Dimension {
  const char* what;     // for messages, e.g. "a time"
  const char* example;  // e.g. "200 ns"
  const UnitDef* units;
  int n_units;
};

constexpr Dimension dim_time{"a time", "200 ns", time_units, 4};
constexpr Dimension dim_frequency{"a frequency", "1600 kHz", frequency_units, 4};
constexpr Dimension dim_field{"a magnetic field", "400 G", field_units, 2};
constexpr Dimension dim_gyro{"a gyromagnetic ratio", "4.2576 kHz/G",
                             gyro_units, 2};

bool parse_number(const std::string& token, double& out) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

bool lookup_unit(const Dimension& dim, const std::string& token,
                 double& factor) {
  for (int k = 0; k < dim.n_units; ++k) {
    if (token == dim.units[k].name) {
      factor = dim.units[k].factor;
      return true;
    }
  }
  return false;
}

std::vector<std::string> split_tokens(const std::string& s) {
  std::vector<std::string> tokens;
  std::istringstream ss(s);
  std::string t;
  while (ss >> t) tokens.push_back(t);
  return tokens;
}

class Reader {
 public:
  Reader(std::vector<Entry>& entries, std::string origin)
      : entries_(entries), origin_(std::move(origin)) {}

  std::vector<std::string> errors;

  void error_at(int lineno, const std::string& msg) {
    errors.push_back(origin_ + ":" + std::to_string(lineno) + ": " + msg);
  }
  void error(const std::string& msg) { errors.push_back(origin_ + ": " + msg); }

  // returns the first not-yet-consumed entry and marks it consumed, so
  // repeated keys (nucleus) can be drained by calling again
  Entry* find(const std::string& section, const std::string& key) {
    for (auto& e : entries_)
      if (!e.used && e.section == section && e.key == key) {
        e.used = true;
        return &e;
      }
    return nullptr;
  }

  bool has(const std::string& section, const std::string& key) {
    for (const auto& e : entries_)
      if (e.section == section && e.key == key) return true;
    return false;
  }

  void require_missing(const std::string& section, const std::string& key) {
    error("missing required key '" + spell(section, key) + "'");
  }

  static std::string spell(const std::string& section, const std::string& key) {
    return section.empty() ? key : "[" + section + "] " + key;
  }

  // physical quantity: number followed by a unit from `dim`
  double quantity(const std::string& section, const std::string& key,
                  const Dimension& dim, bool required, double fallback = 0.0) {
    Entry* e = find(section, key);
    if (!e) {
      if (required) require_missing(section, key);
      return fallback;
    }
    const auto tokens = split_tokens(e->value);
    double value = 0.0;
    if (tokens.empty() || !parse_number(tokens[0], value)) {
      error_at(e->lineno, "expected a number for '" + key + "', got '" +
                              e->value + "'");
      return fallback;
    }
    if (tokens.size() < 2) {
      error_at(e->lineno, "missing unit at line " + std::to_string(e->lineno) +
                              " for '" + key + "' (expected " + dim.what +
                              ", e.g. '" + dim.example + "')");
      return fallback;
    }
    double factor = 0.0;
    if (!lookup_unit(dim, tokens[1], factor)) {
      std::string allowed;
      for (int k = 0; k < dim.n_units; ++k) {
        if (k) allowed += ", ";
        allowed += dim.units[k].name;
      }
      error_at(e->lineno, "unknown unit '" + tokens[1] + "' for '" + key +
                              "' (allowed: " + allowed + ")");
      return fallback;
    }
    if (tokens.size() > 2) {
      error_at(e->lineno, "trailing text after '" + key + "' value");
      return fallback;
    }
    return value * factor;
  }

  double dimensionless(const std::string& section, const std::string& key,
                       bool required, double fallback = 0.0) {
    Entry* e = find(section, key);
    if (!e) {
      if (required) require_missing(section, key);
      return fallback;
    }
    const auto tokens = split_tokens(e->value);
    double value = 0.0;
    if (tokens.empty() || !parse_number(tokens[0], value)) {
      error_at(e->lineno, "expected a number for '" + key + "', got '" +
                              e->value + "'");
      return fallback;
    }
    if (tokens.size() > 1) {
      error_at(e->lineno, "'" + key + "' is dimensionless, drop the unit '" +
                              tokens[1] + "'");
      return fallback;
    }
    return value;
  }

  long integer(const std::string& section, const std::string& key,
               bool required, long fallback = 0) {
    Entry* e = find(section, key);
    if (!e) {
      if (required) require_missing(section, key);
      return fallback;
    }
    long value = 0;
    const char* begin = e->value.data();
    const char* end = begin + e->value.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end) {
      error_at(e->lineno, "expected an integer for '" + key + "', got '" +
                              e->value + "'");
      return fallback;
    }
    return value;
  }

  std::uint64_t seed_value(const std::string& section, const std::string& key,
                           bool required, std::uint64_t fallback = 0) {
    Entry* e = find(section, key);
    if (!e) {
      if (required) require_missing(section, key);
      return fallback;
    }
    std::uint64_t value = 0;
    const char* begin = e->value.data();
    const char* end = begin + e->value.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end) {
      error_at(e->lineno, "expected a non-negative integer for '" + key +
                              "', got '" + e->value + "'");
      return fallback;
    }
    return value;
  }

  std::string word(const std::string& section, const std::string& key,
                   bool required, const std::string& fallback = {}) {
    Entry* e = find(section, key);
    if (!e) {
      if (required) require_missing(section, key);
      return fallback;
    }
    return e->value;
  }

  bool boolean(const std::string& section, const std::string& key,
               bool required, bool fallback) {
    Entry* e = find(section, key);
    if (!e) {
      if (required) require_missing(section, key);
      return fallback;
    }
    if (e->value == "true" || e->value == "on" || e->value == "1") return true;
    if (e->value == "false" || e->value == "off" || e->value == "0")
      return false;
    error_at(e->lineno, "expected true/false for '" + key + "', got '" +
                            e->value + "'");
    return fallback;
  }

  std::vector<double> number_list(const std::string& section,
                                  const std::string& key, bool required) {
    Entry* e = find(section, key);
    if (!e) {
      if (required) require_missing(section, key);
      return {};
    }
    std::vector<double> values;
    for (const auto& token : split_tokens(e->value)) {
      double v = 0.0;
      if (!parse_number(token, v)) {
        error_at(e->lineno, "expected numbers for '" + key + "', got '" +
                                token + "'");
        return {};
      }
      values.push_back(v);
    }
    if (values.empty())
      error_at(e->lineno, "'" + key + "' must list at least one number");
    return values;
  }

  void flag_unknown() {
    for (const auto& e : entries_)
      if (!e.used)
        error_at(e.lineno, "unknown key '" + spell(e.section, e.key) + "'");
  }

 private:
  std::vector<Entry>& entries_;
  std::string origin_;
};

std::vector<Entry> tokenize(const std::string& text,
                            std::vector<std::string>& errors,
                            const std::string& origin) {
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(origin + ":" + std::to_string(lineno) +
                         ": unterminated section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(origin + ":" + std::to_string(lineno) +
                       ": expected 'key = value'");
      continue;
    }
    Entry e;
    e.section = section;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.lineno = lineno;
    if (e.key.empty()) {
      errors.push_back(origin + ":" + std::to_string(lineno) +
                       ": empty key");
      continue;
    }
    // repeated `nucleus` keys accumulate; anything else must be unique
    if (e.key != "nucleus") {
      for (const auto& prev : entries) {
        if (prev.section == e.section && prev.key == e.key) {
          errors.push_back(origin + ":" + std::to_string(lineno) +
                           ": duplicate key '" + Reader::spell(e.section, e.key) +
                           "' (first at line " + std::to_string(prev.lineno) +
                           ")");
          break;
        }
      }
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

void read_protocol(Reader& r, const std::string& section, PhaseProtocol& out) {
  const std::string name = r.word(section, "protocol", true);
  if (name == "standard") {
    out.kind = ProtocolKind::standard;
  } else if (name == "randomized") {
    out.kind = ProtocolKind::randomized;
  } else if (name == "correlated") {
    out.kind = ProtocolKind::correlated;
  } else if (!name.empty()) {
    r.error("unknown protocol '" + name +
            "' (expected standard, randomized, or correlated)");
  }
  const bool has_g = r.has(section, "elimination_size");
  if (out.kind == ProtocolKind::correlated) {
    const long g = r.integer(section, "elimination_size", true, 0);
    if (has_g && g < 2)
      r.error("[" + section + "] elimination_size must be at least 2");
    out.elimination_size = static_cast<int>(g);
  } else if (has_g) {
    r.integer(section, "elimination_size", false, 0);
    r.error("[" + section +
            "] elimination_size applies to the correlated protocol only");
  }
}

void read_unit(Reader& r, RunConfig& config) {
  const std::string name = r.word("sequence", "unit", true, "");
  if (!name.empty()) {
    try {
      config.unit = parse_unit_kind(name);
    } catch (const std::exception& ex) {
      r.error(ex.what());
      return;
    }
  }
  const bool has_n = r.has("sequence", "n_pulses");
  const long n = r.integer("sequence", "n_pulses", false, 0);
  config.custom_phases = r.number_list("sequence", "phases",
                                       config.unit == UnitKind::custom);
  config.preset_file = r.word("sequence", "preset_file", false, "");
  switch (config.unit) {
    case UnitKind::xy8:
    case UnitKind::yy8:
      config.n_pulses = 8;
      if (has_n && n != 8)
        r.error("[sequence] n_pulses must be 8 for " + name);
      break;
    case UnitKind::cp:
      if (!has_n) {
        r.require_missing("sequence", "n_pulses");
      } else if (n < 2 || n % 2 != 0) {
        r.error("[sequence] n_pulses must be a positive even number for cp");
      } else {
        config.n_pulses = static_cast<int>(n);
      }
      break;
    case UnitKind::custom:
      if (!config.custom_phases.empty())
        config.n_pulses = static_cast<int>(config.custom_phases.size());
      if (has_n && n != config.n_pulses)
        r.error("[sequence] n_pulses disagrees with the phase list length");
      break;
  }
  if (config.unit != UnitKind::custom && r.has("sequence", "phases"))
    r.error("[sequence] phases is only valid for unit = custom");
}

void read_timing(Reader& r, RunConfig& config, bool spacing_required) {
  config.pulse_duration =
      r.quantity("sequence", "pulse_duration", dim_time, true);
  if (!(config.pulse_duration > 0) && r.has("sequence", "pulse_duration"))
    r.error("[sequence] pulse_duration must be positive");

  const bool has_spacing = r.has("sequence", "pulse_spacing");
  const bool has_tau = r.has("sequence", "tau");
  if (has_spacing && has_tau)
    r.error("[sequence] give either pulse_spacing or tau, not both");
  if (has_tau) {
    // `tau` is a synonym for pulse_spacing, same convention flag applies
    config.pulse_spacing = r.quantity("sequence", "tau", dim_time, false);
  } else {
    config.pulse_spacing = r.quantity("sequence", "pulse_spacing", dim_time,
                                      spacing_required);
  }
  if ((has_spacing || has_tau) && !(config.pulse_spacing > 0))
    r.error("[sequence] pulse spacing must be positive");

  config.spacing_convention =
      r.word("sequence", "spacing_convention", false, "edge");
  if (config.spacing_convention != "edge" &&
      config.spacing_convention != "center")
    r.error("[sequence] spacing_convention must be 'edge' or 'center'");
}

void read_grid(Reader& r, RunConfig& config) {
  config.detuning_min = r.dimensionless("grid", "detuning_min", false, -0.3);
  config.detuning_max = r.dimensionless("grid", "detuning_max", false, 0.3);
  config.detuning_steps =
      static_cast<int>(r.integer("grid", "detuning_steps", false, 61));
  config.amplitude_min = r.dimensionless("grid", "amplitude_min", false, -0.3);
  config.amplitude_max = r.dimensionless("grid", "amplitude_max", false, 0.3);
  config.amplitude_steps =
      static_cast<int>(r.integer("grid", "amplitude_steps", false, 61));
  auto check = [&](const char* name, double lo, double hi, int steps) {
    if (steps < 1)
      r.error(std::string("[grid] ") + name + "_steps must be at least 1");
    if (steps > 1 && !(hi > lo))
      r.error(std::string("[grid] ") + name + "_max must exceed " + name +
              "_min");
  };
  check("detuning", config.detuning_min, config.detuning_max,
        config.detuning_steps);
  check("amplitude", config.amplitude_min, config.amplitude_max,
        config.amplitude_steps);
}

void read_errors(Reader& r, RunConfig& config) {
  config.detuning_over_omega =
      r.dimensionless("errors", "detuning_over_omega", false, 0.0);
  config.rabi_scale = r.dimensionless("errors", "rabi_scale", false, 1.0);
  if (!(config.rabi_scale > 0))
    r.error("[errors] rabi_scale must be positive");
}

void read_system(Reader& r, RunConfig& config) {
  config.b_field = r.quantity("system", "b_field", dim_field, true);
  if (r.has("system", "b_field") && !(config.b_field > 0))
    r.error("[system] b_field must be positive");
}

void read_output(Reader& r, RunConfig& config) {
  config.prefix = r.word("output", "prefix", true, "");
  config.plot = r.boolean("output", "plot", false, true);
  const bool has_lo = r.has("output", "clip_min");
  const bool has_hi = r.has("output", "clip_max");
  config.clip_min = r.dimensionless("output", "clip_min", false, 0.0);
  config.clip_max = r.dimensionless("output", "clip_max", false, 0.0);
  if (has_lo != has_hi) {
    r.error("[output] clip_min and clip_max must be given together");
  } else if (has_lo && !(config.clip_max > config.clip_min)) {
    r.error("[output] clip_max must exceed clip_min");
  }
}

void read_monte_carlo(Reader& r, RunConfig& config) {
  config.realizations =
      static_cast<int>(r.integer("monte_carlo", "realizations", false, 0));
  if (r.has("monte_carlo", "realizations") && config.realizations < 1)
    r.error("[monte_carlo] realizations must be at least 1");
  config.seed = r.seed_value("monte_carlo", "seed", false, 0);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errs)
    : std::runtime_error(join_errors(errs)), errors(std::move(errs)) {}

RunConfig parse_config(const std::string& text, const std::string& origin,
                       const std::string& command_hint) {
  std::vector<std::string> tokenize_errors;
  std::vector<Entry> entries = tokenize(text, tokenize_errors, origin);
  Reader r(entries, origin);
  r.errors = std::move(tokenize_errors);

  RunConfig config;
  config.config_text = text;

  static const char* known_commands[] = {"fidelity-map", "diff-map",
                                         "spectroscopy", "zstats",
                                         "unit-check"};
  config.command = r.word("", "command", command_hint.empty(), "");
  if (config.command.empty()) config.command = command_hint;
  if (!command_hint.empty() && !config.command.empty() &&
      config.command != command_hint)
    r.error("config says command '" + config.command +
            "' but the CLI invoked '" + command_hint + "'");
  bool known = false;
  for (const char* c : known_commands) known |= (config.command == c);
  if (!config.command.empty() && !known) {
    std::string allowed;
    for (const char* c : known_commands) {
      if (!allowed.empty()) allowed += ", ";
      allowed += c;
    }
    r.error("unknown command '" + config.command + "' (expected one of " +
            allowed + ")");
  }

  const std::string& cmd = config.command;
  const bool is_map = cmd == "fidelity-map" || cmd == "diff-map";

  if (known) {
    if (is_map) {
      read_unit(r, config);
      read_timing(r, config, true);
      const long m = r.integer("sequence", "repetitions", true, 0);
      if (r.has("sequence", "repetitions") && m < 1)
        r.error("[sequence] repetitions must be at least 1");
      config.repetitions = static_cast<int>(m);
      if (cmd == "fidelity-map") {
        read_protocol(r, "protocol", config.protocol);
      } else {
        read_protocol(r, "protocol_a", config.protocol);
        read_protocol(r, "protocol_b", config.protocol_b);
      }
      read_grid(r, config);
      read_monte_carlo(r, config);
      read_output(r, config);
      if (config.realizations == 0) config.realizations = 100;
    } else if (cmd == "spectroscopy") {
      read_unit(r, config);
      read_timing(r, config, false);
      if (r.has("sequence", "pulse_spacing") || r.has("sequence", "tau"))
        r.error(
            "[sequence] spectroscopy derives the spacing from the frequency "
            "axis, drop pulse_spacing/tau");
      const long total = r.integer("sequence", "total_pulses", true, 0);
      if (r.has("sequence", "total_pulses") && total < 1)
        r.error("[sequence] total_pulses must be at least 1");
      config.total_pulses = static_cast<int>(total);
      read_protocol(r, "protocol", config.protocol);
      read_errors(r, config);
      config.frequency_min_hz =
          r.quantity("scan", "frequency_min", dim_frequency, true);
      config.frequency_max_hz =
          r.quantity("scan", "frequency_max", dim_frequency, true);
      config.frequency_steps =
          static_cast<int>(r.integer("scan", "frequency_steps", true, 0));
      if (r.has("scan", "frequency_steps") && config.frequency_steps < 1)
        r.error("[scan] frequency_steps must be at least 1");
      if (config.frequency_steps > 1 &&
          !(config.frequency_max_hz > config.frequency_min_hz))
        r.error("[scan] frequency_max must exceed frequency_min");
      if (r.has("scan", "frequency_min") && !(config.frequency_min_hz > 0))
        r.error("[scan] frequency_min must be positive");
      read_system(r, config);
      // nucleus entries: label a_perp UNIT a_par UNIT [gamma UNIT]
      bool any_nucleus = false;
      for (Entry* e = r.find("system", "nucleus"); e;
           e = r.find("system", "nucleus")) {
        any_nucleus = true;
        const auto tokens = split_tokens(e->value);
        auto bad = [&](const std::string& msg) {
          r.error_at(e->lineno, "nucleus: " + msg +
                                    " (format: label a_perp kHz a_par kHz "
                                    "[gamma kHz/G])");
        };
        if (tokens.size() != 5 && tokens.size() != 7) {
          bad("expected 5 or 7 fields, got " + std::to_string(tokens.size()));
          continue;
        }
        double a_perp = 0, a_par = 0, fa = 0, fb = 0;
        if (!parse_number(tokens[1], a_perp) || !lookup_unit(dim_frequency, tokens[2], fa) ||
            !parse_number(tokens[3], a_par) || !lookup_unit(dim_frequency, tokens[4], fb)) {
          bad("could not parse the coupling values");
          continue;
        }
        const double a_perp_hz = a_perp * fa;
        const double a_par_hz = a_par * fb;
        try {
          if (tokens.size() == 7) {
            double g = 0, fg = 0;
            if (!parse_number(tokens[5], g) ||
                !lookup_unit(dim_gyro, tokens[6], fg)) {
              bad("could not parse the gyromagnetic ratio");
              continue;
            }
            config.nuclei.push_back(
                make_nucleus(tokens[0], a_perp_hz, a_par_hz, g * fg));
          } else {
            config.nuclei.push_back(make_nucleus(tokens[0], a_perp_hz, a_par_hz));
          }
        } catch (const std::exception& ex) {
          r.error_at(e->lineno, ex.what());
        }
      }
      if (!any_nucleus)
        r.error("missing required key '[system] nucleus' (at least one)");
      read_monte_carlo(r, config);
      read_output(r, config);
      if (config.realizations == 0) config.realizations = 50;
    } else if (cmd == "zstats") {
      read_protocol(r, "protocol", config.protocol);
      const long m = r.integer("zstats", "repetitions", true, 0);
      if (r.has("zstats", "repetitions") && m < 1)
        r.error("[zstats] repetitions must be at least 1");
      config.repetitions = static_cast<int>(m);
      config.samples = r.integer("zstats", "samples", true, 0);
      if (r.has("zstats", "samples") && config.samples < 1)
        r.error("[zstats] samples must be at least 1");
      config.bins = static_cast<int>(r.integer("zstats", "bins", false, 40));
      if (config.bins < 1) r.error("[zstats] bins must be at least 1");
      read_monte_carlo(r, config);
      read_output(r, config);
      config.realizations = 1;
    } else if (cmd == "unit-check") {
      read_unit(r, config);
      read_timing(r, config, true);
      read_errors(r, config);
      read_output(r, config);
      r.seed_value("monte_carlo", "seed", false, 0);
      config.realizations = 1;
    }
    if (config.protocol.kind == ProtocolKind::correlated &&
        config.protocol.elimination_size >= 2) {
      const int m = config.repetitions;
      if (m >= 1 && config.protocol.elimination_size > m)
        r.error("elimination_size exceeds the number of repetitions");
    }
  }

  r.flag_unknown();
  if (!r.errors.empty()) throw ConfigError(std::move(r.errors));
  return config;
}

RunConfig load_config_file(const std::string& path,
                           const std::string& command_hint) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path, command_hint);
}

}  // namespace ddsim

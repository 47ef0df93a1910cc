#include "ddsim/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ddsim/analysis.hpp"
#include "ddsim/constants.hpp"
#include "ddsim/csvio.hpp"
#include "ddsim/experiments.hpp"
#include "ddsim/rng.hpp"
#include "ddsim/svg.hpp"

namespace ddsim {

using nlohmann::json;

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("linspace: n must be >= 1");
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (int k = 0; k < n; ++k) v[k] = lo + (hi - lo) * k / (n - 1);
  return v;
}

namespace {

UnitSpec unit_spec_from(const RunConfig& config, double tau) {
  UnitSpec unit;
  unit.kind = config.unit;
  unit.n_pulses = config.n_pulses;
  unit.tau = tau;
  unit.pulse_duration = config.pulse_duration;
  unit.custom_phases = config.custom_phases;
  if (!config.preset_file.empty())
    unit.presets = load_preset_file(config.preset_file);
  return unit;
}

FidelityMapSpec map_spec_from(const RunConfig& config,
                              const PhaseProtocol& protocol,
                              std::uint64_t seed) {
  FidelityMapSpec spec;
  spec.unit = unit_spec_from(config, config.tau());
  spec.repetitions = config.repetitions;
  spec.protocol = protocol;
  spec.detuning_axis =
      linspace(config.detuning_min, config.detuning_max, config.detuning_steps);
  spec.amplitude_axis = linspace(config.amplitude_min, config.amplitude_max,
                                 config.amplitude_steps);
  spec.realizations = config.realizations;
  spec.seed = seed;
  spec.omega = constants::pi / config.pulse_duration;
  return spec;
}

SpectroscopySpec spectroscopy_spec_from(const RunConfig& config,
                                        std::uint64_t seed) {
  SpectroscopySpec spec;
  spec.system.nuclei = config.nuclei;
  spec.system.b_field = config.b_field;
  spec.unit = unit_spec_from(config, 0.0);
  spec.total_pulses = config.total_pulses;
  spec.frequency_axis_hz = linspace(config.frequency_min_hz,
                                    config.frequency_max_hz,
                                    config.frequency_steps);
  spec.protocol = config.protocol;
  spec.realizations = config.realizations;
  spec.seed = seed;
  spec.omega = constants::pi / config.pulse_duration;
  spec.error.detuning = config.detuning_over_omega * spec.omega;
  spec.error.rabi_scale = config.rabi_scale;
  return spec;
}

json generator_info() {
  json g;
  g["name"] = "ddsim";
  g["version"] = "1.0.0";
  g["rng"] = "xoshiro256** seeded via splitmix64";
  g["seed_derivation"] = "child(master, k) = mix64(master ^ mix64(k + 1))";
  g["correlated_sampler"] =
      "per group of G: uniformly rotated G-th roots of unity, "
      "Fisher-Yates permuted; remainder phases independent uniform";
  return g;
}

struct Columns {
  std::vector<std::string> header;
  std::vector<std::vector<double>> data;
};

Columns scan_columns(const ScanResult& scan) {
  Columns out;
  const std::size_t n2 = scan.axis2.size();
  if (n2 > 0) {
    out.header = {scan.axis1_name, scan.axis2_name, scan.value_name, "stderr"};
    std::vector<double> c1, c2;
    c1.reserve(scan.values.size());
    c2.reserve(scan.values.size());
    for (std::size_t i = 0; i < scan.axis1.size(); ++i)
      for (std::size_t j = 0; j < n2; ++j) {
        c1.push_back(scan.axis1[i]);
        c2.push_back(scan.axis2[j]);
      }
    out.data = {std::move(c1), std::move(c2), scan.values, scan.stderrs};
  } else if (!scan.ideal.empty()) {
    out.header = {scan.axis1_name, scan.value_name, scan.value_name + "_ideal",
                  "stderr"};
    out.data = {scan.axis1, scan.values, scan.ideal, scan.stderrs};
  } else {
    out.header = {scan.axis1_name, scan.value_name, "stderr"};
    out.data = {scan.axis1, scan.values, scan.stderrs};
  }
  return out;
}

std::string protocol_title(const PhaseProtocol& p) {
  std::string name = protocol_name(p.kind);
  if (p.kind == ProtocolKind::correlated)
    name += " (G=" + std::to_string(p.elimination_size) + ")";
  return name;
}

// |Z|^2 histogram over [0, 1] plus the sample mean against the 1/M law
struct ZStatsResult {
  std::vector<double> bin_lower, bin_upper, count, density;
  double sample_mean = 0.0;
  double expected_mean = 0.0;
  ScanResult plot;  // density vs bin center, for the SVG
  json provenance;
};

ZStatsResult run_zstats(const RunConfig& config, std::uint64_t seed) {
  ZStatsResult out;
  const int m = config.repetitions;
  const int bins = config.bins;
  const long samples = config.samples;

  std::vector<long> counts(bins, 0);
  double sum = 0.0;
  PhaseProtocol protocol = config.protocol;
  for (long s = 0; s < samples; ++s) {
    protocol.seed = derive_seed(seed, static_cast<std::uint64_t>(s));
    const auto phases = generate_phases(protocol, m);
    const double zsq = std::norm(z_statistic(phases));
    sum += zsq;
    int bin = static_cast<int>(zsq * bins);
    if (bin >= bins) bin = bins - 1;  // zsq == 1 lands in the last bin
    ++counts[bin];
  }
  out.sample_mean = sum / samples;
  out.expected_mean = 1.0 / m;

  const double bin_width = 1.0 / bins;
  out.plot.axis1_name = "zsq";
  out.plot.axis1_label = "|Z|² bin center";
  out.plot.value_name = "density";
  for (int b = 0; b < bins; ++b) {
    out.bin_lower.push_back(b * bin_width);
    out.bin_upper.push_back((b + 1) * bin_width);
    out.count.push_back(static_cast<double>(counts[b]));
    out.density.push_back(counts[b] / (samples * bin_width));
    out.plot.axis1.push_back((b + 0.5) * bin_width);
  }
  out.plot.values = out.density;
  out.plot.stderrs.assign(bins, 0.0);

  out.provenance["experiment"] = "zstats";
  out.provenance["protocol"]["name"] = protocol_name(config.protocol.kind);
  if (config.protocol.kind == ProtocolKind::correlated)
    out.provenance["protocol"]["elimination_size"] =
        config.protocol.elimination_size;
  out.provenance["repetitions"] = m;
  out.provenance["samples"] = samples;
  out.provenance["bins"] = bins;
  out.provenance["seed"] = seed;
  out.provenance["sample_mean"] = out.sample_mean;
  out.provenance["expected_mean"] = out.expected_mean;
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  os << content;
  if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

RunPaths execute_run(const RunConfig& config, const RunOverrides& overrides) {
  const std::uint64_t seed =
      overrides.seed ? *overrides.seed : config.seed;
  const bool plot = config.plot && overrides.plot;
  const int threads = std::max(1, overrides.threads);

  const std::filesystem::path prefix(config.prefix);
  if (prefix.has_parent_path())
    std::filesystem::create_directories(prefix.parent_path());

  std::ostringstream csv;
  std::string svg_text;
  json resolved;

  if (config.command == "fidelity-map" || config.command == "diff-map") {
    ScanResult scan;
    PlotOptions opts;
    if (config.command == "fidelity-map") {
      scan = run_fidelity_map(map_spec_from(config, config.protocol, seed),
                              threads);
      opts.title = std::string(unit_kind_name(config.unit)) +
                   " M=" + std::to_string(config.repetitions) + ", " +
                   protocol_title(config.protocol);
    } else {
      const auto spec_a = map_spec_from(config, config.protocol, seed);
      const auto spec_b = map_spec_from(config, config.protocol_b, seed);
      scan = run_difference_map(spec_a, spec_b, threads);
      opts.diverging = true;
      opts.title = protocol_title(config.protocol_b) + " minus " +
                   protocol_title(config.protocol);
    }
    if (config.clip_max > config.clip_min) {
      opts.clip_min = config.clip_min;
      opts.clip_max = config.clip_max;
    }
    const Columns cols = scan_columns(scan);
    write_csv(csv, cols.header, cols.data);
    if (plot) svg_text = render_scan_svg(scan, opts);
    resolved = scan.provenance;
  } else if (config.command == "spectroscopy") {
    const ScanResult scan =
        run_spectroscopy(spectroscopy_spec_from(config, seed), threads);
    const Columns cols = scan_columns(scan);
    write_csv(csv, cols.header, cols.data);
    PlotOptions opts;
    opts.title = "spectroscopy, " + protocol_title(config.protocol);
    if (config.clip_max > config.clip_min) {
      opts.clip_min = config.clip_min;
      opts.clip_max = config.clip_max;
    }
    if (plot) svg_text = render_scan_svg(scan, opts);
    resolved = scan.provenance;
  } else if (config.command == "zstats") {
    const ZStatsResult z = run_zstats(config, seed);
    std::vector<double> mean_col(z.bin_lower.size(), z.sample_mean);
    std::vector<double> expected_col(z.bin_lower.size(), z.expected_mean);
    write_csv(csv,
              {"zsq_bin_lower", "zsq_bin_upper", "count", "density",
               "sample_mean", "expected_mean"},
              {z.bin_lower, z.bin_upper, z.count, z.density, mean_col,
               expected_col});
    PlotOptions opts;
    opts.title = "|Z|² distribution, " + protocol_title(config.protocol) +
                 ", M=" + std::to_string(config.repetitions);
    if (plot) svg_text = render_scan_svg(z.plot, opts);
    resolved = z.provenance;
  } else if (config.command == "unit-check") {
    const double omega = constants::pi / config.pulse_duration;
    const UnitSpec uspec = unit_spec_from(config, config.tau());
    const PulseUnit unit = uspec.build(uspec.tau);
    ControlError err;
    err.detuning = config.detuning_over_omega * omega;
    err.rabi_scale = config.rabi_scale;

    const UnitErrorConstant uec = unit_error_constant(unit, err, omega);
    SpinSystem bare;
    const PulseParams params = extract_pulse_params(
        pulse_propagator(bare, err, omega, unit.events.front()),
        unit.events.front().phase);

    write_csv(csv,
              {"epsilon", "c_real", "c_imag", "c_abs", "alpha", "beta",
               "residual"},
              {{uec.epsilon},
               {uec.c.real()},
               {uec.c.imag()},
               {std::abs(uec.c)},
               {params.alpha},
               {params.beta},
               {params.residual}});
    resolved["experiment"] = "unit_check";
    resolved["unit"]["label"] = unit.label;
    resolved["unit"]["n_pulses"] = unit.n_pulses();
    resolved["unit"]["tau_s"] = config.tau();
    resolved["unit"]["pulse_duration_s"] = config.pulse_duration;
    resolved["omega_rad_per_s"] = omega;
    resolved["detuning_rad_per_s"] = err.detuning;
    resolved["rabi_scale"] = err.rabi_scale;
    resolved["epsilon"] = uec.epsilon;
    resolved["degenerate"] = uec.degenerate;
  } else {
    throw std::invalid_argument("execute_run: unknown command '" +
                                config.command + "'");
  }

  resolved["spacing_convention"] = config.spacing_convention;
  if (config.pulse_spacing > 0) {
    resolved["pulse_spacing_s"] = config.pulse_spacing;
    resolved["tau_s"] = config.tau();
  }

  RunPaths paths;
  paths.csv = config.prefix + ".csv";
  paths.meta = config.prefix + ".meta.json";
  write_text_file(paths.csv, csv.str());
  if (!svg_text.empty()) {
    paths.svg = config.prefix + ".svg";
    write_text_file(paths.svg, svg_text);
  }

  json meta;
  meta["command"] = config.command;
  meta["config_text"] = config.config_text;
  meta["overrides"]["seed"] =
      overrides.seed ? json(*overrides.seed) : json(nullptr);
  meta["overrides"]["threads"] = threads;
  meta["overrides"]["plot"] = overrides.plot;
  meta["effective_seed"] = seed;
  meta["resolved"] = resolved;
  meta["outputs"]["csv"] = std::filesystem::path(paths.csv).filename().string();
  meta["outputs"]["svg"] =
      paths.svg.empty()
          ? json(nullptr)
          : json(std::filesystem::path(paths.svg).filename().string());
  meta["generator"] = generator_info();
  write_text_file(paths.meta, meta.dump(2) + "\n");
  return paths;
}

RunPaths rerun_from_meta(const std::string& meta_path,
                         const std::string& new_prefix) {
  std::ifstream in(meta_path);
  if (!in)
    throw std::runtime_error("cannot open sidecar '" + meta_path + "'");
  json meta = json::parse(in);

  RunConfig config = parse_config(meta.at("config_text").get<std::string>(),
                                  meta_path, meta.at("command").get<std::string>());
  config.prefix = new_prefix;

  RunOverrides overrides;
  if (!meta.at("overrides").at("seed").is_null())
    overrides.seed = meta["overrides"]["seed"].get<std::uint64_t>();
  overrides.threads = meta.at("overrides").at("threads").get<int>();
  overrides.plot = meta.at("overrides").at("plot").get<bool>();
  return execute_run(config, overrides);
}

}  // namespace ddsim

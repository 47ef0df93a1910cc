#include <doctest.h>

#include <algorithm>
#include <clocale>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddsim/config.hpp"
#include "ddsim/constants.hpp"
#include "ddsim/csvio.hpp"
#include "ddsim/run.hpp"
#include "ddsim/svg.hpp"
#include "helpers.hpp"

using namespace ddsim;
using ddsim::testing::contains;
namespace fs = std::filesystem;

namespace {

// every parse error joined, empty if the text parses
std::string parse_errors(const std::string& text,
                         const std::string& hint = "") {
  try {
    parse_config(text, "test.ini", hint);
  } catch (const ConfigError& e) {
    std::string all;
    for (const auto& msg : e.errors) all += msg + "\n";
    return all;
  }
  return "";
}

fs::path fresh_dir(const char* tag) {
  const fs::path dir =
      fs::temp_directory_path() / (std::string("ddsim_") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

const char* map_config =
    "command = fidelity-map\n"
    "[sequence]\n"
    "unit = xy8\n"
    "pulse_duration = 15 ns\n"
    "pulse_spacing = 200 ns\n"
    "repetitions = 6\n"
    "[protocol]\n"
    "protocol = randomized\n"
    "[grid]\n"
    "detuning_steps = 3\n"
    "amplitude_steps = 3\n"
    "[monte_carlo]\n"
    "realizations = 4\n"
    "seed = 11\n"
    "[output]\n"
    "prefix = PREFIX\n";

const char* zstats_config =
    "command = zstats\n"
    "[protocol]\n"
    "protocol = correlated\n"
    "elimination_size = 2\n"
    "[zstats]\n"
    "repetitions = 6\n"
    "samples = 2000\n"
    "bins = 10\n"
    "[monte_carlo]\n"
    "seed = 3\n"
    "[output]\n"
    "prefix = PREFIX\n";

const char* scan_config =
    "command = spectroscopy\n"
    "[sequence]\n"
    "unit = xy8\n"
    "pulse_duration = 100 ns\n"
    "total_pulses = 8\n"
    "[protocol]\n"
    "protocol = standard\n"
    "[errors]\n"
    "detuning_over_omega = 0.1\n"
    "rabi_scale = 1.1\n"
    "[scan]\n"
    "frequency_min = 1690 kHz\n"
    "frequency_max = 1710 kHz\n"
    "frequency_steps = 3\n"
    "[system]\n"
    "b_field = 400 G\n"
    "nucleus = 1H 2 kHz 4 kHz\n"
    "[monte_carlo]\n"
    "realizations = 2\n"
    "[output]\n"
    "prefix = PREFIX\n";

std::string with_prefix(const char* text, const fs::path& prefix) {
  std::string out(text);
  out.replace(out.find("PREFIX"), 6, prefix.string());
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("a full map config parses with defaults applied") {
  const RunConfig c = parse_config(map_config, "test.ini");
  CHECK(c.command == "fidelity-map");
  CHECK(c.unit == UnitKind::xy8);
  CHECK(c.pulse_duration == doctest::Approx(15e-9).epsilon(1e-12));
  CHECK(c.pulse_spacing == doctest::Approx(200e-9).epsilon(1e-12));
  // edge-to-edge spacing by default: tau adds the pulse width
  CHECK(c.tau() == doctest::Approx(215e-9).epsilon(1e-12));
  CHECK(c.repetitions == 6);
  CHECK(c.protocol.kind == ProtocolKind::randomized);
  CHECK(c.detuning_min == -0.3);
  CHECK(c.detuning_steps == 3);
  CHECK(c.realizations == 4);
  CHECK(c.seed == 11);
  CHECK(c.plot);
}

TEST_CASE("center convention uses the spacing as tau directly") {
  std::string text(map_config);
  text += "[sequence]\nspacing_convention = center\n";
  const RunConfig c = parse_config(text, "test.ini");
  CHECK(c.tau() == doctest::Approx(200e-9).epsilon(1e-12));
}

TEST_CASE("times must carry units") {
  std::string text(map_config);
  const auto pos = text.find("pulse_spacing = 200 ns\n");
  text.replace(pos, 23, "tau = 200\n");
  const std::string errs = parse_errors(text);
  CHECK(contains(errs, "missing unit at line"));
  CHECK(contains(errs, "expected a time, e.g. '200 ns'"));
}

TEST_CASE("an empty config lists every missing key at once") {
  const std::string errs = parse_errors("", "fidelity-map");
  CHECK(contains(errs, "missing required key '[sequence] unit'"));
  CHECK(contains(errs, "missing required key '[sequence] pulse_duration'"));
  CHECK(contains(errs, "missing required key '[sequence] pulse_spacing'"));
  CHECK(contains(errs, "missing required key '[sequence] repetitions'"));
  CHECK(contains(errs, "missing required key '[protocol] protocol'"));
  CHECK(contains(errs, "missing required key '[output] prefix'"));
}

TEST_CASE("unknown keys, commands and duplicates are flagged") {
  CHECK(contains(parse_errors(std::string(map_config) + "typo_key = 1\n"),
                 "unknown key '[output] typo_key'"));
  CHECK(contains(parse_errors("command = fidelity-mop\n"),
                 "unknown command 'fidelity-mop' (expected one of "
                 "fidelity-map, diff-map, spectroscopy, zstats, unit-check)"));
  CHECK(contains(parse_errors(std::string(map_config) + "[output]\nprefix = x\n"),
                 "duplicate key '[output] prefix'"));
  CHECK(contains(parse_errors(map_config, "zstats"),
                 "config says command 'fidelity-map' but the CLI invoked "
                 "'zstats'"));
}

TEST_CASE("dimensionless keys reject units") {
  std::string bad(map_config);
  bad += "[grid]\ndetuning_min = -0.3 ns\n";
  const std::string errs = parse_errors(bad);
  CHECK(contains(errs, "is dimensionless, drop the unit 'ns'"));
}

TEST_CASE("protocol constraints are enforced") {
  std::string no_g(map_config);
  no_g.replace(no_g.find("protocol = randomized"), 21,
               "protocol = correlated");
  CHECK(contains(parse_errors(no_g),
                 "missing required key '[protocol] elimination_size'"));

  std::string stray_g(map_config);
  stray_g.replace(stray_g.find("protocol = randomized"), 21,
                  "protocol = randomized\nelimination_size = 2");
  CHECK(contains(parse_errors(stray_g),
                 "elimination_size applies to the correlated protocol only"));

  std::string too_big(map_config);
  too_big.replace(too_big.find("protocol = randomized"), 21,
                  "protocol = correlated\nelimination_size = 12");
  CHECK(contains(parse_errors(too_big),
                 "elimination_size exceeds the number of repetitions"));

  std::string unknown(map_config);
  unknown.replace(unknown.find("protocol = randomized"), 21,
                  "protocol = shuffled    ");
  CHECK(contains(parse_errors(unknown), "unknown protocol 'shuffled'"));
}

TEST_CASE("spectroscopy derives its spacing from the scan axis") {
  std::string text(scan_config);
  text += "[sequence]\npulse_spacing = 200 ns\n";
  CHECK(contains(parse_errors(text), "derives the spacing"));
}

TEST_CASE("nucleus entries follow the label-couplings grammar") {
  const RunConfig c = parse_config(scan_config, "test.ini");
  REQUIRE(c.nuclei.size() == 1);
  CHECK(c.nuclei[0].label == "1H");

  std::string two(scan_config);
  two.replace(two.find("nucleus = 1H 2 kHz 4 kHz\n"), 25,
              "nucleus = 1H 2 kHz 4 kHz\nnucleus = 13C 10 kHz 200 kHz\n");
  CHECK(parse_config(two, "test.ini").nuclei.size() == 2);

  std::string custom_gamma(scan_config);
  custom_gamma.replace(custom_gamma.find("nucleus = 1H 2 kHz 4 kHz\n"), 25,
                       "nucleus = 19F 2 kHz 4 kHz 4.0052 kHz/G\n");
  const RunConfig f = parse_config(custom_gamma, "test.ini");
  REQUIRE(f.nuclei.size() == 1);
  CHECK(f.nuclei[0].gamma ==
        doctest::Approx(constants::angular(4005.2)).epsilon(1e-12));

  std::string truncated(scan_config);
  truncated.replace(truncated.find("nucleus = 1H 2 kHz 4 kHz\n"), 25,
                    "nucleus = 1H 2 kHz\n");
  CHECK(contains(parse_errors(truncated), "expected 5 or 7 fields"));

  std::string species(scan_config);
  species.replace(species.find("nucleus = 1H 2 kHz 4 kHz\n"), 25,
                  "nucleus = 31P 2 kHz 4 kHz\n");
  CHECK(contains(parse_errors(species), "unknown species"));
}

TEST_CASE("clip bounds come as a pair") {
  CHECK(contains(parse_errors(std::string(map_config) +
                              "[output]\nclip_min = 0.9\n"),
                 "clip_min and clip_max must be given together"));
  CHECK(contains(parse_errors(std::string(map_config) +
                              "[output]\nclip_min = 0.9\nclip_max = 0.5\n"),
                 "clip_max must exceed clip_min"));
  const RunConfig ok = parse_config(
      std::string(map_config) + "[output]\nclip_min = 0.9\nclip_max = 1\n",
      "test.ini");
  CHECK(ok.clip_min == 0.9);
  CHECK(ok.clip_max == 1.0);
}

TEST_CASE("number formatting round trips and ignores the locale") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-7, 1e300, 0.0, 1.0,
                   100000.0, 215e-9}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-0.5) == "-0.5");
  // a comma-decimal locale must not leak into the output
  const char* previous = std::setlocale(LC_NUMERIC, "de_DE.UTF-8");
  const std::string formatted = format_double(0.5);
  std::setlocale(LC_NUMERIC, "C");
  if (previous != nullptr) CHECK(formatted == "0.5");
}

TEST_CASE("csv output is exact and rejects ragged columns") {
  std::ostringstream out;
  write_csv(out, {"a", "b"}, {{1.0, 2.5}, {3.0, -0.25}});
  CHECK(out.str() == "a,b\n1,3\n2.5,-0.25\n");
  std::ostringstream sink;
  CHECK_THROWS_AS(write_csv(sink, {"a"}, {{1.0}, {2.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(write_csv(sink, {"a", "b"}, {{1.0}, {2.0, 3.0}}),
                  std::invalid_argument);
}

TEST_CASE("svg rendering degrades gracefully on degenerate scans") {
  ScanResult scan;
  scan.axis1_name = "x";
  scan.axis1_label = "x";
  scan.axis1 = {1.0};
  scan.value_name = "y";
  scan.values = {0.5};
  scan.stderrs = {0.0};
  CHECK(render_scan_svg(scan, PlotOptions{}) == "");

  scan.axis1 = {1.0, 1.0};  // zero-width axis
  scan.values = {0.5, 0.6};
  scan.stderrs = {0.0, 0.0};
  CHECK(render_scan_svg(scan, PlotOptions{}) == "");

  scan.axis1 = {1.0, 2.0};
  scan.axis2_name = "z";
  scan.axis2 = {1.0};  // single heatmap column
  CHECK(render_scan_svg(scan, PlotOptions{}) == "");
}

TEST_CASE("svg rendering emits self-contained markup") {
  ScanResult map;
  map.axis1_name = "detuning_over_omega";
  map.axis1_label = "detuning";
  map.axis1 = {-0.1, 0.0, 0.1};
  map.axis2_name = "relative_amp_error";
  map.axis2_label = "amplitude";
  map.axis2 = {-0.1, 0.0, 0.1};
  map.value_name = "fidelity";
  map.values = {0.91, 0.95, 0.99, 0.95, 1.0, 0.95, 0.99, 0.95, 0.91};
  map.stderrs.assign(9, 0.0);
  PlotOptions opts;
  opts.title = "robustness map";
  const std::string svg = render_scan_svg(map, opts);
  CHECK(contains(svg, "<svg"));
  CHECK(contains(svg, "</svg>"));
  CHECK(contains(svg, "robustness map"));
  CHECK(contains(svg, "detuning"));
  CHECK(!contains(svg, "nan"));

  // constant data still renders
  map.values.assign(9, 1.0);
  CHECK(contains(render_scan_svg(map, opts), "</svg>"));

  // diverging palette for signed data
  map.values = {-0.1, 0.0, 0.1, 0.0, 0.0, 0.0, 0.1, 0.0, -0.1};
  PlotOptions div;
  div.diverging = true;
  CHECK(contains(render_scan_svg(map, div), "</svg>"));

  // line plot with reference overlay
  ScanResult line;
  line.axis1_name = "dd_frequency_khz";
  line.axis1_label = "DD frequency (kHz)";
  line.axis1 = {1.0, 2.0, 3.0};
  line.value_name = "signal";
  line.values = {0.99, 0.97, 0.99};
  line.stderrs = {0.001, 0.001, 0.001};
  line.ideal = {1.0, 0.98, 1.0};
  const std::string plot = render_scan_svg(line, PlotOptions{});
  CHECK(contains(plot, "polyline"));
  CHECK(contains(plot, "ideal"));
}

TEST_CASE("zstats runs end to end with the documented csv schema") {
  const fs::path dir = fresh_dir("zstats");
  const RunConfig c =
      parse_config(with_prefix(zstats_config, dir / "z"), "test.ini");
  const RunPaths paths = execute_run(c, RunOverrides{});
  CHECK(fs::exists(paths.csv));
  CHECK(fs::exists(paths.svg));
  CHECK(fs::exists(paths.meta));
  const std::string csv = slurp(paths.csv);
  CHECK(first_line(csv) ==
        "zsq_bin_lower,zsq_bin_upper,count,density,sample_mean,expected_mean");
  // correlated g=2 at m=6: z vanishes, everything lands in the first bin
  std::istringstream rows(csv);
  std::string header, row1;
  std::getline(rows, header);
  std::getline(rows, row1);
  CHECK(contains(row1, ",2000,"));
}

TEST_CASE("fidelity maps write the documented csv header") {
  const fs::path dir = fresh_dir("map");
  const RunConfig c =
      parse_config(with_prefix(map_config, dir / "m"), "test.ini");
  const RunPaths paths = execute_run(c, RunOverrides{});
  CHECK(first_line(slurp(paths.csv)) ==
        "detuning_over_omega,relative_amp_error,fidelity,stderr");
  CHECK(fs::exists(paths.svg));
  const auto meta = nlohmann::json::parse(slurp(paths.meta));
  CHECK(meta["command"] == "fidelity-map");
  CHECK(meta["effective_seed"] == 11);
  CHECK(meta["resolved"]["spacing_convention"] == "edge");
}

TEST_CASE("spectroscopy writes signal and reference columns") {
  const fs::path dir = fresh_dir("scan");
  const RunConfig c =
      parse_config(with_prefix(scan_config, dir / "s"), "test.ini");
  const RunPaths paths = execute_run(c, RunOverrides{});
  const std::string csv = slurp(paths.csv);
  CHECK(first_line(csv) == "dd_frequency_khz,signal,signal_ideal,stderr");
  // three frequency points -> header plus three rows
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("unit-check reports the extracted pulse parameters") {
  const fs::path dir = fresh_dir("unitcheck");
  const std::string text =
      "command = unit-check\n"
      "[sequence]\n"
      "unit = xy8\n"
      "pulse_duration = 15 ns\n"
      "pulse_spacing = 200 ns\n"
      "[errors]\n"
      "detuning_over_omega = 0.001\n"
      "[output]\n"
      "prefix = " +
      (dir / "u").string() + "\n";
  const RunPaths paths = execute_run(parse_config(text, "test.ini"),
                                     RunOverrides{});
  const std::string csv = slurp(paths.csv);
  CHECK(first_line(csv) == "epsilon,c_real,c_imag,c_abs,alpha,beta,residual");
  std::istringstream rows(csv);
  std::string header, row;
  std::getline(rows, header);
  std::getline(rows, row);
  const double epsilon = std::strtod(row.c_str(), nullptr);
  CHECK(epsilon == doctest::Approx(0.001).epsilon(0.01));
}

TEST_CASE("a sidecar reruns to a byte-identical csv") {
  const fs::path dir = fresh_dir("rerun");
  const RunConfig c =
      parse_config(with_prefix(map_config, dir / "orig"), "test.ini");
  RunOverrides overrides;
  overrides.seed = 99;
  const RunPaths original = execute_run(c, overrides);

  const auto meta = nlohmann::json::parse(slurp(original.meta));
  CHECK(meta["effective_seed"] == 99);
  CHECK(meta["overrides"]["seed"] == 99);

  const RunPaths again =
      rerun_from_meta(original.meta, (dir / "copy").string());
  CHECK(slurp(again.csv) == slurp(original.csv));
  CHECK(again.csv != original.csv);
}

TEST_CASE("plots can be disabled per run") {
  const fs::path dir = fresh_dir("noplot");
  const RunConfig c =
      parse_config(with_prefix(zstats_config, dir / "z"), "test.ini");
  RunOverrides overrides;
  overrides.plot = false;
  const RunPaths paths = execute_run(c, overrides);
  CHECK(paths.svg.empty());
  CHECK(!fs::exists((dir / "z").string() + ".svg"));
}

TEST_CASE("linspace covers both endpoints") {
  const auto xs = linspace(-0.3, 0.3, 61);
  REQUIRE(xs.size() == 61);
  CHECK(xs.front() == -0.3);
  CHECK(xs.back() == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(std::abs(xs[30]) < 1e-15);
  CHECK(linspace(2.0, 5.0, 1) == std::vector<double>{2.0});
}

TEST_CASE("config files load from disk with a helpful failure") {
  const fs::path dir = fresh_dir("cfgfile");
  const fs::path path = dir / "run.ini";
  std::ofstream(path) << map_config;
  const RunConfig c = load_config_file(path.string());
  CHECK(c.command == "fidelity-map");
  CHECK(contains(ddsim::testing::thrown([&] {
          load_config_file((dir / "absent.ini").string());
        }),
        "cannot open config file"));
}

}  // TEST_SUITE

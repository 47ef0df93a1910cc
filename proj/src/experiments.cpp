#include "ddsim/experiments.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ddsim/analysis.hpp"
#include "ddsim/constants.hpp"
#include "ddsim/rng.hpp"

namespace ddsim {

namespace {

std::string axis_error(const char* name, const char* what) {
  std::ostringstream os;
  os << name << " axis " << what;
  return os.str();
}

void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) throw std::invalid_argument(axis_error(name, "is empty"));
  for (double v : axis)
    if (!std::isfinite(v))
      throw std::invalid_argument(axis_error(name, "contains a non-finite value"));
}

void check_increasing(const std::vector<double>& axis, const char* name) {
  for (std::size_t k = 1; k < axis.size(); ++k)
    if (!(axis[k] > axis[k - 1]))
      throw std::invalid_argument(axis_error(name, "must be strictly increasing"));
}

nlohmann::json protocol_json(const PhaseProtocol& protocol) {
  nlohmann::json j;
  j["name"] = protocol_name(protocol.kind);
  if (protocol.kind == ProtocolKind::correlated)
    j["elimination_size"] = protocol.elimination_size;
  return j;
}

nlohmann::json unit_json(const UnitSpec& unit) {
  nlohmann::json j;
  j["label"] = unit_kind_name(unit.kind);
  j["n_pulses"] = unit.n_pulses;
  j["pulse_duration_s"] = unit.pulse_duration;
  if (unit.tau > 0.0) j["tau_s"] = unit.tau;
  return j;
}

// mean and standard error of the mean over phase realizations at one point
struct Accumulator {
  double sum = 0.0;
  double sumsq = 0.0;
  int n = 0;

  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }
  double mean() const { return n > 0 ? sum / n : 0.0; }
  double stderr_mean() const {
    if (n < 2) return 0.0;
    double var = (sumsq - sum * sum / n) / (n - 1);
    return std::sqrt(std::max(0.0, var) / n);
  }
};

int effective_realizations(const PhaseProtocol& protocol, int requested) {
  // standard phases are deterministic, one evaluation suffices
  return protocol.kind == ProtocolKind::standard ? 1 : requested;
}

}  // namespace

PulseUnit UnitSpec::build(double tau_override) const {
  return build_unit(kind, n_pulses, tau_override, pulse_duration, custom_phases,
                    presets ? &*presets : nullptr);
}

void validate(const FidelityMapSpec& spec) {
  if (spec.repetitions < 1)
    throw std::invalid_argument("repetitions must be at least 1");
  if (spec.realizations < 1)
    throw std::invalid_argument("realizations must be at least 1");
  if (spec.omega <= 0.0)
    throw std::invalid_argument("nominal Rabi frequency must be positive");
  if (spec.unit.tau <= 0.0)
    throw std::invalid_argument("pulse spacing tau must be positive");
  if (spec.unit.pulse_duration <= 0.0)
    throw std::invalid_argument("pulse duration must be positive");
  check_axis(spec.detuning_axis, "detuning");
  check_axis(spec.amplitude_axis, "amplitude");
  check_increasing(spec.detuning_axis, "detuning");
  check_increasing(spec.amplitude_axis, "amplitude");
  for (double a : spec.amplitude_axis)
    if (a <= -1.0)
      throw std::invalid_argument(
          "relative amplitude error must stay above -1 (zero drive)");
  spec.unit.build(spec.unit.tau);  // surfaces unit construction errors early
}

void validate(const SpectroscopySpec& spec) {
  if (spec.total_pulses < 1)
    throw std::invalid_argument("total_pulses must be at least 1");
  if (spec.realizations < 1)
    throw std::invalid_argument("realizations must be at least 1");
  if (spec.unit.pulse_duration <= 0.0)
    throw std::invalid_argument("pulse duration must be positive");
  if (spec.total_pulses % spec.unit.n_pulses != 0) {
    std::ostringstream os;
    os << "total_pulses (" << spec.total_pulses
       << ") must be a multiple of the unit size (" << spec.unit.n_pulses
       << ")";
    throw std::invalid_argument(os.str());
  }
  check_axis(spec.frequency_axis_hz, "frequency");
  for (double f : spec.frequency_axis_hz) {
    if (f <= 0.0) {
      std::ostringstream os;
      os << "DD frequency " << f << " Hz is not positive";
      throw std::invalid_argument(os.str());
    }
    // tau = 1/(2f) must leave room for the pulse itself
    double tau = 1.0 / (2.0 * f);
    if (tau <= spec.unit.pulse_duration) {
      std::ostringstream os;
      os << "DD frequency " << f << " Hz gives pulse spacing " << tau
         << " s, shorter than the pulse duration " << spec.unit.pulse_duration
         << " s";
      throw std::invalid_argument(os.str());
    }
  }
  if (spec.system.n_nuclei() == 0)
    throw std::invalid_argument("spectroscopy needs at least one nuclear spin");
}

void parallel_for_index(std::size_t count, int threads,
                        const std::function<void(std::size_t)>& fn) {
  if (threads < 1) threads = 1;
  std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          fn(i);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ScanResult run_fidelity_map(const FidelityMapSpec& spec, int threads) {
  validate(spec);

  const PulseUnit unit = spec.unit.build(spec.unit.tau);
  const int reals = effective_realizations(spec.protocol, spec.realizations);
  const std::size_t n1 = spec.detuning_axis.size();
  const std::size_t n2 = spec.amplitude_axis.size();
  const std::size_t n_points = n1 * n2;

  // error-free qubit, |+x> survival
  SpinSystem bare;
  const QuantumState psi0 = QuantumState::plus_x();

  ScanResult out;
  out.axis1_name = "detuning_over_omega";
  out.axis1_label = "detuning (Ω)";
  out.axis1 = spec.detuning_axis;
  out.axis2_name = "relative_amp_error";
  out.axis2_label = "amplitude error";
  out.axis2 = spec.amplitude_axis;
  out.value_name = "fidelity";
  out.values.assign(n_points, 0.0);
  out.stderrs.assign(n_points, 0.0);

  parallel_for_index(n_points, threads, [&](std::size_t p) {
    const std::size_t i = p / n2;
    const std::size_t j = p % n2;
    ControlError err;
    err.detuning = spec.detuning_axis[i] * spec.omega;
    err.rabi_scale = 1.0 + spec.amplitude_axis[j];

    // one faulty-unit propagator per point; phase realizations reuse it
    const ComplexMatrix u0 = unit_propagator(bare, unit, err, spec.omega);
    const std::uint64_t point_seed = derive_seed(spec.seed, p);

    Accumulator acc;
    PhaseProtocol protocol = spec.protocol;
    for (int r = 0; r < reals; ++r) {
      protocol.seed = derive_seed(point_seed, static_cast<std::uint64_t>(r));
      const std::vector<double> phases =
          generate_phases(protocol, spec.repetitions);
      const ComplexMatrix u = repeat_with_phases(u0, phases);
      acc.add(survival_probability(u, psi0));
    }
    out.values[p] = acc.mean();
    out.stderrs[p] = acc.stderr_mean();
  });

  out.provenance["experiment"] = "fidelity_map";
  out.provenance["unit"] = unit_json(spec.unit);
  out.provenance["repetitions"] = spec.repetitions;
  out.provenance["protocol"] = protocol_json(spec.protocol);
  out.provenance["realizations"] = reals;
  out.provenance["seed"] = spec.seed;
  out.provenance["omega_rad_per_s"] = spec.omega;
  return out;
}

ScanResult run_difference_map(const FidelityMapSpec& spec_a,
                              const FidelityMapSpec& spec_b, int threads) {
  if (spec_a.detuning_axis != spec_b.detuning_axis ||
      spec_a.amplitude_axis != spec_b.amplitude_axis)
    throw std::invalid_argument(
        "difference map requires both scans to share the same grid axes");

  ScanResult a = run_fidelity_map(spec_a, threads);
  ScanResult b = run_fidelity_map(spec_b, threads);

  ScanResult out = a;
  out.value_name = "fidelity_difference";
  for (std::size_t p = 0; p < out.values.size(); ++p) {
    out.values[p] = b.values[p] - a.values[p];
    out.stderrs[p] = std::hypot(a.stderrs[p], b.stderrs[p]);
  }
  out.provenance = nlohmann::json();
  out.provenance["experiment"] = "difference_map";
  out.provenance["baseline"] = a.provenance;
  out.provenance["comparison"] = b.provenance;
  return out;
}

ScanResult run_spectroscopy(const SpectroscopySpec& spec, int threads) {
  validate(spec);

  const int reps = spec.total_pulses / spec.unit.n_pulses;
  const int reals = effective_realizations(spec.protocol, spec.realizations);
  const std::size_t n_points = spec.frequency_axis_hz.size();
  const double omega =
      spec.omega > 0.0 ? spec.omega : constants::pi / spec.unit.pulse_duration;

  ScanResult out;
  out.axis1_name = "dd_frequency_khz";
  out.axis1_label = "DD frequency (kHz)";
  out.axis1.resize(n_points);
  for (std::size_t p = 0; p < n_points; ++p)
    out.axis1[p] = spec.frequency_axis_hz[p] / 1e3;
  out.value_name = "signal";
  out.values.assign(n_points, 0.0);
  out.stderrs.assign(n_points, 0.0);
  out.ideal.assign(n_points, 0.0);

  const ControlError no_error;

  parallel_for_index(n_points, threads, [&](std::size_t p) {
    const double tau = 1.0 / (2.0 * spec.frequency_axis_hz[p]);
    const PulseUnit unit = spec.unit.build(tau);

    // faulty-unit propagator, reused across phase realizations
    const ComplexMatrix u0 =
        unit_propagator(spec.system, unit, spec.error, omega);
    const std::uint64_t point_seed = derive_seed(spec.seed, p);

    Accumulator acc;
    PhaseProtocol protocol = spec.protocol;
    for (int r = 0; r < reals; ++r) {
      protocol.seed = derive_seed(point_seed, static_cast<std::uint64_t>(r));
      const std::vector<double> phases = generate_phases(protocol, reps);
      const ComplexMatrix u = repeat_with_phases(u0, phases);
      acc.add(population_signal(spec.system, u));
    }
    out.values[p] = acc.mean();
    out.stderrs[p] = acc.stderr_mean();

    // ideal reference: instantaneous error-free pulses, standard phases
    const ComplexMatrix u0_ideal =
        ideal_unit_propagator(spec.system, unit);
    const std::vector<double> zeros(reps, 0.0);
    out.ideal[p] =
        population_signal(spec.system, repeat_with_phases(u0_ideal, zeros));
  });

  out.provenance["experiment"] = "spectroscopy";
  out.provenance["unit"] = unit_json(spec.unit);
  out.provenance["total_pulses"] = spec.total_pulses;
  out.provenance["repetitions"] = reps;
  out.provenance["protocol"] = protocol_json(spec.protocol);
  out.provenance["realizations"] = reals;
  out.provenance["seed"] = spec.seed;
  out.provenance["omega_rad_per_s"] = omega;
  out.provenance["detuning_rad_per_s"] = spec.error.detuning;
  out.provenance["rabi_scale"] = spec.error.rabi_scale;
  nlohmann::json nuclei = nlohmann::json::array();
  for (const auto& n : spec.system.nuclei) {
    nlohmann::json jn;
    jn["label"] = n.label;
    jn["a_perp_rad_per_s"] = n.a_perp;
    jn["a_par_rad_per_s"] = n.a_par;
    jn["gamma_rad_per_s_per_gauss"] = n.gamma;
    nuclei.push_back(jn);
  }
  out.provenance["nuclei"] = nuclei;
  out.provenance["b_field_gauss"] = spec.system.b_field;
  return out;
}

}  // namespace ddsim

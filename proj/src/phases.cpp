#include "ddsim/phases.hpp"

#include <cmath>
#include <stdexcept>

#include "ddsim/constants.hpp"
#include "ddsim/rng.hpp"
#include "ddsim/sequence.hpp"

namespace ddsim {

using constants::two_pi;

const char* protocol_name(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::standard: return "standard";
    case ProtocolKind::randomized: return "randomized";
    case ProtocolKind::correlated: return "correlated";
  }
  return "?";
}

std::vector<double> generate_phases(const PhaseProtocol& protocol,
                                    int repetitions) {
  if (repetitions < 1)
    throw std::invalid_argument("generate_phases: repetitions must be >= 1");

  const int m = repetitions;
  std::vector<double> phases(m, 0.0);

  switch (protocol.kind) {
    case ProtocolKind::standard:
      return phases;

    case ProtocolKind::randomized: {
      Xoshiro256 rng(protocol.seed);
      for (double& p : phases) p = rng.uniform_angle();
      return phases;
    }

    case ProtocolKind::correlated: {
      const int g = protocol.elimination_size;
      if (g <= 1 || g > m)
        throw std::invalid_argument(
            "generate_phases: correlated protocol requires an elimination "
            "size G with 1 < G <= M");
      Xoshiro256 rng(protocol.seed);
      int start = 0;
      for (; start + g <= m; start += g) {
        // rotated roots of unity: exact cancellation, uniform marginals
        const double theta = rng.uniform_angle();
        for (int j = 0; j < g; ++j)
          phases[start + j] = wrap_angle(theta + two_pi * j / g);
        // Fisher-Yates within the group removes ordering bias
        for (int j = g - 1; j > 0; --j) {
          const auto k = static_cast<int>(rng.bounded(j + 1));
          std::swap(phases[start + j], phases[start + k]);
        }
      }
      for (; start < m; ++start) phases[start] = rng.uniform_angle();
      return phases;
    }
  }
  throw std::invalid_argument("generate_phases: unknown protocol kind");
}

std::complex<double> z_statistic(std::span<const double> phases) {
  if (phases.empty())
    throw std::invalid_argument("z_statistic: empty phase list");
  std::complex<double> sum = 0.0;
  for (double p : phases) sum += std::complex<double>(std::cos(p), -std::sin(p));
  return sum / static_cast<double>(phases.size());
}

}  // namespace ddsim

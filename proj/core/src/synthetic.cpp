#include "admd/synthetic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "admd/error.hpp"

namespace admd {

SyntheticKind parse_synthetic_kind(const std::string& name) {
  if (name == "single-tone") return SyntheticKind::SingleTone;
  if (name == "two-tone") return SyntheticKind::TwoTone;
  if (name == "quasi-periodic") return SyntheticKind::QuasiPeriodic;
  if (name == "tone-noise") return SyntheticKind::ToneNoise;
  fail(ErrorKind::InvalidInput, "unknown synthetic kind '" + name + "'");
}

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::SingleTone: return "single-tone";
    case SyntheticKind::TwoTone: return "two-tone";
    case SyntheticKind::QuasiPeriodic: return "quasi-periodic";
    case SyntheticKind::ToneNoise: return "tone-noise";
  }
  return "unknown";
}

SyntheticRecord generate_synthetic_record(SyntheticKind kind, Index variables, Index steps, std::uint64_t seed,
                                          const SyntheticOptions& options) {
  if (variables < 1) fail(ErrorKind::InvalidInput, "need at least one variable");
  if (steps < 4 * Index(options.steps_per_wave)) {
    fail(ErrorKind::InvalidInput, "synthetic records need at least four waves");
  }
  using std::numbers::pi;
  constexpr double golden = std::numbers::phi;
  const double period = options.steps_per_wave * options.dt;
  const double base = 2.0 * pi / period;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  Eigen::MatrixXd clean(variables, steps);
  for (Index i = 0; i < variables; ++i) {
    std::vector<std::array<double, 3>> tones;  // amplitude, angular frequency, phase
    switch (kind) {
      case SyntheticKind::SingleTone:
      case SyntheticKind::ToneNoise:
        tones.push_back({uniform(0.5, 1.5), base, uniform(0.0, 2.0 * pi)});
        break;
      case SyntheticKind::TwoTone:
        tones.push_back({uniform(0.5, 1.5), base, uniform(0.0, 2.0 * pi)});
        tones.push_back({uniform(0.5, 1.5), base * golden, uniform(0.0, 2.0 * pi)});
        break;
      case SyntheticKind::QuasiPeriodic: {
        const std::array<double, 6> ratios{1.0, golden, std::numbers::sqrt2, 1.0 / golden, std::numbers::sqrt3,
                                           1.0 / std::sqrt(5.0)};
        tones.push_back({uniform(1.0, 1.5), base * ratios[0], uniform(0.0, 2.0 * pi)});
        for (std::size_t k = 1; k < ratios.size(); ++k) {
          tones.push_back({uniform(0.2, 0.6), base * ratios[k], uniform(0.0, 2.0 * pi)});
        }
        tones.push_back({uniform(0.5, 1.0), base / options.drift_waves, uniform(0.0, 2.0 * pi)});
        break;
      }
    }
    for (Index k = 0; k < steps; ++k) {
      const double t = double(k) * options.dt;
      double value = 0.0;
      for (const auto& [amplitude, omega, phase] : tones) value += amplitude * std::sin(omega * t + phase);
      clean(i, k) = value;
    }
  }

  std::optional<double> snr = options.snr_db;
  if (!snr && kind == SyntheticKind::ToneNoise) snr = 20.0;
  Eigen::MatrixXd values = clean;
  if (snr) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Index i = 0; i < variables; ++i) {
      const double power = clean.row(i).squaredNorm() / double(steps);
      const double sigma = std::sqrt(power / std::pow(10.0, *snr / 10.0));
      for (Index k = 0; k < steps; ++k) values(i, k) += sigma * gauss(rng);
    }
  }

  std::vector<std::string> names;
  for (Index i = 0; i < variables; ++i) names.push_back("x" + std::to_string(i + 1));
  return {TimeSeries(std::move(values), options.dt, std::move(names), options.steps_per_wave), std::move(clean)};
}

TimeSeries generate_synthetic(SyntheticKind kind, Index variables, Index steps, std::uint64_t seed,
                              const SyntheticOptions& options) {
  return generate_synthetic_record(kind, variables, steps, seed, options).series;
}

}  // namespace admd

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "admd/timeseries.hpp"

namespace admd {

// Closed forms, with T = steps_per_wave * dt, g the golden ratio and
// a_i, c_i, e_i, phi_i, psi_i, chi_i drawn per variable from the seed:
//
//   SingleTone      x_i(t) = a_i sin(2 pi t / T + phi_i)
//   TwoTone         x_i(t) = a_i sin(2 pi t / T + phi_i) + c_i sin(2 pi g t / T + psi_i)
//   QuasiPeriodic   x_i(t) = sum_k a_ik sin(2 pi f_k t / T + phi_ik)
//                            + e_i sin(2 pi t / (drift_waves T) + chi_i)
//                   with f = {1, g, sqrt(2), 1/g, sqrt(3), 1/sqrt(5)}
//   ToneNoise       SingleTone plus white Gaussian noise at `snr_db`
//
// a_i and c_i lie in [0.5, 1.5]. For QuasiPeriodic the dominant weight a_i0
// lies in [1, 1.5], the other tones in [0.2, 0.6] and e_i in [0.5, 1].
// Phases are uniform in [0, 2 pi). Any kind gets white noise at `snr_db`
// (relative to each variable's mean-square signal) when it is set;
// ToneNoise defaults it to 20 dB.
enum class SyntheticKind { SingleTone, TwoTone, QuasiPeriodic, ToneNoise };

struct SyntheticOptions {
  double dt = 0.1;
  int steps_per_wave = 32;
  std::optional<double> snr_db;
  double drift_waves = 23.7;
};

SyntheticKind parse_synthetic_kind(const std::string& name);
std::string to_string(SyntheticKind kind);

/// Per-variable noise-free signal and the realized record (noise added when
/// requested), so tests can compare against the analytic continuation.
struct SyntheticRecord {
  TimeSeries series;
  Eigen::MatrixXd clean;
};

SyntheticRecord generate_synthetic_record(SyntheticKind kind, Index variables, Index steps, std::uint64_t seed,
                                          const SyntheticOptions& options = {});
TimeSeries generate_synthetic(SyntheticKind kind, Index variables, Index steps, std::uint64_t seed,
                              const SyntheticOptions& options = {});

}  // namespace admd

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "admd/dmd.hpp"
#include "admd/modal.hpp"
#include "admd/timeseries.hpp"

namespace admd {

/// How window start indices are shared between grid cells.
enum class WindowCoupling {
  /// One window draw per NIW, long enough for the largest NOW; every NOW
  /// scores a prefix of the same forecast.
  SharedAcrossNow,
  /// Independent draw per (NIW, NOW) pair.
  PerCell,
};

struct ExperimentConfig {
  std::vector<int> niw_set{1, 2, 4, 8};
  std::vector<int> now_set{1, 2, 4};
  std::vector<int> nde_set{0, 1, 2, 3, 4};
  std::vector<int> nts_set{0, 2, 4, 8, 16};
  Index samples = 1001;
  std::uint64_t seed = 1;
  bool stabilize = true;
  int steps_per_wave = 32;
  WindowCoupling coupling = WindowCoupling::SharedAcrossNow;
  /// Cell whose plain and best setups get modal statistics; 0 picks the
  /// largest NIW / NOW. Modal statistics are skipped when `modal` is false.
  bool modal = true;
  int modal_niw = 0;
  int modal_now = 0;

  void validate() const;
  Index configurations() const;
  /// Largest lead required by any (nde, nts) pair in the grid.
  Index max_lead() const;
};

struct ConfigKey {
  int niw = 0;
  int now = 0;
  int nde = 0;
  int nts = 0;
  auto operator<=>(const ConfigKey&) const = default;
};

enum class Metric { Nrmse = 0, Pearson = 1, Aam = 2, Nammae = 3 };
inline constexpr std::array<Metric, 4> kMetrics{Metric::Nrmse, Metric::Pearson, Metric::Aam, Metric::Nammae};
std::string to_string(Metric metric);

/// Box-plot summary with 1.5 IQR whiskers. Whiskers sit on the most extreme
/// samples inside the fences; samples beyond them are outliers.
struct BoxSummary {
  Index count = 0;
  double lower_whisker = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double upper_whisker = 0.0;
  std::vector<double> outliers;

  static BoxSummary from(std::vector<double> samples);
};

struct CellResult {
  ConfigKey key;
  Index evaluated = 0;
  Index failed = 0;
  std::map<std::string, Index> failures;
  std::array<BoxSummary, 4> metrics;

  const BoxSummary& metric(Metric m) const { return metrics[std::size_t(m)]; }
};

struct ModalResult {
  std::string label;
  ConfigKey key;
  Index failed = 0;
  ModeStatistics statistics;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<std::string> names;
  Index record_steps = 0;
  double dt = 0.0;
  std::vector<CellResult> cells;
  std::vector<ModalResult> modal;

  const CellResult* find(const ConfigKey& key) const;
};

struct RunOptions {
  /// Worker threads; 0 uses the hardware concurrency. Results do not depend
  /// on it.
  unsigned jobs = 1;
};

/// Full-factorial sweep. Per sampled window: standardize on the training
/// segment, augment, fit, optionally stabilize, forecast NOW waves and score
/// the forecast against the standardized test segment. Window failures are
/// counted per cell and never abort the sweep.
ExperimentReport run(const TimeSeries& ts, const ExperimentConfig& config, const RunOptions& options = {});

/// (nde, nts) with the lowest median NRMSE in the (niw, now) cell; ties go
/// to fewer derivatives, then fewer shifts.
std::pair<int, int> best_setup(const ExperimentReport& report, int niw, int now);

/// Fits one window of `record`: training covers niw waves from `start`, the
/// augmentation lead comes from the steps before it, and standardization
/// uses the training steps only. The model carries names, standardization
/// and record coordinates so it can be serialized and replayed.
DmdModel fit_record_window(const TimeSeries& record, Index start, int niw, const AugmentationSpec& spec,
                           const FitOptions& options = {});

/// Seed for the window draw of one (niw, now) group.
std::uint64_t group_seed(std::uint64_t seed, int niw, int now);

}  // namespace admd

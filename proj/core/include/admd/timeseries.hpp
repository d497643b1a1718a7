#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace admd {

using Index = Eigen::Index;

/// Uniformly sampled multivariate record: one row per variable, one column
/// per time step. Window lengths elsewhere in the library are counted in
/// encounter waves of `steps_per_wave` samples.
class TimeSeries {
 public:
  TimeSeries(Eigen::MatrixXd values, double dt, std::vector<std::string> names,
             int steps_per_wave = 32, double t0 = 0.0);

  Index variables() const { return values_.rows(); }
  Index steps() const { return values_.cols(); }
  const Eigen::MatrixXd& values() const { return values_; }
  double dt() const { return dt_; }
  const std::vector<std::string>& names() const { return names_; }
  int steps_per_wave() const { return steps_per_wave_; }
  double wave_period() const { return dt_ * steps_per_wave_; }
  /// Time stamp of the first column.
  double t0() const { return t0_; }
  double time_at(Index step) const { return t0_ + double(step) * dt_; }

  /// Columns [begin, end). Slices may be shorter than two steps.
  TimeSeries slice(Index begin, Index end) const;
  TimeSeries with_values(Eigen::MatrixXd values) const;

 private:
  Eigen::MatrixXd values_;
  double dt_;
  std::vector<std::string> names_;
  int steps_per_wave_;
  double t0_;
};

struct StepRange {
  Index begin = 0;
  Index end = 0;
  Index size() const { return end - begin; }
};

/// Per-variable affine map x -> (x - mean) / std.
struct StandardizationRecord {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;

  StandardizationRecord() = default;
  StandardizationRecord(Eigen::VectorXd mean, Eigen::VectorXd std);

  Eigen::MatrixXd apply(const Eigen::MatrixXd& values) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& standardized) const;
};

struct Standardized {
  TimeSeries series;
  StandardizationRecord record;
};

/// Population mean and standard deviation are taken over `segment` only; the
/// whole series is then transformed with them. Throws ZeroVariance naming the
/// first constant channel.
Standardized standardize(const TimeSeries& ts, StepRange segment);
Standardized standardize(const TimeSeries& ts);
TimeSeries destandardize(const TimeSeries& ts, const StandardizationRecord& record);

struct WindowSpec {
  Index start = 0;
  int niw = 1;
  int now = 1;
  Index lead = 0;

  Index train_steps(int steps_per_wave) const { return Index(niw) * steps_per_wave; }
  Index test_steps(int steps_per_wave) const { return Index(now) * steps_per_wave; }

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

struct WindowSlices {
  TimeSeries history;
  TimeSeries train;
  TimeSeries test;
};

/// history = [start - lead, start), train = [start, start + niw*spw),
/// test follows train immediately for now*spw steps.
WindowSlices extract_window(const TimeSeries& ts, const WindowSpec& w);

/// Inclusive range of start indices for which a window fits.
struct StartRange {
  Index first = 0;
  Index last = -1;
  Index count() const { return last >= first ? last - first + 1 : 0; }
};
StartRange valid_starts(Index steps, int steps_per_wave, int niw, int now, Index lead);

/// Draws `count` start indices uniformly (with replacement) from the valid
/// range. Deterministic for a given seed.
std::vector<WindowSpec> sample_windows(const TimeSeries& ts, int niw, int now, Index lead,
                                       Index count, std::uint64_t seed);

/// CSV with a header row; first column `t` (uniform within 1e-6 relative),
/// one column per variable.
TimeSeries read_csv(std::istream& in, int steps_per_wave = 32);
TimeSeries load_csv(const std::string& path, int steps_per_wave = 32);
void write_csv(std::ostream& out, const TimeSeries& ts);

}  // namespace admd

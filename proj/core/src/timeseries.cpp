#include "admd/timeseries.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <set>

#include "admd/error.hpp"
#include "admd/text.hpp"

namespace admd {

TimeSeries::TimeSeries(Eigen::MatrixXd values, double dt, std::vector<std::string> names,
                       int steps_per_wave, double t0)
    : values_(std::move(values)),
      dt_(dt),
      names_(std::move(names)),
      steps_per_wave_(steps_per_wave),
      t0_(t0) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) fail(ErrorKind::InvalidInput, "time step must be positive");
  if (steps_per_wave_ <= 0) fail(ErrorKind::InvalidInput, "steps_per_wave must be positive");
  if (Index(names_.size()) != values_.rows()) {
    fail(ErrorKind::InvalidInput, "expected " + std::to_string(values_.rows()) + " variable names, got " +
                                      std::to_string(names_.size()));
  }
  std::set<std::string> seen;
  for (const auto& name : names_) {
    if (!seen.insert(name).second) fail(ErrorKind::InvalidInput, "duplicate variable name '" + name + "'");
  }
  for (Index j = 0; j < values_.cols(); ++j) {
    for (Index i = 0; i < values_.rows(); ++i) {
      if (!std::isfinite(values_(i, j))) {
        fail(ErrorKind::InvalidInput,
             "non-finite value in variable '" + names_[std::size_t(i)] + "' at step " + std::to_string(j));
      }
    }
  }
}

TimeSeries TimeSeries::slice(Index begin, Index end) const {
  if (begin < 0 || end < begin || end > steps()) {
    fail(ErrorKind::OutOfBounds, "slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                                     ") outside record of " + std::to_string(steps()) + " steps");
  }
  return TimeSeries(values_.middleCols(begin, end - begin), dt_, names_, steps_per_wave_, time_at(begin));
}

TimeSeries TimeSeries::with_values(Eigen::MatrixXd values) const {
  return TimeSeries(std::move(values), dt_, names_, steps_per_wave_, t0_);
}

StandardizationRecord::StandardizationRecord(Eigen::VectorXd mean_, Eigen::VectorXd std_)
    : mean(std::move(mean_)), std(std::move(std_)) {
  if (mean.size() != std.size()) fail(ErrorKind::InvalidInput, "standardization mean/std size mismatch");
  for (Index i = 0; i < std.size(); ++i) {
    if (!(std(i) > 0.0) || !std::isfinite(std(i)) || !std::isfinite(mean(i))) {
      fail(ErrorKind::ZeroVariance, "standardization scale for variable " + std::to_string(i) + " is not positive");
    }
  }
}

Eigen::MatrixXd StandardizationRecord::apply(const Eigen::MatrixXd& values) const {
  if (values.rows() != mean.size()) fail(ErrorKind::DimensionMismatch, "standardization applied to wrong row count");
  return (values.colwise() - mean).array().colwise() / std.array();
}

Eigen::MatrixXd StandardizationRecord::invert(const Eigen::MatrixXd& standardized) const {
  if (standardized.rows() != mean.size()) {
    fail(ErrorKind::DimensionMismatch, "destandardization applied to wrong row count");
  }
  return (standardized.array().colwise() * std.array()).matrix().colwise() + mean;
}

Standardized standardize(const TimeSeries& ts, StepRange segment) {
  if (segment.begin < 0 || segment.end > ts.steps() || segment.size() < 1) {
    fail(ErrorKind::OutOfBounds, "standardization segment outside the record");
  }
  const auto block = ts.values().middleCols(segment.begin, segment.size());
  const double count = double(segment.size());
  Eigen::VectorXd mean = block.rowwise().sum() / count;
  Eigen::VectorXd stddev(ts.variables());
  for (Index i = 0; i < ts.variables(); ++i) {
    const double variance = (block.row(i).array() - mean(i)).square().sum() / count;
    stddev(i) = std::sqrt(variance);
    const double scale = block.row(i).cwiseAbs().maxCoeff();
    // Anything at the rounding level of the channel magnitude is a constant.
    if (!(stddev(i) > 64.0 * std::numeric_limits<double>::epsilon() * scale)) {
      fail(ErrorKind::ZeroVariance, "variable '" + ts.names()[std::size_t(i)] + "' is constant on the segment");
    }
  }
  StandardizationRecord record(std::move(mean), std::move(stddev));
  auto values = record.apply(ts.values());
  return {ts.with_values(std::move(values)), std::move(record)};
}

Standardized standardize(const TimeSeries& ts) { return standardize(ts, {0, ts.steps()}); }

TimeSeries destandardize(const TimeSeries& ts, const StandardizationRecord& record) {
  return ts.with_values(record.invert(ts.values()));
}

WindowSlices extract_window(const TimeSeries& ts, const WindowSpec& w) {
  const int spw = ts.steps_per_wave();
  if (w.niw < 1 || w.now < 0 || w.lead < 0) fail(ErrorKind::InvalidInput, "window needs niw >= 1, now >= 0, lead >= 0");
  const Index train_end = w.start + w.train_steps(spw);
  const Index test_end = train_end + w.test_steps(spw);
  if (w.start - w.lead < 0 || test_end > ts.steps()) {
    fail(ErrorKind::OutOfBounds, "window at start " + std::to_string(w.start) + " with lead " +
                                     std::to_string(w.lead) + " does not fit a record of " +
                                     std::to_string(ts.steps()) + " steps");
  }
  return {ts.slice(w.start - w.lead, w.start), ts.slice(w.start, train_end), ts.slice(train_end, test_end)};
}

StartRange valid_starts(Index steps, int steps_per_wave, int niw, int now, Index lead) {
  const Index span = Index(niw + now) * steps_per_wave;
  return {lead, steps - span};
}

std::vector<WindowSpec> sample_windows(const TimeSeries& ts, int niw, int now, Index lead, Index count,
                                       std::uint64_t seed) {
  if (niw < 1 || now < 0 || lead < 0 || count < 1) fail(ErrorKind::InvalidInput, "invalid window sampling request");
  const auto range = valid_starts(ts.steps(), ts.steps_per_wave(), niw, now, lead);
  if (range.count() == 0) {
    fail(ErrorKind::NoValidWindow, "record of " + std::to_string(ts.steps()) + " steps is shorter than lead " +
                                       std::to_string(lead) + " plus " + std::to_string(niw + now) + " waves");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(range.first, range.last);
  std::vector<WindowSpec> windows;
  windows.reserve(std::size_t(count));
  for (Index k = 0; k < count; ++k) windows.push_back({pick(rng), niw, now, lead});
  return windows;
}

TimeSeries read_csv(std::istream& in, int steps_per_wave) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) header = split(line, ',');
  }
  if (header.empty()) fail(ErrorKind::ParseError, "CSV is empty; a header row is required");
  if (header.front() != "t") fail(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": first column must be 't'");
  if (header.size() < 2) fail(ErrorKind::ParseError, "CSV has no variable columns");
  std::vector<std::string> names(header.begin() + 1, header.end());

  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      fail(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                                      " fields, found " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      auto value = parse_number(cells[c]);
      if (!value || !std::isfinite(*value)) {
        fail(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": column '" + header[c] +
                                        "' has invalid value '" + cells[c] + "'");
      }
      row.push_back(*value);
    }
    times.push_back(row.front());
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) fail(ErrorKind::ParseError, "CSV needs at least two time steps");

  const double dt = (times.back() - times.front()) / double(times.size() - 1);
  if (!(dt > 0.0)) fail(ErrorKind::ParseError, "time column must be increasing");
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double step = times[k] - times[k - 1];
    if (std::abs(step - dt) > 1e-6 * dt) {
      fail(ErrorKind::ParseError, "non-uniform time step between rows " + std::to_string(k) + " and " +
                                      std::to_string(k + 1) + " (t = " + format_number(times[k]) + ")");
    }
  }

  Eigen::MatrixXd values(Index(names.size()), Index(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t i = 0; i < names.size(); ++i) values(Index(i), Index(k)) = rows[k][i + 1];
  }
  return TimeSeries(std::move(values), dt, std::move(names), steps_per_wave, times.front());
}

TimeSeries load_csv(const std::string& path, int steps_per_wave) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, "cannot open '" + path + "'");
  return read_csv(in, steps_per_wave);
}

void write_csv(std::ostream& out, const TimeSeries& ts) {
  out << 't';
  for (const auto& name : ts.names()) out << ',' << name;
  out << '\n';
  for (Index k = 0; k < ts.steps(); ++k) {
    out << format_number(ts.time_at(k));
    for (Index i = 0; i < ts.variables(); ++i) out << ',' << format_number(ts.values()(i, k));
    out << '\n';
  }
}

}  // namespace admd

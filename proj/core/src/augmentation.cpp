#include "admd/augmentation.hpp"

#include <algorithm>

#include "admd/error.hpp"

namespace admd {

Index AugmentationSpec::lead_required() const {
  Index lead = 0;
  if (nde > 0) lead = std::max<Index>(lead, 2 * Index(nde));
  if (nts > 0) lead = std::max<Index>(lead, Index(nts) + 1);
  return lead;
}

void AugmentationSpec::validate() const {
  if (nde < 0 || nde > kMaxDerivatives) {
    fail(ErrorKind::InvalidInput, "number of derivatives must be in 0.." + std::to_string(kMaxDerivatives) +
                                      ", got " + std::to_string(nde));
  }
  if (nts < 0) fail(ErrorKind::InvalidInput, "number of time shifts must be nonnegative");
}

BlockLayout make_layout(Index variables, const AugmentationSpec& spec) {
  BlockLayout layout;
  Index offset = 0;
  layout.push_back({BlockKind::State, 0, offset, variables});
  offset += variables;
  for (int d = 1; d <= spec.nde; ++d, offset += variables) layout.push_back({BlockKind::Derivative, d, offset, variables});
  for (int s = 1; s <= spec.nts; ++s, offset += variables) layout.push_back({BlockKind::Shift, s, offset, variables});
  return layout;
}

std::vector<Index> layout_rows(Index variables, const AugmentationSpec& full, const AugmentationSpec& part) {
  if (part.nde > full.nde || part.nts > full.nts || part.scheme != full.scheme) {
    fail(ErrorKind::InvalidInput, "augmentation is not contained in the full layout");
  }
  std::vector<Index> rows;
  rows.reserve(std::size_t(part.dimension(variables)));
  for (Index i = 0; i < variables * (1 + part.nde); ++i) rows.push_back(i);
  const Index shifts = variables * (1 + full.nde);
  for (Index i = 0; i < variables * part.nts; ++i) rows.push_back(shifts + i);
  return rows;
}

std::string to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::State: return "state";
    case BlockKind::Derivative: return "derivative";
    case BlockKind::Shift: return "shift";
  }
  return "unknown";
}

namespace {

void check_history(const TimeSeries& series, const TimeSeries& history, Index needed) {
  if (history.steps() < needed) {
    fail(ErrorKind::InsufficientHistory, "need " + std::to_string(needed) + " history steps, have " +
                                             std::to_string(history.steps()));
  }
  if (needed > 0 && history.variables() != series.variables()) {
    fail(ErrorKind::DimensionMismatch, "history and series have different variable counts");
  }
}

// [last `lead` history columns | series]
Eigen::MatrixXd with_lead(const TimeSeries& series, const TimeSeries& history, Index lead) {
  Eigen::MatrixXd combined(series.variables(), lead + series.steps());
  if (lead > 0) combined.leftCols(lead) = history.values().rightCols(lead);
  combined.rightCols(series.steps()) = series.values();
  return combined;
}

}  // namespace

Eigen::MatrixXd derivative(const TimeSeries& series, int order, const TimeSeries& history) {
  if (order < 1) fail(ErrorKind::InvalidInput, "derivative order must be at least 1");
  const Index lead = 2 * Index(order);
  check_history(series, history, lead);
  Eigen::MatrixXd current = with_lead(series, history, lead);
  const double scale = 1.0 / (2.0 * series.dt());
  for (int o = 0; o < order; ++o) {
    const Index len = current.cols() - 2;
    Eigen::MatrixXd next =
        (3.0 * current.rightCols(len) - 4.0 * current.middleCols(1, len) + current.leftCols(len)) * scale;
    current = std::move(next);
  }
  return current;
}

Eigen::MatrixXd hankel_shifts(const TimeSeries& series, int nts, const TimeSeries& history) {
  if (nts < 1) fail(ErrorKind::InvalidInput, "number of shifts must be at least 1");
  check_history(series, history, nts);
  const Index n = series.variables();
  const Index q = series.steps();
  const Eigen::MatrixXd combined = with_lead(series, history, nts);
  Eigen::MatrixXd out(n * nts, q);
  for (int s = 1; s <= nts; ++s) out.middleRows(n * (s - 1), n) = combined.middleCols(nts - s, q);
  return out;
}

Eigen::MatrixXd augmented_sequence(const TimeSeries& train, const TimeSeries& history,
                                   const AugmentationSpec& spec) {
  spec.validate();
  const Index q = train.steps();
  if (q < 2) fail(ErrorKind::EmptyWindow, "training window needs at least two steps");
  check_history(train, history, spec.lead_required());

  const Index n = train.variables();
  Eigen::MatrixXd z(spec.dimension(n), q);
  z.topRows(n) = train.values();
  Index row = n;
  if (spec.nde > 0) {
    const Index lead = 2 * Index(spec.nde);
    Eigen::MatrixXd current = with_lead(train, history, lead);
    const double scale = 1.0 / (2.0 * train.dt());
    for (int o = 1; o <= spec.nde; ++o, row += n) {
      const Index len = current.cols() - 2;
      Eigen::MatrixXd next =
          (3.0 * current.rightCols(len) - 4.0 * current.middleCols(1, len) + current.leftCols(len)) * scale;
      current = std::move(next);
      z.middleRows(row, n) = current.rightCols(q);
    }
  }
  if (spec.nts > 0) z.bottomRows(n * spec.nts) = hankel_shifts(train, spec.nts, history);
  return z;
}

SnapshotPair build_snapshots(const TimeSeries& train, const TimeSeries& history, const AugmentationSpec& spec) {
  Eigen::MatrixXd z = augmented_sequence(train, history, spec);
  const Index q = z.cols();
  SnapshotPair pair;
  pair.X = z.leftCols(q - 1);
  pair.Xp = z.rightCols(q - 1);
  pair.latest = z.col(q - 1);
  pair.layout = make_layout(train.variables(), spec);
  pair.state_variables = train.variables();
  return pair;
}

SnapshotPair make_pair(const Eigen::MatrixXd& sequence) {
  if (sequence.cols() < 2) fail(ErrorKind::EmptyWindow, "snapshot sequence needs at least two columns");
  const Index q = sequence.cols();
  SnapshotPair pair;
  pair.X = sequence.leftCols(q - 1);
  pair.Xp = sequence.rightCols(q - 1);
  pair.latest = sequence.col(q - 1);
  pair.layout = make_layout(sequence.rows(), {});
  pair.state_variables = sequence.rows();
  return pair;
}

}  // namespace admd

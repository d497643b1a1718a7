#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "admd/timeseries.hpp"

namespace admd {

enum class DerivativeScheme {
  /// f'_k = (3 f_k - 4 f_{k-1} + f_{k-2}) / (2 dt), applied recursively for
  /// higher orders.
  SecondOrderBackward,
};

inline constexpr int kMaxDerivatives = 4;

struct AugmentationSpec {
  int nde = 0;  ///< derivative blocks, 0..4
  int nts = 0;  ///< time-shifted copies
  DerivativeScheme scheme = DerivativeScheme::SecondOrderBackward;

  /// Leading steps that must precede the training window.
  Index lead_required() const;
  Index dimension(Index variables) const { return variables * (1 + nde + nts); }
  void validate() const;

  friend bool operator==(const AugmentationSpec&, const AugmentationSpec&) = default;
};

enum class BlockKind { State, Derivative, Shift };

/// One row block of the augmented state. `order` is the derivative order or
/// the delay in steps; 0 for the state block.
struct Block {
  BlockKind kind = BlockKind::State;
  int order = 0;
  Index row_offset = 0;
  Index rows = 0;

  friend bool operator==(const Block&, const Block&) = default;
};

using BlockLayout = std::vector<Block>;

/// [state, d^1 .. d^nde, shift_1 .. shift_nts]
BlockLayout make_layout(Index variables, const AugmentationSpec& spec);
std::string to_string(BlockKind kind);

/// Rows of the `full` layout that hold the `part` layout, in order. `part`
/// may not ask for more derivatives or shifts than `full` has.
std::vector<Index> layout_rows(Index variables, const AugmentationSpec& full, const AugmentationSpec& part);

/// Columns 0..q-2 of the augmented snapshot sequence in X, 1..q-1 in Xp.
/// `latest` is column q-1, the reference state for forecasting.
struct SnapshotPair {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Xp;
  Eigen::VectorXd latest;
  BlockLayout layout;
  Index state_variables = 0;

  Index dimension() const { return X.rows(); }
  Index columns() const { return X.cols(); }
};

/// Recursive backward-difference derivative of `series`, drawing the
/// leading samples from the last 2*order steps of `history`.
Eigen::MatrixXd derivative(const TimeSeries& series, int order, const TimeSeries& history);

/// nts stacked delay blocks: block s holds the series delayed by s steps.
Eigen::MatrixXd hankel_shifts(const TimeSeries& series, int nts, const TimeSeries& history);

/// Full augmented snapshot sequence (p x q) for the training window.
Eigen::MatrixXd augmented_sequence(const TimeSeries& train, const TimeSeries& history,
                                   const AugmentationSpec& spec);

SnapshotPair build_snapshots(const TimeSeries& train, const TimeSeries& history,
                             const AugmentationSpec& spec);

/// Plain pair from an explicit snapshot sequence; used for synthetic
/// operator tests where no time-series metadata exists.
SnapshotPair make_pair(const Eigen::MatrixXd& sequence);

}  // namespace admd

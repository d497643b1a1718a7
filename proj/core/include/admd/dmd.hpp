#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "admd/augmentation.hpp"
#include "admd/timeseries.hpp"

namespace admd {

using Complex = std::complex<double>;

/// Eigenvalues below this magnitude have no usable logarithm; their modes
/// are flagged and left out of forecasts.
inline constexpr double kZeroEigenvalue = 1e-14;

struct Spectrum {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd modes;  ///< unit-norm columns
  Eigen::VectorXcd omegas;
  std::vector<bool> excluded;
};

/// Fitted operator in modal form, plus what is needed to map a forecast back
/// onto the record it was trained on.
struct DmdModel {
  Index dim = 0;
  Index state_variables = 0;
  double dt = 1.0;
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd modes;
  Eigen::VectorXcd omegas;
  Eigen::VectorXcd amplitudes;
  std::vector<bool> stabilized;
  std::vector<bool> excluded;
  BlockLayout layout;
  AugmentationSpec augmentation;
  StandardizationRecord standardization;
  std::vector<std::string> names;
  int steps_per_wave = 32;
  /// Augmented state at the last training step; forecasts start after it.
  Eigen::VectorXd initial_state;
  /// Training window in record steps, [train_start, train_end).
  Index train_start = 0;
  Index train_end = 0;
  double time_origin = 0.0;

  Index modes_count() const { return eigenvalues.size(); }
  Index excluded_count() const;
  bool any_stabilized() const;
};

/// Singular values at or below this are treated as zero by the pseudo-inverse.
double rank_tolerance(Index rows, Index cols, double sigma_max);

/// A = Xp * pinv(X). Throws DegenerateData when X has no singular value
/// above the rank tolerance.
Eigen::MatrixXd fit(const SnapshotPair& pair, double dt);

/// omega = ln(lambda) / dt on the principal branch, Im in (-pi/dt, pi/dt].
/// Zero eigenvalues map to -inf.
Complex continuous_frequency(Complex lambda, double dt);

/// Eigenpairs of a real operator. Modes have unit norm and the phase is
/// fixed so the largest-magnitude component is real and positive.
Spectrum eigendecompose(const Eigen::MatrixXd& A, double dt);

/// Every mode with Re(omega) > 0 gets its real part set to zero; lambda is
/// recomputed from the clamped omega. Modes and amplitudes are untouched.
DmdModel stabilize(DmdModel model);

/// b = pinv(Phi) * x0.
Eigen::VectorXcd amplitudes(const DmdModel& model, const Eigen::VectorXd& x0);

/// Column j (j = 1..horizon) is Re sum_k phi_k b_k exp(omega_k j dt) over the
/// state block. Excluded modes do not contribute.
Eigen::MatrixXd forecast(const DmdModel& model, Index horizon);
Eigen::MatrixXd forecast(const DmdModel& model, const Eigen::VectorXd& x0, Index horizon);

/// Same modal sum over all augmented rows, without taking the real part.
Eigen::MatrixXcd modal_sum(const DmdModel& model, Index horizon);

/// sum_k |b_k| ||phi_k||, an upper bound on the modal sum of a stabilized model.
double forecast_bound(const DmdModel& model);

/// x_{j} = A x_{j-1}, j = 1..horizon; returns the first `rows` rows (all
/// rows when rows < 0).
Eigen::MatrixXd iterate_map(const Eigen::MatrixXd& A, const Eigen::VectorXd& x0, Index horizon, Index rows = -1);

struct FitOptions {
  bool stabilize = true;
  /// Append an orthonormal basis of the operator's null space as zero
  /// eigenvalue modes so the model always carries `dim` modes. Forecasts do
  /// not need them.
  bool complete_null_space = true;
};

/// Fits, decomposes and projects `pair.latest` onto the modes.
///
/// The operator Xp pinv(X) = B U^T (X = U S V^T, B = Xp V S^-1) is never
/// formed: its nonzero eigenpairs are those of U^T B, lifted by B, and the
/// rest of its spectrum is exactly zero on range(U)^perp. This is the same
/// model `fit_model_direct` builds, at r x r instead of p x p cost.
DmdModel fit_model(const SnapshotPair& pair, double dt, const FitOptions& options = {});

/// X = L Q^T from a Householder QR of X^T, with Q orthonormal (columns x c,
/// c = min(rows, columns)) and L lower trapezoidal, plus P = Xp Q.
/// The QR is backward stable column by column, so every row of X keeps its
/// own relative accuracy and any row subset can be fitted from L and P.
struct RowCompression {
  Eigen::MatrixXd L;
  Eigen::MatrixXd P;
  Index columns = 0;  ///< snapshot columns of the compressed X

  /// Columns of L a fit on `rows` touches.
  Index width(const std::vector<Index>& rows) const;
};

RowCompression compress_rows(const SnapshotPair& full);

/// Same model as `fit_model(pair, ...)` where pair.X and pair.Xp are the
/// `rows` of the compressed pair, at a cost set by `full.width(rows)` in
/// place of the snapshot count. Agrees with the uncompressed fit to
/// round-off.
DmdModel fit_model(const SnapshotPair& pair, const RowCompression& full, const std::vector<Index>& rows, double dt,
                   const FitOptions& options = {});

/// Reference route: forms A with `fit`, then `eigendecompose` and
/// `amplitudes` on the full p x p problem.
DmdModel fit_model_direct(const SnapshotPair& pair, double dt, const FitOptions& options = {});

}  // namespace admd

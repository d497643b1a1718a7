#include "admd/dmd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "admd/error.hpp"

namespace admd {

Index DmdModel::excluded_count() const { return Index(std::count(excluded.begin(), excluded.end(), true)); }

bool DmdModel::any_stabilized() const { return std::find(stabilized.begin(), stabilized.end(), true) != stabilized.end(); }

double rank_tolerance(Index rows, Index cols, double sigma_max) {
  return double(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * sigma_max;
}

namespace {

void check_pair(const SnapshotPair& pair, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::InvalidInput, "time step must be positive");
  if (pair.X.size() == 0 || pair.X.rows() != pair.Xp.rows() || pair.X.cols() != pair.Xp.cols()) {
    fail(ErrorKind::EmptyWindow, "snapshot pair is empty or mismatched");
  }
  if (!pair.X.allFinite() || !pair.Xp.allFinite()) fail(ErrorKind::DegenerateData, "snapshot matrices contain non-finite values");
}

struct TruncatedSvd {
  Eigen::MatrixXd U;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd V;
};

TruncatedSvd full_svd(const Eigen::MatrixXd& X) {
  constexpr int options = Eigen::ComputeThinU | Eigen::ComputeThinV;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(X, options);
  if (svd.info() == Eigen::Success && svd.singularValues().allFinite() && svd.matrixU().allFinite() &&
      svd.matrixV().allFinite()) {
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
  }
  // Divide and conquer can emit NaN when deflating clusters of tiny singular
  // values; one-sided Jacobi is slower but does not.
  Eigen::JacobiSVD<Eigen::MatrixXd> jacobi(X, options);
  if (jacobi.info() != Eigen::Success) fail(ErrorKind::DegenerateData, "singular value decomposition did not converge");
  return {jacobi.matrixU(), jacobi.singularValues(), jacobi.matrixV()};
}

// `rows` x `cols` are the dimensions of the snapshot matrix M stands for;
// they set the rank tolerance.
TruncatedSvd truncated_svd(const Eigen::MatrixXd& M, Index rows, Index cols) {
  auto svd = full_svd(M);
  const auto& sigma = svd.sigma;
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  if (!(sigma_max > 0.0) || !std::isfinite(sigma_max)) fail(ErrorKind::DegenerateData, "snapshot matrix is zero");
  // The window length q is one more than the number of snapshot columns.
  const double tol = rank_tolerance(rows, cols + 1, sigma_max);
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > tol) ++rank;
  if (rank == 0) fail(ErrorKind::DegenerateData, "no singular value above the rank tolerance");
  if (rank < sigma.size()) {
    svd.U.conservativeResize(Eigen::NoChange, rank);
    svd.sigma.conservativeResize(rank);
    svd.V.conservativeResize(Eigen::NoChange, rank);
  }
  return svd;
}

TruncatedSvd truncated_svd(const Eigen::MatrixXd& X) { return truncated_svd(X, X.rows(), X.cols()); }

void normalize_mode(Eigen::Ref<Eigen::VectorXcd> mode) {
  const double norm = mode.norm();
  if (!(norm > 0.0)) return;
  mode /= norm;
  const double largest = mode.cwiseAbs().maxCoeff();
  Index pivot = 0;
  // Earliest component within round-off of the largest, so that a mode and
  // its conjugate pick the same pivot.
  while (std::abs(mode(pivot)) < largest * (1.0 - 1e-9)) ++pivot;
  const Complex phase = std::conj(mode(pivot)) / std::abs(mode(pivot));
  mode *= phase;
  mode(pivot) = Complex(mode(pivot).real(), 0.0);
}

}  // namespace

Eigen::MatrixXd fit(const SnapshotPair& pair, double dt) {
  check_pair(pair, dt);
  const auto svd = truncated_svd(pair.X);
  // pinv(X) = V S^-1 U^T
  return (pair.Xp * svd.V) * svd.sigma.cwiseInverse().asDiagonal() * svd.U.transpose();
}

Complex continuous_frequency(Complex lambda, double dt) {
  if (std::abs(lambda) < kZeroEigenvalue) return {-std::numeric_limits<double>::infinity(), 0.0};
  // A signed zero imaginary part would put negative reals on the -pi side.
  if (lambda.imag() == 0.0) lambda = Complex(lambda.real(), 0.0);
  return std::log(lambda) / dt;
}

Spectrum eigendecompose(const Eigen::MatrixXd& A, double dt) {
  if (A.rows() != A.cols() || A.size() == 0) fail(ErrorKind::DimensionMismatch, "operator must be square and nonempty");
  if (!A.allFinite()) fail(ErrorKind::EigFailure, "operator contains non-finite entries");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, true);
  if (solver.info() != Eigen::Success) fail(ErrorKind::EigFailure, "eigenvalue iteration did not converge");

  Spectrum spectrum;
  spectrum.eigenvalues = solver.eigenvalues();
  spectrum.modes = solver.eigenvectors();
  const Index p = A.rows();
  spectrum.omegas.resize(p);
  spectrum.excluded.assign(std::size_t(p), false);
  for (Index k = 0; k < p; ++k) {
    normalize_mode(spectrum.modes.col(k));
    spectrum.omegas(k) = continuous_frequency(spectrum.eigenvalues(k), dt);
    spectrum.excluded[std::size_t(k)] = std::abs(spectrum.eigenvalues(k)) < kZeroEigenvalue;
  }
  return spectrum;
}

DmdModel stabilize(DmdModel model) {
  if (model.stabilized.size() != std::size_t(model.modes_count())) {
    model.stabilized.assign(std::size_t(model.modes_count()), false);
  }
  for (Index k = 0; k < model.modes_count(); ++k) {
    if (model.excluded[std::size_t(k)]) continue;
    Complex& omega = model.omegas(k);
    if (omega.real() > 0.0) {
      omega = Complex(0.0, omega.imag());
      model.eigenvalues(k) = std::exp(omega * model.dt);
      model.stabilized[std::size_t(k)] = true;
    }
  }
  return model;
}

Eigen::VectorXcd amplitudes(const DmdModel& model, const Eigen::VectorXd& x0) {
  if (x0.size() != model.modes.rows()) {
    fail(ErrorKind::DimensionMismatch, "initial state has dimension " + std::to_string(x0.size()) + ", model expects " +
                                           std::to_string(model.modes.rows()));
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(model.modes);
  return cod.solve(x0.cast<Complex>());
}

Eigen::MatrixXcd modal_sum(const DmdModel& model, Index horizon) {
  const Index p = model.modes.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(p, std::max<Index>(horizon, 0));
  if (horizon <= 0) return out;
  for (Index k = 0; k < model.modes_count(); ++k) {
    if (model.excluded[std::size_t(k)]) continue;
    const Complex b = model.amplitudes(k);
    if (b == Complex(0.0, 0.0)) continue;
    const Complex step = std::exp(model.omegas(k) * model.dt);
    Complex weight = b;
    for (Index j = 0; j < horizon; ++j) {
      weight *= step;
      out.col(j) += model.modes.col(k) * weight;
    }
  }
  return out;
}

Eigen::MatrixXd forecast(const DmdModel& model, Index horizon) {
  if (model.amplitudes.size() != model.modes_count()) fail(ErrorKind::InvalidInput, "model has no amplitudes");
  const Index n = model.state_variables;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, std::max<Index>(horizon, 0));
  if (horizon <= 0) return out;
  for (Index k = 0; k < model.modes_count(); ++k) {
    if (model.excluded[std::size_t(k)]) continue;
    const Complex b = model.amplitudes(k);
    if (b == Complex(0.0, 0.0)) continue;
    const Eigen::VectorXd re = model.modes.col(k).head(n).real();
    const Eigen::VectorXd im = model.modes.col(k).head(n).imag();
    // b exp(omega dt)^(j+1) by repeated multiplication; the drift is a few
    // ulps per step.
    const Complex step = std::exp(model.omegas(k) * model.dt);
    Complex weight = b;
    for (Index j = 0; j < horizon; ++j) {
      weight *= step;
      out.col(j) += weight.real() * re - weight.imag() * im;
    }
  }
  return out;
}

Eigen::MatrixXd forecast(const DmdModel& model, const Eigen::VectorXd& x0, Index horizon) {
  DmdModel projected = model;
  projected.amplitudes = amplitudes(model, x0);
  return forecast(projected, horizon);
}

double forecast_bound(const DmdModel& model) {
  double bound = 0.0;
  for (Index k = 0; k < model.modes_count(); ++k) {
    if (model.excluded[std::size_t(k)]) continue;
    bound += std::abs(model.amplitudes(k)) * model.modes.col(k).norm();
  }
  return bound;
}

Eigen::MatrixXd iterate_map(const Eigen::MatrixXd& A, const Eigen::VectorXd& x0, Index horizon, Index rows) {
  if (A.rows() != A.cols() || A.cols() != x0.size()) fail(ErrorKind::DimensionMismatch, "operator and state sizes differ");
  if (rows < 0) rows = A.rows();
  Eigen::MatrixXd out(rows, std::max<Index>(horizon, 0));
  Eigen::VectorXd x = x0;
  for (Index j = 0; j < horizon; ++j) {
    x = A * x;
    out.col(j) = x.head(rows);
  }
  return out;
}

namespace {

DmdModel model_shell(const SnapshotPair& pair, double dt) {
  DmdModel model;
  model.dim = pair.dimension();
  model.state_variables = pair.state_variables;
  model.dt = dt;
  model.layout = pair.layout;
  model.initial_state = pair.latest;
  return model;
}

// Everything after the SVD; XpV = Xp V.
DmdModel fit_reduced(const SnapshotPair& pair, const TruncatedSvd& svd, const Eigen::MatrixXd& XpV, double dt,
                     const FitOptions& options) {
  const Index p = pair.dimension();
  const Index r = svd.sigma.size();

  const Eigen::MatrixXd B = XpV * svd.sigma.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd reduced = svd.U.transpose() * B;
  if (!reduced.allFinite()) fail(ErrorKind::DegenerateData, "reduced operator is not finite");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(reduced, true);
  if (solver.info() != Eigen::Success) fail(ErrorKind::EigFailure, "eigenvalue iteration did not converge");

  const bool complete = options.complete_null_space && r < p;
  const Index total = complete ? p : r;
  DmdModel model = model_shell(pair, dt);
  model.eigenvalues = Eigen::VectorXcd::Zero(total);
  model.omegas.resize(total);
  model.modes.resize(p, total);
  model.excluded.assign(std::size_t(total), true);
  model.stabilized.assign(std::size_t(total), false);

  const Eigen::MatrixXcd W = solver.eigenvectors();
  Eigen::MatrixXcd lifted(p, r);
  lifted.real() = B * W.real();
  lifted.imag() = B * W.imag();
  const double lift_floor = 1e-12 * std::max(B.norm(), 1.0);
  for (Index k = 0; k < r; ++k) {
    const Complex lambda = solver.eigenvalues()(k);
    model.eigenvalues(k) = lambda;
    model.omegas(k) = continuous_frequency(lambda, dt);
    model.excluded[std::size_t(k)] = std::abs(lambda) < kZeroEigenvalue;
    // B w is an eigenvector of the full operator for lambda != 0; U w covers
    // the degenerate case where the lift vanishes.
    if (lifted.col(k).norm() > lift_floor) {
      model.modes.col(k) = lifted.col(k);
    } else {
      model.modes.col(k) = svd.U.cast<Complex>() * W.col(k);
    }
    normalize_mode(model.modes.col(k));
  }

  // Amplitudes: U^T (Phi_r b_r) = U^T x0 holds for the full problem because
  // the null modes are orthogonal to range(U).
  Eigen::MatrixXcd projected(r, r);
  projected.real() = svd.U.transpose() * model.modes.leftCols(r).real();
  projected.imag() = svd.U.transpose() * model.modes.leftCols(r).imag();
  const Eigen::VectorXcd rhs = (svd.U.transpose() * pair.latest).cast<Complex>();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(projected);
  model.amplitudes = Eigen::VectorXcd::Zero(total);
  model.amplitudes.head(r) = cod.solve(rhs);

  if (complete) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(svd.U);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(p, p);
    const Eigen::MatrixXd null_basis = Q.rightCols(p - r);
    const Eigen::VectorXcd residual = pair.latest.cast<Complex>() - model.modes.leftCols(r) * model.amplitudes.head(r);
    for (Index k = r; k < p; ++k) {
      model.modes.col(k) = null_basis.col(k - r).cast<Complex>();
      normalize_mode(model.modes.col(k));
      model.omegas(k) = continuous_frequency(0.0, dt);
    }
    model.amplitudes.tail(p - r) = model.modes.rightCols(p - r).adjoint() * residual;
  }

  if (options.stabilize) model = stabilize(std::move(model));
  return model;
}

}  // namespace

DmdModel fit_model(const SnapshotPair& pair, double dt, const FitOptions& options) {
  check_pair(pair, dt);
  if (pair.latest.size() != pair.dimension()) fail(ErrorKind::DimensionMismatch, "reference state size differs from X");
  const auto svd = truncated_svd(pair.X);
  return fit_reduced(pair, svd, pair.Xp * svd.V, dt, options);
}

Index RowCompression::width(const std::vector<Index>& rows) const {
  Index last = 0;
  for (Index i : rows) last = std::max(last, i + 1);
  return std::min(last, L.cols());
}

RowCompression compress_rows(const SnapshotPair& full) {
  if (full.X.size() == 0 || full.X.rows() != full.Xp.rows() || full.X.cols() != full.Xp.cols()) {
    fail(ErrorKind::EmptyWindow, "snapshot pair is empty or mismatched");
  }
  const Index c = std::min(full.X.rows(), full.X.cols());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(full.X.transpose());
  // P^T = Q^T Xp^T without forming Q.
  Eigen::MatrixXd Pt = full.Xp.transpose();
  Pt.applyOnTheLeft(qr.householderQ().transpose());
  RowCompression out;
  out.L = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>().transpose();
  out.P = Pt.topRows(c).transpose();
  out.columns = full.X.cols();
  return out;
}

DmdModel fit_model(const SnapshotPair& pair, const RowCompression& full, const std::vector<Index>& rows, double dt,
                   const FitOptions& options) {
  check_pair(pair, dt);
  if (pair.latest.size() != pair.dimension()) fail(ErrorKind::DimensionMismatch, "reference state size differs from X");
  if (Index(rows.size()) != pair.dimension() || pair.columns() != full.columns) {
    fail(ErrorKind::DimensionMismatch, "row selection does not match the snapshot pair");
  }
  for (Index i : rows) {
    if (i < 0 || i >= full.L.rows()) fail(ErrorKind::OutOfBounds, "row " + std::to_string(i) + " is not in the compressed pair");
  }
  const Index c = full.width(rows);
  const Eigen::MatrixXd L = full.L(rows, Eigen::seqN(0, c));
  // X = L_S Q^T, so X = U S (Q W)^T and Xp V = P_S W.
  const auto svd = truncated_svd(L, pair.dimension(), pair.columns());
  const Eigen::MatrixXd P = full.P(rows, Eigen::seqN(0, c));
  return fit_reduced(pair, svd, P * svd.V, dt, options);
}

DmdModel fit_model_direct(const SnapshotPair& pair, double dt, const FitOptions& options) {
  const Eigen::MatrixXd A = fit(pair, dt);
  auto spectrum = eigendecompose(A, dt);
  DmdModel model = model_shell(pair, dt);
  model.eigenvalues = std::move(spectrum.eigenvalues);
  model.modes = std::move(spectrum.modes);
  model.omegas = std::move(spectrum.omegas);
  model.excluded = std::move(spectrum.excluded);
  model.stabilized.assign(model.excluded.size(), false);
  model.amplitudes = amplitudes(model, pair.latest);
  if (options.stabilize) model = stabilize(std::move(model));
  return model;
}

}  // namespace admd

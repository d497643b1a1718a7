#include "admd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "admd/error.hpp"

namespace admd {

namespace {

void check_shapes(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas) {
  if (pred.rows() != meas.rows() || pred.cols() != meas.cols()) {
    fail(ErrorKind::DimensionMismatch, "predicted and measured series have different shapes");
  }
  if (pred.size() == 0) fail(ErrorKind::EmptyWindow, "metrics need at least one value");
}

double population_std(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  const double mean = row.mean();
  return std::sqrt((row.array() - mean).square().sum() / double(row.size()));
}

double checked_scale(const Eigen::Ref<const Eigen::RowVectorXd>& row, Index variable, const char* which) {
  const double sigma = population_std(row);
  const double magnitude = row.cwiseAbs().maxCoeff();
  if (!(sigma > 64.0 * std::numeric_limits<double>::epsilon() * magnitude)) {
    fail(ErrorKind::ZeroVariance, std::string(which) + " variable " + std::to_string(variable) + " is constant");
  }
  return sigma;
}

}  // namespace

Eigen::VectorXd nrmse_per_variable(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas) {
  check_shapes(pred, meas);
  Eigen::VectorXd out(pred.rows());
  for (Index i = 0; i < pred.rows(); ++i) {
    const double sigma = checked_scale(meas.row(i), i, "measured");
    const double mse = (pred.row(i) - meas.row(i)).squaredNorm() / double(pred.cols());
    out(i) = std::sqrt(mse) / sigma;
  }
  return out;
}

double nrmse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas) { return nrmse_per_variable(pred, meas).mean(); }

Eigen::VectorXd pearson_per_variable(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas) {
  check_shapes(pred, meas);
  if (pred.cols() < 2) fail(ErrorKind::EmptyWindow, "correlation needs at least two steps");
  const double m = double(pred.cols());
  Eigen::VectorXd out(pred.rows());
  for (Index i = 0; i < pred.rows(); ++i) {
    checked_scale(pred.row(i), i, "predicted");
    checked_scale(meas.row(i), i, "measured");
    const Eigen::RowVectorXd dx = pred.row(i).array() - pred.row(i).mean();
    const Eigen::RowVectorXd dy = meas.row(i).array() - meas.row(i).mean();
    const double sx = std::sqrt(dx.squaredNorm() / (m - 1.0));
    const double sy = std::sqrt(dy.squaredNorm() / (m - 1.0));
    const double r = dx.dot(dy) / ((m - 1.0) * sx * sy);
    out(i) = std::clamp(r, -1.0, 1.0);
  }
  return out;
}

double pearson(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas) { return pearson_per_variable(pred, meas).mean(); }

Eigen::VectorXd aam_per_variable(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas) {
  check_shapes(pred, meas);
  Eigen::VectorXd out(pred.rows());
  for (Index i = 0; i < pred.rows(); ++i) {
    double weighted = 0.0;
    double total = 0.0;
    for (Index j = 0; j < pred.cols(); ++j) {
      const double x = pred(i, j);
      const double y = meas(i, j);
      const double d = std::hypot(x, y);
      if (d == 0.0) continue;
      // Angle to the diagonal x = y. atan2 keeps it exact at 0 and pi/2,
      // where acos(|x + y| / (sqrt2 d)) loses half the digits.
      weighted += d * std::atan2(std::abs(x - y), std::abs(x + y));
      total += d;
    }
    if (total == 0.0) fail(ErrorKind::AllZero, "variable " + std::to_string(i) + " is identically zero in both series");
    out(i) = 1.0 - (4.0 / std::numbers::pi) * (weighted / total);
  }
  return out;
}

double aam(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas) { return aam_per_variable(pred, meas).mean(); }

Eigen::VectorXd nammae_per_variable(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas) {
  check_shapes(pred, meas);
  Eigen::VectorXd out(pred.rows());
  for (Index i = 0; i < pred.rows(); ++i) {
    const double sigma = checked_scale(meas.row(i), i, "measured");
    const double low = std::abs(pred.row(i).minCoeff() - meas.row(i).minCoeff());
    const double high = std::abs(pred.row(i).maxCoeff() - meas.row(i).maxCoeff());
    out(i) = (low + high) / (2.0 * sigma);
  }
  return out;
}

double nammae(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas) { return nammae_per_variable(pred, meas).mean(); }

MetricReport evaluate(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas) {
  MetricReport report;
  report.nrmse_per_variable = nrmse_per_variable(pred, meas);
  report.pearson_per_variable = pearson_per_variable(pred, meas);
  report.aam_per_variable = aam_per_variable(pred, meas);
  report.nammae_per_variable = nammae_per_variable(pred, meas);
  report.nrmse = report.nrmse_per_variable.mean();
  report.pearson_r = report.pearson_per_variable.mean();
  report.aam = report.aam_per_variable.mean();
  report.nammae = report.nammae_per_variable.mean();
  return report;
}

}  // namespace admd

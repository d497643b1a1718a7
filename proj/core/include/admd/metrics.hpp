#pragma once

#include <Eigen/Core>

#include "admd/timeseries.hpp"

namespace admd {

/// Forecast accuracy, averaged over variables. Rows are variables, columns
/// time steps; `pred` and `meas` must have the same shape.
struct MetricReport {
  double nrmse = 0.0;
  double pearson_r = 0.0;
  double aam = 0.0;
  double nammae = 0.0;
  Eigen::VectorXd nrmse_per_variable;
  Eigen::VectorXd pearson_per_variable;
  Eigen::VectorXd aam_per_variable;
  Eigen::VectorXd nammae_per_variable;
};

/// RMS error over the population standard deviation of the measurement.
Eigen::VectorXd nrmse_per_variable(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas);
double nrmse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas);

/// Product-moment correlation with sample standard deviations.
Eigen::VectorXd pearson_per_variable(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas);
double pearson(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas);

/// Average angle measure: 1 - (4/pi) * (sum d|alpha| / sum d) with
/// d = sqrt(x^2 + y^2) and alpha = arccos(|x + y| / (sqrt(2) d)).
/// 1 is a perfect match, -1 a sign-inverted one.
Eigen::VectorXd aam_per_variable(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas);
double aam(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas);

/// (|min x - min y| + |max x - max y|) / (2 sigma_y), averaged.
Eigen::VectorXd nammae_per_variable(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas);
double nammae(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas);

MetricReport evaluate(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas);

}  // namespace admd

#pragma once

#include <Eigen/Core>

#include "snreg/dataset.hpp"

namespace snreg {

enum class MeatMode { iid, hac };

// Sandwich pieces of the QR asymptotic variance D^{-1} J D^{-1}.
struct QrVarianceEstimate {
  Eigen::MatrixXd d_hat;     // kernel density-weighted design second moment
  Eigen::MatrixXd j_hat;     // covariance of psi-weighted regressors
  Eigen::MatrixXd sandwich;  // D^{-1} J D^{-1}
  double bandwidth_d = 0.0;
  int lag_truncation = 0;
};

// Powell/Kato kernel estimate D = (1/(n h)) sum K(r_t / h) x_t x_t' with a
// Gaussian kernel.
Eigen::MatrixXd estimate_bread(const TimeSeriesDataset& data,
                               QuantileLevel tau,
                               const Eigen::VectorXd& alpha_hat,
                               double bandwidth);

// iid: J = (1/n) sum psi(r_t)^2 x_t x_t'. hac: Bartlett-weighted long-run
// covariance Gamma_0 + sum_{h=1..L} (1 - h/(L+1)) (Gamma_h + Gamma_h') of
// g_t = psi(r_t) x_t. Lag 0 reproduces the iid estimate exactly.
Eigen::MatrixXd estimate_meat(const TimeSeriesDataset& data, QuantileLevel tau,
                              const Eigen::VectorXd& alpha_hat, MeatMode mode,
                              int lag_truncation = 0);

// Hall-Sheather rate bandwidth calibrated to the Gaussian reference density.
double hall_sheather_bandwidth(double tau, Eigen::Index n,
                               double alpha = 0.05);

// Bartlett lag rule L = floor(1.3 * n^(1/3)).
int default_lag_truncation(Eigen::Index n);

QrVarianceEstimate qr_sandwich(const TimeSeriesDataset& data,
                               QuantileLevel tau,
                               const Eigen::VectorXd& alpha_hat, MeatMode mode,
                               double bandwidth_d = 0.0,
                               int lag_truncation = -1);

struct BaselineTestResult {
  double statistic = 0.0;  // sqrt(n) (a_c - null) / se
  double p_value = 0.0;    // two-sided standard normal
  bool reject = false;
  double se = 0.0;
};

// t-test of one coefficient against a null value using iid or HAC standard
// errors; rejection compares |t| against the normal (1 - nu/2)-quantile.
BaselineTestResult baseline_t_test(const TimeSeriesDataset& data,
                                   QuantileLevel tau,
                                   Eigen::Index coefficient_index,
                                   double null_value, MeatMode mode,
                                   double nu = 0.05);

}  // namespace snreg

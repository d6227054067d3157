#include "snreg/baselines.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "snreg/qr.hpp"
#include "snreg/stats.hpp"

namespace snreg {

Eigen::MatrixXd estimate_bread(const TimeSeriesDataset& data,
                               QuantileLevel tau,
                               const Eigen::VectorXd& alpha_hat,
                               double bandwidth) {
  if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
  (void)tau;
  const Eigen::Index n = data.n();
  const Eigen::Index k = data.k();
  const Eigen::VectorXd r = data.y() - data.x() * alpha_hat;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double weight = normal_pdf(r[t] / bandwidth);
    d.selfadjointView<Eigen::Lower>().rankUpdate(data.x().row(t).transpose(),
                                                 weight);
  }
  d = d.selfadjointView<Eigen::Lower>();
  return d / (static_cast<double>(n) * bandwidth);
}

Eigen::MatrixXd estimate_meat(const TimeSeriesDataset& data, QuantileLevel tau,
                              const Eigen::VectorXd& alpha_hat, MeatMode mode,
                              int lag_truncation) {
  if (mode == MeatMode::hac && lag_truncation < 0)
    throw ConfigError("lag truncation must be >= 0 in hac mode");
  const Eigen::Index n = data.n();
  const Eigen::Index k = data.k();
  const Eigen::VectorXd r = data.y() - data.x() * alpha_hat;

  Eigen::MatrixXd g(n, k);  // g_t = psi(r_t) x_t
  for (Eigen::Index t = 0; t < n; ++t)
    g.row(t) = psi(r[t], tau) * data.x().row(t);

  Eigen::MatrixXd j = (g.transpose() * g) / static_cast<double>(n);
  if (mode == MeatMode::iid) return j;

  for (int h = 1; h <= lag_truncation && h < n; ++h) {
    const double weight = 1.0 - static_cast<double>(h) / (lag_truncation + 1);
    const Eigen::MatrixXd gamma_h =
        (g.bottomRows(n - h).transpose() * g.topRows(n - h)) /
        static_cast<double>(n);
    j += weight * (gamma_h + gamma_h.transpose());
  }
  return j;
}

double hall_sheather_bandwidth(double tau, Eigen::Index n, double alpha) {
  const double q = normal_quantile(tau);
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double num = 1.5 * normal_pdf(q) * normal_pdf(q);
  const double den = 2.0 * q * q + 1.0;
  // Hall-Sheather rate in probability units, mapped to residual units
  // through the Gaussian reference quantile function.
  double h_tau = std::pow(static_cast<double>(n), -1.0 / 3.0) *
                 std::pow(z, 2.0 / 3.0) * std::cbrt(num / den);
  h_tau = std::min({h_tau, 0.5 * tau, 0.5 * (1.0 - tau)});
  return 0.5 * (normal_quantile(tau + h_tau) - normal_quantile(tau - h_tau));
}

int default_lag_truncation(Eigen::Index n) {
  return static_cast<int>(std::floor(1.3 * std::cbrt(static_cast<double>(n))));
}

QrVarianceEstimate qr_sandwich(const TimeSeriesDataset& data,
                               QuantileLevel tau,
                               const Eigen::VectorXd& alpha_hat, MeatMode mode,
                               double bandwidth_d, int lag_truncation) {
  QrVarianceEstimate est;
  est.bandwidth_d = bandwidth_d > 0.0
                        ? bandwidth_d
                        : hall_sheather_bandwidth(tau.tau, data.n());
  est.lag_truncation = mode == MeatMode::iid
                           ? 0
                           : (lag_truncation >= 0
                                  ? lag_truncation
                                  : default_lag_truncation(data.n()));
  est.d_hat = estimate_bread(data, tau, alpha_hat, est.bandwidth_d);
  est.j_hat = estimate_meat(data, tau, alpha_hat, mode, est.lag_truncation);

  Eigen::LDLT<Eigen::MatrixXd> ldlt(est.d_hat);
  if (ldlt.info() != Eigen::Success)
    throw NumericError("singular bread matrix in the QR sandwich");
  const Eigen::MatrixXd d_inv_j = ldlt.solve(est.j_hat);
  est.sandwich = ldlt.solve(d_inv_j.transpose()).transpose();
  // Symmetrize away factorization round-off.
  est.sandwich = 0.5 * (est.sandwich + est.sandwich.transpose()).eval();
  return est;
}

BaselineTestResult baseline_t_test(const TimeSeriesDataset& data,
                                   QuantileLevel tau,
                                   Eigen::Index coefficient_index,
                                   double null_value, MeatMode mode,
                                   double nu) {
  if (coefficient_index < 0 || coefficient_index >= data.k())
    throw ConfigError("coefficient index out of range");
  if (!(nu > 0.0 && nu < 1.0))
    throw ConfigError("significance level nu must lie in (0,1)");

  const QrFit fit = fit_qr(data, tau);
  const auto est = qr_sandwich(data, tau, fit.alpha_hat, mode);
  const double variance = est.sandwich(coefficient_index, coefficient_index);
  if (!(variance > 0.0))
    throw NumericError("non-positive estimated variance for coefficient " +
                       std::to_string(coefficient_index));

  BaselineTestResult result;
  result.se = std::sqrt(variance);
  result.statistic = std::sqrt(static_cast<double>(data.n())) *
                     (fit.alpha_hat[coefficient_index] - null_value) /
                     result.se;
  result.p_value = 2.0 * (1.0 - normal_cdf(std::fabs(result.statistic)));
  result.reject =
      std::fabs(result.statistic) > normal_quantile(1.0 - nu / 2.0);
  return result;
}

}  // namespace snreg

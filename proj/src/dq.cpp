#include "snreg/dq.hpp"

#include <Eigen/QR>

#include "snreg/qr.hpp"
#include "snreg/stats.hpp"

namespace snreg {

HitSequence compute_hits(const TimeSeriesDataset& data, QuantileLevel tau,
                         const Eigen::VectorXd& alpha_hat) {
  if (alpha_hat.size() != data.k())
    throw ConfigError("alpha_hat has length " +
                      std::to_string(alpha_hat.size()) + ", expected " +
                      std::to_string(data.k()));
  const Eigen::VectorXd r = data.y() - data.x() * alpha_hat;
  HitSequence seq;
  seq.tau = tau.tau;
  seq.hits.resize(r.size());
  for (Eigen::Index t = 0; t < r.size(); ++t) seq.hits[t] = psi(r[t], tau);
  return seq;
}

DqResult dq_test(const HitSequence& hits, int lags) {
  if (lags < 1) throw ConfigError("lags must be >= 1");
  const Eigen::Index n = hits.hits.size();
  if (n <= lags + 1)
    throw ConfigError("need n > lags + 1 observations, got n = " +
                      std::to_string(n));
  const double tau = hits.tau;
  if (!(tau > 0.0 && tau < 1.0))
    throw ConfigError("hit sequence carries an invalid tau");

  const Eigen::Index m = n - lags;
  Eigen::MatrixXd z(m, lags + 1);
  Eigen::VectorXd h(m);
  for (Eigen::Index t = 0; t < m; ++t) {
    h[t] = hits.hits[t + lags];
    z(t, 0) = 1.0;
    for (int l = 1; l <= lags; ++l) z(t, l) = hits.hits[t + lags - l];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
  qr.setThreshold(1e-10);
  if (qr.rank() < lags + 1)
    throw NumericError(
        "degenerate Dynamic Quantile regressors (rank " +
        std::to_string(qr.rank()) + " of " + std::to_string(lags + 1) +
        "); constant hit sequences carry no testable dynamics");

  const Eigen::VectorXd fitted = z * qr.solve(h);
  DqResult result;
  result.statistic = h.dot(fitted) / (tau * (1.0 - tau));
  result.df = lags + 1;
  result.p_value = chi_square_sf(result.statistic, result.df);
  return result;
}

}  // namespace snreg

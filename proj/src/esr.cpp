#include "snreg/esr.hpp"

#include <Eigen/QR>
#include <cmath>
#include <vector>

namespace snreg {

namespace {

std::vector<Eigen::Index> exceedance_rows(const TimeSeriesDataset& data,
                                          const Eigen::VectorXd& alpha_hat,
                                          TailSide side, Eigen::Index window) {
  const Eigen::VectorXd r =
      data.y().head(window) - data.x().topRows(window) * alpha_hat;
  const double tol = residual_zero_tol(data.y().head(window));
  std::vector<Eigen::Index> rows;
  rows.reserve(static_cast<std::size_t>(window));
  for (Eigen::Index t = 0; t < window; ++t) {
    const bool in = side == TailSide::upper ? r[t] > tol : r[t] < -tol;
    if (in) rows.push_back(t);
  }
  return rows;
}

}  // namespace

EsFit fit_es(const TimeSeriesDataset& data, QuantileLevel tau,
             const Eigen::VectorXd& alpha_hat, TailSide side,
             Eigen::Index window, double rank_tol) {
  const Eigen::Index k = data.k();
  if (alpha_hat.size() != k)
    throw ConfigError("alpha_hat has length " +
                      std::to_string(alpha_hat.size()) + ", expected k = " +
                      std::to_string(k));
  if (window < k + 1 || window > data.n())
    throw ConfigError("window must lie in [k+1, n], got " +
                      std::to_string(window));

  const auto rows = exceedance_rows(data, alpha_hat, side, window);
  const auto m = static_cast<Eigen::Index>(rows.size());
  if (m < k)
    throw NumericError(
        "too few quantile exceedances on window " + std::to_string(window) +
        ": got " + std::to_string(m) + ", need at least k = " +
        std::to_string(k) +
        "; a larger trim fraction epsilon enlarges the smallest window "
        "(tail regressions at high tau need epsilon around 0.25-0.3)");

  Eigen::MatrixXd xs(m, k);
  Eigen::VectorXd ys(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    xs.row(i) = data.x().row(rows[static_cast<std::size_t>(i)]);
    ys[i] = data.y()[rows[static_cast<std::size_t>(i)]];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
  qr.setThreshold(rank_tol);
  if (qr.rank() < k)
    throw NumericError("rank-deficient exceedance design on window " +
                       std::to_string(window) + " (" + std::to_string(m) +
                       " exceedances)");

  EsFit fit;
  fit.beta_hat = qr.solve(ys);
  fit.alpha_hat = alpha_hat;
  fit.tau = tau.tau;
  fit.side = side;
  fit.n_exceed = m;
  fit.window = window;
  return fit;
}

EstimatePath expanding_es_path(const TimeSeriesDataset& data,
                               QuantileLevel tau, TrimFraction epsilon,
                               TailSide side, const QrOptions& opts) {
  const EstimatePath qr_path = expanding_qr_path(data, tau, epsilon, opts);

  EstimatePath path;
  path.j_start = qr_path.j_start;
  path.n = qr_path.n;
  path.tau = tau.tau;
  path.epsilon = epsilon.epsilon;
  path.coefficients.reserve(qr_path.coefficients.size());
  for (Eigen::Index j = qr_path.j_start; j <= qr_path.n; ++j) {
    try {
      path.coefficients.push_back(
          fit_es(data, tau, qr_path.at(j), side, j, opts.rank_tol).beta_hat);
    } catch (const NumericError& e) {
      throw NumericError("expanding ES path failed at window " +
                         std::to_string(j) + ": " + e.what());
    }
  }
  return path;
}

Eigen::VectorXd es_generalized_errors(const TimeSeriesDataset& data,
                                      const Eigen::VectorXd& alpha_hat,
                                      const Eigen::VectorXd& beta_hat,
                                      TailSide side) {
  const Eigen::Index n = data.n();
  const Eigen::VectorXd r_q = data.y() - data.x() * alpha_hat;
  const Eigen::VectorXd r_e = data.y() - data.x() * beta_hat;
  const double tol = residual_zero_tol(data.y());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const bool in = side == TailSide::upper ? r_q[t] > tol : r_q[t] < -tol;
    if (in) out[t] = r_e[t];
  }
  return out;
}

}  // namespace snreg

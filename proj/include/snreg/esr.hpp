#pragma once

#include <Eigen/Core>

#include "snreg/dataset.hpp"
#include "snreg/qr.hpp"

namespace snreg {

// Which conditional tail the second-step regression averages over. `upper`
// is the expected shortfall of the theory sections, E[Y | Y > Q_tau];
// `lower` is the Growth-at-Risk convention E[Y | Y <= Q_tau] (and its
// right-tail mirror, the expected longrise, is `upper` at a high tau).
enum class TailSide { upper, lower };

struct EsFit {
  Eigen::VectorXd beta_hat;
  Eigen::VectorXd alpha_hat;  // first-step QR coefficients used
  double tau = 0.0;
  TailSide side = TailSide::upper;
  Eigen::Index n_exceed = 0;
  Eigen::Index window = 0;
};

// Least squares on the quantile-exceedance subsample of observations
// 1..window. Residuals within residual_zero_tol of the fitted quantile sit
// on the regression plane itself and are excluded from both tails, which
// reproduces the exact-solver semantics of the strict indicator
// 1{Y > X'alpha} at interior-point solutions.
EsFit fit_es(const TimeSeriesDataset& data, QuantileLevel tau,
             const Eigen::VectorXd& alpha_hat, TailSide side,
             Eigen::Index window, double rank_tol = 1e-10);

// Expanding two-step path: entry j gates the window-j least squares with the
// window-j QR fit. Entries run from floor(n*epsilon) to n.
EstimatePath expanding_es_path(const TimeSeriesDataset& data,
                               QuantileLevel tau, TrimFraction epsilon,
                               TailSide side, const QrOptions& opts = {});

// ES generalized errors psi_*(eps_t, xi_t) = 1{exceedance} * (y_t - x_t'beta)
// evaluated at given first- and second-step coefficients. Mean-zero at the
// population values; exposed as a residual diagnostic.
Eigen::VectorXd es_generalized_errors(const TimeSeriesDataset& data,
                                      const Eigen::VectorXd& alpha_hat,
                                      const Eigen::VectorXd& beta_hat,
                                      TailSide side);

}  // namespace snreg

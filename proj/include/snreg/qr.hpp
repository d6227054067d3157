#pragma once

#include <Eigen/Core>
#include <vector>

#include "snreg/dataset.hpp"

namespace snreg {

// Tick (pinball) loss rho(u) = u * (tau - 1{u <= 0}). Always >= 0.
double tick_loss(double u, QuantileLevel tau);

// Loss subgradient psi(u) = tau - 1{u <= 0}. The boundary follows the closed
// indicator: psi(0) = tau - 1.
double psi(double u, QuantileLevel tau);

struct QrOptions {
  // Duality-gap tolerance, relative to 1 + |objective|.
  double opt_tol = 1e-9;
  int max_iterations = 100;
  // Rank cutoff: smallest singular value must exceed rank_tol * largest.
  double rank_tol = 1e-10;
  // Reuse the previous window's primal-dual point along expanding paths.
  bool warm_start = true;
};

struct QrFit {
  Eigen::VectorXd alpha_hat;
  double tau = 0.0;
  double objective = 0.0;
  Eigen::Index window = 0;
  int iterations = 0;
};

// Scale below which a residual counts as zero (interior-point solutions are
// interior approximations of vertex solutions): 1e-7 * (1 + max|y|).
double residual_zero_tol(const Eigen::Ref<const Eigen::VectorXd>& y);

// Minimizes sum_{t=1..window} tick_loss(y_t - x_t' alpha) over alpha by a
// primal-dual interior-point method on the LP formulation.
QrFit fit_qr(const TimeSeriesDataset& data, QuantileLevel tau,
             Eigen::Index window, const QrOptions& opts = {});
QrFit fit_qr(const TimeSeriesDataset& data, QuantileLevel tau,
             const QrOptions& opts = {});

// Expanding-window coefficient estimates for j = floor(n*epsilon) .. n,
// entry j holding the fit on observations 1..j.
struct EstimatePath {
  Eigen::Index j_start = 0;
  Eigen::Index n = 0;
  double tau = 0.0;
  double epsilon = 0.0;
  std::vector<Eigen::VectorXd> coefficients;

  const Eigen::VectorXd& at(Eigen::Index j) const {
    return coefficients.at(static_cast<std::size_t>(j - j_start));
  }
  const Eigen::VectorXd& full_sample() const { return coefficients.back(); }
  Eigen::Index k() const {
    return coefficients.empty() ? 0 : coefficients.front().size();
  }
};

EstimatePath expanding_qr_path(const TimeSeriesDataset& data,
                               QuantileLevel tau, TrimFraction epsilon,
                               const QrOptions& opts = {});

// Subgradient optimality box: for every column c,
//   |sum_t psi(r_t) x_tc| <= sum_{|r_t| <= tol} |x_tc| + slack * (1 + sum_t |x_tc|).
bool subgradient_box_holds(const TimeSeriesDataset& data, QuantileLevel tau,
                           const Eigen::VectorXd& alpha, Eigen::Index window,
                           double slack = 1e-6);

}  // namespace snreg

#pragma once

#include <Eigen/Core>

#include "snreg/dataset.hpp"

namespace snreg {

// Realized QR generalized errors psi(r_t) = tau - 1{r_t <= 0}; every entry is
// tau - 1 or tau.
struct HitSequence {
  Eigen::VectorXd hits;
  double tau = 0.0;
};

HitSequence compute_hits(const TimeSeriesDataset& data, QuantileLevel tau,
                         const Eigen::VectorXd& alpha_hat);

struct DqResult {
  double statistic = 0.0;
  double p_value = 0.0;
  int df = 0;
};

// Dynamic Quantile test of i.i.d. hits: projects the hit vector on an
// intercept plus `lags` lagged hits and refers
// H'Z(Z'Z)^{-1}Z'H / (tau(1-tau)) to chi-square with lags+1 degrees of
// freedom. A rank-deficient regressor matrix (e.g. constant hits) is
// reported as degenerate instead of fabricating a p-value.
DqResult dq_test(const HitSequence& hits, int lags);

}  // namespace snreg

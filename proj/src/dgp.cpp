#include "snreg/dgp.hpp"

#include <cmath>

#include "snreg/rng.hpp"
#include "snreg/stats.hpp"

namespace snreg {

void DgpConfig::validate() const {
  if (n < 1) throw ConfigError("sample size n must be >= 1");
  if (!(std::fabs(rho_x) < 1.0))
    throw ConfigError("|rho_x| must be < 1 for a stationary regressor");
  if (!(std::fabs(rho) < 1.0))
    throw ConfigError("|rho| must be < 1 for stationary errors");
  if (burn_in < 0) throw ConfigError("burn_in must be >= 0");
}

TimeSeriesDataset generate(const DgpConfig& config, std::uint64_t seed) {
  config.validate();
  NormalSampler normal(seed);

  const double x_sd = std::sqrt(1.0 - config.rho_x * config.rho_x);
  double x = normal();
  double e = normal();
  const double nu_sd = std::sqrt(1.0 - config.rho * config.rho);

  for (Eigen::Index b = 0; b < config.burn_in; ++b) {
    x = config.rho_x * x + x_sd * normal();
    e = config.rho * e + nu_sd * normal();
  }

  Eigen::VectorXd y(config.n);
  Eigen::MatrixXd xmat(config.n, 2);
  for (Eigen::Index t = 0; t < config.n; ++t) {
    x = config.rho_x * x + x_sd * normal();
    e = config.rho * e + nu_sd * normal();
    xmat(t, 0) = 1.0;
    xmat(t, 1) = x;
    y[t] = config.delta[0] + config.delta[1] * x +
           (config.eta[0] + config.eta[1] * x) * e;
  }
  return TimeSeriesDataset(std::move(y), std::move(xmat), {"const", "x"});
}

TrueCoefficients true_coefficients(const DgpConfig& config,
                                   QuantileLevel tau) {
  config.validate();
  const double q = normal_quantile(tau.tau);
  const double es = normal_es_upper(tau.tau);
  TrueCoefficients coeffs;
  coeffs.alpha0 = config.delta + config.eta * q;
  coeffs.beta0_upper = config.delta + config.eta * es;
  return coeffs;
}

double null_hypothesis_value(const DgpConfig& config, QuantileLevel tau,
                             double delta2_circ, TargetKind target) {
  const double tail = target == TargetKind::quantile
                          ? normal_quantile(tau.tau)
                          : normal_es_upper(tau.tau);
  return delta2_circ + config.eta[1] * tail;
}

double default_epsilon(TargetKind target, Eigen::Index n, double tau) {
  if (target == TargetKind::quantile) return 0.1;
  if (n == 100 && tau >= 0.9) return 0.3;
  return 0.25;
}

}  // namespace snreg

#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "snreg/dataset.hpp"

namespace snreg {

// Whether a hypothesis targets the quantile slope or the expected-shortfall
// slope of the simulation design.
enum class TargetKind { quantile, es };

// Location-scale time series regression: X_t = (1, x_t)' with AR(1) regressor
// x_t (coefficient rho_x), Y_t = X_t'delta + (X_t'eta) e_t and AR(1) errors
// e_t with innovation variance 1 - rho^2, so e_t is N(0,1) marginally for
// every |rho| < 1.
struct DgpConfig {
  Eigen::Index n = 0;
  double rho_x = 0.8;
  double rho = 0.0;
  Eigen::Vector2d delta{0.0, 1.0};
  Eigen::Vector2d eta{2.0, 0.5};
  Eigen::Index burn_in = 0;  // both chains start at stationarity already

  void validate() const;
};

// Named parameter grids of the simulation study. Values other than the grid
// axes are fixed at rho_x = 0.8, delta = (0,1)', eta = (2,0.5)'.
inline constexpr Eigen::Index kPresetSampleSizes[] = {100, 200, 500, 1000};
inline constexpr double kPresetRho[] = {0.0, 0.5, 0.9};
inline constexpr double kPresetTau[] = {0.5, 0.75, 0.9};

// Deterministic draw for a given seed: chains are initialized at their
// stationary laws (x_0 ~ N(0, 1/(1-rho_x^2)), e_0 ~ N(0,1)), advanced
// through burn_in extra steps, then sampled for t = 1..n. Draw order per
// step is (x innovation, e innovation).
TimeSeriesDataset generate(const DgpConfig& config, std::uint64_t seed);

struct TrueCoefficients {
  Eigen::Vector2d alpha0;        // delta + eta * Q_tau(e)
  Eigen::Vector2d beta0_upper;   // delta + eta * ES_tau(e), upper tail
};

TrueCoefficients true_coefficients(const DgpConfig& config, QuantileLevel tau);

// delta2_circ + eta_2 * Q_tau(e) or + eta_2 * ES_tau(e); equals the true
// slope exactly when delta2_circ equals the config's delta[1].
double null_hypothesis_value(const DgpConfig& config, QuantileLevel tau,
                             double delta2_circ, TargetKind target);

// Default trim fraction rule: 0.1 for quantile inference, 0.25 for ES, 0.3
// for the data-hungry n = 100, tau = 0.9 tail case.
double default_epsilon(TargetKind target, Eigen::Index n, double tau);

}  // namespace snreg

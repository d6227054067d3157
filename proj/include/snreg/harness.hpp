#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "snreg/dgp.hpp"
#include "snreg/esr.hpp"
#include "snreg/limitdist.hpp"

namespace snreg {

enum class Method { sn, iid, hac };

std::string method_name(Method method);
Method method_from_name(const std::string& name);
std::string target_name(TargetKind target);
TargetKind target_from_name(const std::string& name);

// Inclusive delta2 grid start..stop in increments of step.
struct SweepSpec {
  double start = 0.5;
  double stop = 1.5;
  double step = 0.25;
  std::vector<double> values() const;
};

struct ExperimentConfig {
  DgpConfig dgp;
  double tau = 0.5;
  // 0 resolves through default_epsilon(target, n, tau).
  double epsilon = 0.0;
  TargetKind target = TargetKind::quantile;
  std::vector<Method> methods{Method::sn};
  // Null-hypothetical delta2 values; empty means the true delta2 (size runs).
  std::vector<double> delta2_grid;
  int replications = 2000;
  double nu = 0.05;
  std::uint64_t base_seed = 12345;
  int threads = 0;
  // Retain per-replication statistics in the result (needed by size_adjust).
  bool keep_stats = false;

  std::string cache_dir = default_cache_dir();
  int cv_grid_steps = kDefaultCvGridSteps;
  int cv_replications = kDefaultCvReplications;
  std::uint64_t cv_seed = kDefaultCvSeed;

  double resolved_epsilon() const;
  std::vector<double> resolved_grid() const;
  void validate() const;
};

struct RejectionRow {
  Eigen::Index n = 0;
  double rho = 0.0;
  double rho_x = 0.0;
  double tau = 0.0;
  double epsilon = 0.0;
  TargetKind target = TargetKind::quantile;
  Method method = Method::sn;
  double nu = 0.05;
  double delta2_circ = 1.0;
  double null_value = 0.0;
  int rejections = 0;
  int completed = 0;
  int failures = 0;
  bool size_adjusted = false;

  double rejection_pct() const;
  double mc_se_pct() const;
};

struct RejectionTable {
  std::vector<RejectionRow> rows;
  std::vector<Method> methods;
  std::vector<double> delta2_grid;
  double nu = 0.05;
  int replications = 0;
  // statistics[mi][di] holds the completed replications' statistics (T_n for
  // SN, |t| for the baselines); present only when keep_stats was set.
  std::vector<std::vector<std::vector<double>>> statistics;

  const RejectionRow& row(Method method, double delta2_circ) const;
};

// Tests the true null (delta2_circ = delta2) per replication and aggregates
// rejection frequencies. Deterministic for fixed (config, base_seed)
// regardless of thread count. Per-replication estimation failures are
// counted and surfaced; the run aborts when they exceed 1% of R.
RejectionTable run_size_experiment(const ExperimentConfig& config);

// As the size experiment, for every delta2_circ grid point. The same
// replication seeds are shared across grid points, so the grid point at the
// true delta2 reproduces the size run exactly.
RejectionTable run_power_experiment(const ExperimentConfig& config);

// Replaces the nominal critical value with the empirical (1-nu)-quantile of
// the per-method null statistics from the size run, then recounts the power
// rejections. Both tables must retain raw statistics.
RejectionTable size_adjust(const RejectionTable& power,
                           const RejectionTable& size);

void write_rejection_csv(std::ostream& out, const RejectionTable& table);
void write_statistics_csv(std::ostream& out, const RejectionTable& table);

struct EmpiricalOptions {
  TargetKind target = TargetKind::quantile;
  TailSide side = TailSide::upper;
  double epsilon = 0.0;  // 0 resolves through default_epsilon per tau
  double nu = 0.05;
  int dq_lags = 10;
  int threads = 0;
  std::string cache_dir = default_cache_dir();
  int cv_grid_steps = kDefaultCvGridSteps;
  int cv_replications = kDefaultCvReplications;
  std::uint64_t cv_seed = kDefaultCvSeed;
};

struct EmpiricalRow {
  double tau = 0.0;
  TargetKind target = TargetKind::quantile;
  TailSide side = TailSide::upper;
  std::string coefficient;
  double estimate = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double epsilon = 0.0;
  Eigen::Index n = 0;
  Eigen::Index n_exceed = 0;     // ES fits only; 0 otherwise
  double dq_statistic = 0.0;     // quantile target only; NaN otherwise
  double dq_p_value = 0.0;
};

// Full-sample coefficients with SN confidence intervals per tau (plus the
// Dynamic Quantile diagnostic for quantile targets), one row per
// (tau, coefficient).
std::vector<EmpiricalRow> run_empirical(const TimeSeriesDataset& data,
                                        const std::vector<double>& taus,
                                        const EmpiricalOptions& options);

void write_empirical_csv(std::ostream& out,
                         const std::vector<EmpiricalRow>& rows, double nu);

}  // namespace snreg

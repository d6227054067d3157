#include "snreg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "snreg/dq.hpp"
#include "snreg/baselines.hpp"
#include "snreg/rng.hpp"
#include "snreg/sn.hpp"
#include "snreg/stats.hpp"

namespace snreg {

std::string method_name(Method method) {
  switch (method) {
    case Method::sn: return "sn";
    case Method::iid: return "iid";
    case Method::hac: return "hac";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "sn" || name == "SN") return Method::sn;
  if (name == "iid" || name == "IID") return Method::iid;
  if (name == "hac" || name == "HAC") return Method::hac;
  throw ConfigError("unknown method '" + name + "' (expected sn, iid, hac)");
}

std::string target_name(TargetKind target) {
  return target == TargetKind::quantile ? "quantile" : "es";
}

TargetKind target_from_name(const std::string& name) {
  if (name == "quantile") return TargetKind::quantile;
  if (name == "es") return TargetKind::es;
  throw ConfigError("unknown target '" + name + "' (expected quantile, es)");
}

std::vector<double> SweepSpec::values() const {
  if (!(step > 0.0)) throw ConfigError("sweep step must be positive");
  if (stop < start - 1e-12) throw ConfigError("sweep stop below start");
  std::vector<double> grid;
  for (double v = start; v <= stop + 1e-9 * step; v += step)
    grid.push_back(v);
  return grid;
}

double ExperimentConfig::resolved_epsilon() const {
  return epsilon > 0.0 ? epsilon : default_epsilon(target, dgp.n, tau);
}

std::vector<double> ExperimentConfig::resolved_grid() const {
  return delta2_grid.empty() ? std::vector<double>{dgp.delta[1]} : delta2_grid;
}

void ExperimentConfig::validate() const {
  dgp.validate();
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0,1)");
  const double eps = resolved_epsilon();
  if (!(eps > 0.0 && eps < 1.0))
    throw ConfigError("epsilon must lie in (0,1)");
  if (methods.empty()) throw ConfigError("no methods requested");
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("nu must lie in (0,1)");
  if (target == TargetKind::es)
    for (Method m : methods)
      if (m != Method::sn)
        throw ConfigError("the es target supports the sn method only");
}

double RejectionRow::rejection_pct() const {
  return completed > 0 ? 100.0 * rejections / completed : 0.0;
}

double RejectionRow::mc_se_pct() const {
  if (completed <= 0) return 0.0;
  const double p = static_cast<double>(rejections) / completed;
  return 100.0 * std::sqrt(p * (1.0 - p) / completed);
}

const RejectionRow& RejectionTable::row(Method method,
                                        double delta2_circ) const {
  for (const auto& r : rows)
    if (r.method == method && std::fabs(r.delta2_circ - delta2_circ) < 1e-12)
      return r;
  throw ConfigError("no row for method " + method_name(method) +
                    " at delta2 = " + std::to_string(delta2_circ));
}

namespace {

void parallel_replications(int replications, int threads,
                           const std::function<void(int)>& body) {
  int nthreads = threads > 0
                     ? threads
                     : static_cast<int>(std::thread::hardware_concurrency());
  if (nthreads < 1) nthreads = 1;
  nthreads = std::min(nthreads, replications);
  if (nthreads <= 1) {
    for (int r = 0; r < replications; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t)
    pool.emplace_back([&, t] {
      for (int r = t; r < replications; r += nthreads) body(r);
    });
  for (auto& th : pool) th.join();
}

RejectionTable run_experiment(const ExperimentConfig& config,
                              const std::vector<double>& grid) {
  config.validate();
  if (grid.empty()) throw ConfigError("empty delta2 grid");
  const double eps = config.resolved_epsilon();
  const QuantileLevel tau(config.tau);
  const TrimFraction trim(eps);
  const int r_total = config.replications;
  const auto nm = config.methods.size();
  const auto nd = grid.size();

  std::vector<double> null_values(nd);
  for (std::size_t d = 0; d < nd; ++d)
    null_values[d] =
        null_hypothesis_value(config.dgp, tau, grid[d], config.target);

  bool needs_sn = false, needs_baseline = false;
  for (Method m : config.methods)
    (m == Method::sn ? needs_sn : needs_baseline) = true;

  CriticalValueTable table;
  double sn_crit = 0.0;
  if (needs_sn) {
    table = get_or_build_table(config.cache_dir, 1, eps, config.cv_grid_steps,
                               config.cv_replications, config.cv_seed,
                               config.threads);
    sn_crit = critical_value(table, config.nu);
  }
  const double z_crit = normal_quantile(1.0 - config.nu / 2.0);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> stats(nm * nd * static_cast<std::size_t>(r_total), nan);
  std::vector<unsigned char> failed(static_cast<std::size_t>(r_total), 0);
  std::mutex message_mutex;
  std::string first_failure;

  auto stat_at = [&](std::size_t mi, std::size_t di, int r) -> double& {
    return stats[(mi * nd + di) * static_cast<std::size_t>(r_total) +
                 static_cast<std::size_t>(r)];
  };

  parallel_replications(r_total, config.threads, [&](int r) {
    try {
      const auto data =
          generate(config.dgp, mix_seed(config.base_seed,
                                        static_cast<std::uint64_t>(r)));
      const double n = static_cast<double>(data.n());

      double slope = 0.0, s_scalar = 0.0;
      Eigen::VectorXd full_alpha;
      if (needs_sn) {
        const EstimatePath path =
            config.target == TargetKind::quantile
                ? expanding_qr_path(data, tau, trim)
                : expanding_es_path(data, tau, trim, TailSide::upper);
        const auto contrast = Contrast::coefficient(1, data.k(), 0.0);
        const Eigen::MatrixXd s = sn_matrix(path, contrast);
        s_scalar = s(0, 0);
        if (!(s_scalar > 0.0))
          throw NumericError("degenerate normalizer S_n");
        slope = path.full_sample()[1];
        if (config.target == TargetKind::quantile)
          full_alpha = path.full_sample();
      }

      // The quantile path already ends in the exact full-sample fit.
      if (needs_baseline && full_alpha.size() == 0)
        full_alpha = fit_qr(data, tau).alpha_hat;

      for (std::size_t mi = 0; mi < nm; ++mi) {
        const Method method = config.methods[mi];
        if (method == Method::sn) {
          for (std::size_t di = 0; di < nd; ++di) {
            const double dev = slope - null_values[di];
            stat_at(mi, di, r) = n * dev * dev / s_scalar;
          }
        } else {
          const auto est = qr_sandwich(data, tau, full_alpha,
                                       method == Method::iid ? MeatMode::iid
                                                             : MeatMode::hac);
          const double variance = est.sandwich(1, 1);
          if (!(variance > 0.0))
            throw NumericError("non-positive baseline variance");
          const double se = std::sqrt(variance);
          for (std::size_t di = 0; di < nd; ++di)
            stat_at(mi, di, r) =
                std::fabs(std::sqrt(n) * (full_alpha[1] - null_values[di]) /
                          se);
        }
      }
    } catch (const std::exception& e) {
      failed[static_cast<std::size_t>(r)] = 1;
      std::lock_guard<std::mutex> lock(message_mutex);
      if (first_failure.empty()) first_failure = e.what();
    }
  });

  int failures = 0;
  for (auto f : failed) failures += f;
  if (failures > 0.01 * r_total)
    throw NumericError("estimation failed in " + std::to_string(failures) +
                       " of " + std::to_string(r_total) +
                       " replications (> 1%); first failure: " +
                       first_failure);

  RejectionTable result;
  result.methods = config.methods;
  result.delta2_grid = grid;
  result.nu = config.nu;
  result.replications = r_total;
  if (config.keep_stats)
    result.statistics.assign(nm, std::vector<std::vector<double>>(nd));

  for (std::size_t mi = 0; mi < nm; ++mi) {
    const Method method = config.methods[mi];
    const double crit = method == Method::sn ? sn_crit : z_crit;
    for (std::size_t di = 0; di < nd; ++di) {
      RejectionRow row;
      row.n = config.dgp.n;
      row.rho = config.dgp.rho;
      row.rho_x = config.dgp.rho_x;
      row.tau = config.tau;
      row.epsilon = eps;
      row.target = config.target;
      row.method = method;
      row.nu = config.nu;
      row.delta2_circ = grid[di];
      row.null_value = null_values[di];
      row.failures = failures;
      for (int r = 0; r < r_total; ++r) {
        if (failed[static_cast<std::size_t>(r)]) continue;
        const double stat = stat_at(mi, di, r);
        ++row.completed;
        if (stat > crit) ++row.rejections;
        if (config.keep_stats) result.statistics[mi][di].push_back(stat);
      }
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

}  // namespace

RejectionTable run_size_experiment(const ExperimentConfig& config) {
  return run_experiment(config, {config.dgp.delta[1]});
}

RejectionTable run_power_experiment(const ExperimentConfig& config) {
  return run_experiment(config, config.resolved_grid());
}

RejectionTable size_adjust(const RejectionTable& power,
                           const RejectionTable& size) {
  if (power.statistics.empty() || size.statistics.empty())
    throw ConfigError(
        "size_adjust needs raw statistics; run with keep_stats enabled");
  if (size.delta2_grid.size() != 1)
    throw ConfigError("the size table must hold a single (true-null) row");
  if (std::fabs(power.nu - size.nu) > 1e-12)
    throw ConfigError("power and size tables use different nu");

  RejectionTable adjusted;
  adjusted.methods = power.methods;
  adjusted.delta2_grid = power.delta2_grid;
  adjusted.nu = power.nu;
  adjusted.replications = power.replications;

  for (std::size_t mi = 0; mi < power.methods.size(); ++mi) {
    const Method method = power.methods[mi];
    const auto si =
        std::find(size.methods.begin(), size.methods.end(), method);
    if (si == size.methods.end())
      throw ConfigError("size table lacks method " + method_name(method));
    auto null_stats =
        size.statistics[static_cast<std::size_t>(si - size.methods.begin())]
                       [0];
    if (null_stats.empty())
      throw ConfigError("size table holds no completed statistics");
    std::sort(null_stats.begin(), null_stats.end());
    const double crit = sorted_quantile(null_stats, 1.0 - power.nu);

    for (std::size_t di = 0; di < power.delta2_grid.size(); ++di) {
      RejectionRow row = power.row(method, power.delta2_grid[di]);
      row.size_adjusted = true;
      row.rejections = 0;
      row.completed = 0;
      for (double stat : power.statistics[mi][di]) {
        ++row.completed;
        if (stat > crit) ++row.rejections;
      }
      adjusted.rows.push_back(std::move(row));
    }
  }
  return adjusted;
}

namespace {

void write_double(std::ostream& out, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  out << buf;
}

}  // namespace

void write_rejection_csv(std::ostream& out, const RejectionTable& table) {
  out << "#schema snreg.rejection.v1\n";
  out << "n,rho,rho_x,tau,epsilon,target,method,nu,delta2_circ,null_value,"
         "replications,completed,failures,rejections,rejection_pct,mc_se_pct,"
         "adjusted\n";
  for (const auto& r : table.rows) {
    out << r.n << ',';
    write_double(out, r.rho);
    out << ',';
    write_double(out, r.rho_x);
    out << ',';
    write_double(out, r.tau);
    out << ',';
    write_double(out, r.epsilon);
    out << ',' << target_name(r.target) << ',' << method_name(r.method)
        << ',';
    write_double(out, r.nu);
    out << ',';
    write_double(out, r.delta2_circ);
    out << ',';
    write_double(out, r.null_value);
    out << ',' << (r.completed + r.failures) << ',' << r.completed << ','
        << r.failures << ',' << r.rejections << ',';
    write_double(out, r.rejection_pct());
    out << ',';
    write_double(out, r.mc_se_pct());
    out << ',' << (r.size_adjusted ? 1 : 0) << '\n';
  }
}

void write_statistics_csv(std::ostream& out, const RejectionTable& table) {
  if (table.statistics.empty())
    throw ConfigError("table holds no raw statistics");
  out << "#schema snreg.stats.v1\n";
  out << "method,delta2_circ,statistic\n";
  for (std::size_t mi = 0; mi < table.methods.size(); ++mi)
    for (std::size_t di = 0; di < table.delta2_grid.size(); ++di)
      for (double stat : table.statistics[mi][di]) {
        out << method_name(table.methods[mi]) << ',';
        write_double(out, table.delta2_grid[di]);
        out << ',';
        write_double(out, stat);
        out << '\n';
      }
}

std::vector<EmpiricalRow> run_empirical(const TimeSeriesDataset& data,
                                        const std::vector<double>& taus,
                                        const EmpiricalOptions& options) {
  if (taus.empty()) throw ConfigError("no quantile levels requested");
  std::vector<EmpiricalRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (double tau_value : taus) {
    try {
      const QuantileLevel tau(tau_value);
      const double eps =
          options.epsilon > 0.0
              ? options.epsilon
              : default_epsilon(options.target, data.n(), tau_value);
      const TrimFraction trim(eps);
      const auto table = get_or_build_table(
          options.cache_dir, 1, eps, options.cv_grid_steps,
          options.cv_replications, options.cv_seed, options.threads);

      EstimatePath path;
      Eigen::Index n_exceed = 0;
      double dq_stat = nan, dq_p = nan;
      if (options.target == TargetKind::quantile) {
        path = expanding_qr_path(data, tau, trim);
        const auto hits = compute_hits(data, tau, path.full_sample());
        const auto dq = dq_test(hits, options.dq_lags);
        dq_stat = dq.statistic;
        dq_p = dq.p_value;
      } else {
        const auto qr_path = expanding_qr_path(data, tau, trim);
        path = expanding_es_path(data, tau, trim, options.side);
        n_exceed = fit_es(data, tau, qr_path.full_sample(), options.side,
                          data.n())
                       .n_exceed;
      }

      for (Eigen::Index c = 0; c < data.k(); ++c) {
        EmpiricalRow row;
        row.tau = tau_value;
        row.target = options.target;
        row.side = options.side;
        row.coefficient = data.names()[static_cast<std::size_t>(c)];
        row.estimate = path.full_sample()[c];
        const auto ci = sn_confidence_interval(path, c, options.nu, table);
        row.ci_lower = ci.first;
        row.ci_upper = ci.second;
        row.epsilon = eps;
        row.n = data.n();
        row.n_exceed = n_exceed;
        row.dq_statistic = dq_stat;
        row.dq_p_value = dq_p;
        rows.push_back(std::move(row));
      }
    } catch (const ConfigError& e) {
      throw ConfigError("tau = " + std::to_string(tau_value) + ": " +
                        e.what());
    } catch (const NumericError& e) {
      throw NumericError("tau = " + std::to_string(tau_value) + ": " +
                         e.what());
    }
  }
  return rows;
}

void write_empirical_csv(std::ostream& out,
                         const std::vector<EmpiricalRow>& rows, double nu) {
  out << "#schema snreg.empirical.v1\n";
  out << "tau,target,side,coefficient,estimate,ci_lower,ci_upper,nu,epsilon,"
         "n,n_exceed,dq_statistic,dq_p_value\n";
  for (const auto& r : rows) {
    write_double(out, r.tau);
    out << ',' << target_name(r.target) << ','
        << (r.side == TailSide::upper ? "upper" : "lower") << ','
        << r.coefficient << ',';
    write_double(out, r.estimate);
    out << ',';
    write_double(out, r.ci_lower);
    out << ',';
    write_double(out, r.ci_upper);
    out << ',';
    write_double(out, nu);
    out << ',';
    write_double(out, r.epsilon);
    out << ',' << r.n << ',' << r.n_exceed << ',';
    write_double(out, r.dq_statistic);
    out << ',';
    write_double(out, r.dq_p_value);
    out << '\n';
  }
}

}  // namespace snreg

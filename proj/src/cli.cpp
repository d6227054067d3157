#include "snreg/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "snreg/dq.hpp"
#include "snreg/harness.hpp"
#include "snreg/sn.hpp"
#include "snreg/stats.hpp"

namespace snreg {

namespace {

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    values.push_back(std::stod(item));
  }
  if (values.empty()) throw ConfigError("empty list '" + csv + "'");
  return values;
}

// Writes to the file when a path is given, else to stdout.
void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw DataError("cannot write '" + out_path + "'");
  out << content;
}

struct DataArgs {
  std::string path;
  std::string response;
  std::vector<std::string> covariates;
  bool intercept = true;
  int lag = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("data", path, "CSV file")->required();
    cmd->add_option("--response", response, "response column")->required();
    cmd->add_option("--covariates", covariates,
                    "covariate columns (comma separated)")
        ->delimiter(',');
    cmd->add_flag("--intercept,!--no-intercept", intercept,
                  "prepend an all-ones column (default on)");
    cmd->add_option("--lag", lag,
                    "shift covariates back this many rows relative to the "
                    "response");
  }

  TimeSeriesDataset load() const {
    return load_csv(path, response, covariates, intercept, lag);
  }
};

struct CvArgs {
  std::string cache_dir = default_cache_dir();
  int grid = kDefaultCvGridSteps;
  int reps = kDefaultCvReplications;
  std::uint64_t seed = kDefaultCvSeed;

  void attach(CLI::App* cmd) {
    cmd->add_option("--cache-dir", cache_dir,
                    "critical-value table cache directory (also via "
                    "SNREG_CACHE_DIR)");
    cmd->add_option("--cv-grid", grid, "Brownian grid steps for W(A)");
    cmd->add_option("--cv-reps", reps, "simulation replications for W(A)");
    cmd->add_option("--cv-seed", seed, "simulation seed for W(A)");
  }
};

int run_critval(const std::string& out_path, int ell, double epsilon,
                int grid, int reps, std::uint64_t seed,
                const std::string& probs_csv, const CvArgs& cv, int threads) {
  auto probs = parse_double_list(probs_csv);
  auto table =
      build_critical_value_table(ell, epsilon, grid, reps, seed, probs,
                                 threads);
  // Also drop the table into the cache so later runs reuse it.
  if (!cv.cache_dir.empty())
    get_or_build_table(cv.cache_dir, ell, epsilon, grid, reps, seed, threads);

  std::ostringstream out;
  out << "#schema snreg.critval.v1\n";
  out << "ell,epsilon,grid_steps,replications,seed,prob,quantile\n";
  char buf[200];
  for (const auto& [p, v] : table.quantiles) {
    std::snprintf(buf, sizeof(buf), "%d,%.12g,%d,%d,%llu,%.12g,%.17g\n",
                  table.ell, table.epsilon, table.grid_steps,
                  table.replications,
                  static_cast<unsigned long long>(table.seed), p, v);
    out << buf;
  }
  emit(out_path, out.str());
  return 0;
}

void apply_preset(const std::string& preset, ExperimentConfig& config) {
  if (preset.empty()) return;
  if (preset == "table1") {
    config.target = TargetKind::quantile;
  } else if (preset == "table2") {
    config.target = TargetKind::es;
  } else {
    throw ConfigError("unknown preset '" + preset +
                      "' (expected table1 or table2)");
  }
  config.dgp.rho_x = 0.8;
  config.dgp.delta = Eigen::Vector2d(0.0, 1.0);
  config.dgp.eta = Eigen::Vector2d(2.0, 0.5);
}

struct SimArgs {
  std::string preset;
  long long n = 200;
  double rho = 0.0;
  double rho_x = 0.8;
  double tau = 0.5;
  double epsilon = 0.0;
  std::vector<double> delta{0.0, 1.0};
  std::vector<double> eta{2.0, 0.5};
  std::string target = "quantile";
  std::string methods = "sn";
  int reps = 2000;
  bool full = false;
  double nu = 0.05;
  std::uint64_t seed = 12345;
  int threads = 0;
  bool keep_stats = false;
  std::string stats_out;

  void attach(CLI::App* cmd) {
    cmd->add_option("--preset", preset,
                    "table1 (quantile) or table2 (es) parameterization");
    cmd->add_option("--n", n, "sample size")->check(CLI::PositiveNumber);
    cmd->add_option("--rho", rho, "error autocorrelation");
    cmd->add_option("--rho-x", rho_x, "regressor autocorrelation");
    cmd->add_option("--tau", tau, "quantile level");
    cmd->add_option("--epsilon", epsilon,
                    "trim fraction (0 selects the per-target default)");
    cmd->add_option("--delta", delta, "location coefficients")
        ->delimiter(',')
        ->expected(2);
    cmd->add_option("--eta", eta, "scale coefficients")
        ->delimiter(',')
        ->expected(2);
    cmd->add_option("--target", target, "quantile or es");
    cmd->add_option("--methods", methods, "subset of sn,iid,hac");
    cmd->add_option("--reps", reps, "Monte Carlo replications");
    cmd->add_flag("--full", full, "use the full 10000 replications");
    cmd->add_option("--nu", nu, "nominal level");
    cmd->add_option("--seed", seed, "base seed");
    cmd->add_option("--threads", threads, "worker threads (0 = all)");
    cmd->add_flag("--keep-stats", keep_stats,
                  "retain per-replication statistics");
    cmd->add_option("--stats-out", stats_out,
                    "write raw statistics CSV here (implies --keep-stats)");
  }

  ExperimentConfig build(const CvArgs& cv) const {
    ExperimentConfig config;
    apply_preset(preset, config);
    config.target = preset.empty() ? target_from_name(target) : config.target;
    config.dgp.n = n;
    config.dgp.rho = rho;
    config.dgp.rho_x = rho_x;
    config.dgp.delta = Eigen::Vector2d(delta[0], delta[1]);
    config.dgp.eta = Eigen::Vector2d(eta[0], eta[1]);
    config.tau = tau;
    config.epsilon = epsilon;
    std::stringstream ss(methods);
    std::string name;
    config.methods.clear();
    while (std::getline(ss, name, ','))
      if (!name.empty()) config.methods.push_back(method_from_name(name));
    config.replications = full ? 10000 : reps;
    config.nu = nu;
    config.base_seed = seed;
    config.threads = threads;
    config.keep_stats = keep_stats || !stats_out.empty();
    config.cache_dir = cv.cache_dir;
    config.cv_grid_steps = cv.grid;
    config.cv_replications = cv.reps;
    config.cv_seed = cv.seed;
    return config;
  }
};

void emit_table(const RejectionTable& table, const std::string& out_path,
                const std::string& stats_out) {
  std::ostringstream out;
  write_rejection_csv(out, table);
  emit(out_path, out.str());
  if (!stats_out.empty()) {
    std::ostringstream stats;
    write_statistics_csv(stats, table);
    emit(stats_out, stats.str());
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{
      "Self-normalized inference for time-series quantile and "
      "expected-shortfall regressions"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a key=value file");

  std::string out_path;
  app.add_option("--out", out_path, "write results to this file")
      ->configurable(false);

  // critval
  auto* critval = app.add_subcommand(
      "critval", "simulate quantiles of the pivotal limit W(A)");
  int cv_ell = 1;
  double cv_epsilon = 0.1;
  int cv_grid = kDefaultCvGridSteps;
  int cv_reps = kDefaultCvReplications;
  std::uint64_t cv_seed_opt = kDefaultCvSeed;
  std::string cv_probs = "0.90,0.95,0.99";
  int cv_threads = 0;
  CvArgs critval_cache;
  critval->add_option("--ell", cv_ell, "contrast rank");
  critval->add_option("--epsilon", cv_epsilon, "trim fraction")->required();
  critval->add_option("--grid", cv_grid, "Brownian grid steps");
  critval->add_option("--reps", cv_reps, "replications");
  critval->add_option("--seed", cv_seed_opt, "seed");
  critval->add_option("--probs", cv_probs, "quantile probabilities");
  critval->add_option("--threads", cv_threads, "worker threads (0 = all)");
  critval->add_option("--cache-dir", critval_cache.cache_dir,
                      "cache directory");

  // simulate-size / simulate-power
  auto* size_cmd =
      app.add_subcommand("simulate-size", "rejection frequency of a true null");
  SimArgs size_args;
  CvArgs size_cv;
  size_args.attach(size_cmd);
  size_cv.attach(size_cmd);

  auto* power_cmd = app.add_subcommand(
      "simulate-power", "rejection frequencies over a delta2 sweep");
  SimArgs power_args;
  CvArgs power_cv;
  double sweep_start = 0.5, sweep_stop = 1.5, sweep_step = 0.25;
  bool adjust = false;
  power_args.attach(power_cmd);
  power_cv.attach(power_cmd);
  power_cmd->add_option("--delta2-start", sweep_start, "sweep start");
  power_cmd->add_option("--delta2-stop", sweep_stop, "sweep stop");
  power_cmd->add_option("--delta2-step", sweep_step, "sweep step");
  power_cmd->add_flag("--size-adjust", adjust,
                      "append size-adjusted rows (implies --keep-stats)");

  // dq-test
  auto* dq_cmd = app.add_subcommand(
      "dq-test", "Dynamic Quantile diagnostic for QR generalized errors");
  DataArgs dq_data;
  double dq_tau = 0.5;
  int dq_lags = 10;
  dq_data.attach(dq_cmd);
  dq_cmd->add_option("--tau", dq_tau, "quantile level")->required();
  dq_cmd->add_option("--lags", dq_lags, "lagged hits in the regression");

  // fit
  auto* fit_cmd = app.add_subcommand(
      "fit", "full-sample fit with SN confidence intervals");
  DataArgs fit_data;
  CvArgs fit_cv;
  std::string fit_target = "quantile", fit_side = "upper";
  double fit_tau = 0.5, fit_epsilon = 0.0, fit_nu = 0.05;
  int fit_threads = 0;
  fit_data.attach(fit_cmd);
  fit_cv.attach(fit_cmd);
  fit_cmd->add_option("--target", fit_target, "quantile or es");
  fit_cmd->add_option("--side", fit_side, "es tail: upper or lower");
  fit_cmd->add_option("--tau", fit_tau, "quantile level")->required();
  fit_cmd->add_option("--epsilon", fit_epsilon,
                      "trim fraction (0 = default rule)");
  fit_cmd->add_option("--nu", fit_nu, "confidence level complement");
  fit_cmd->add_option("--threads", fit_threads, "worker threads");

  // empirical
  auto* emp_cmd = app.add_subcommand(
      "empirical", "coefficient/CI table over a grid of quantile levels");
  DataArgs emp_data;
  CvArgs emp_cv;
  std::string emp_taus = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  std::string emp_target = "quantile", emp_side = "upper";
  double emp_epsilon = 0.0, emp_nu = 0.05;
  int emp_lags = 10, emp_threads = 0;
  emp_data.attach(emp_cmd);
  emp_cv.attach(emp_cmd);
  emp_cmd->add_option("--taus", emp_taus, "comma-separated quantile levels");
  emp_cmd->add_option("--target", emp_target, "quantile or es");
  emp_cmd->add_option("--side", emp_side, "es tail: upper or lower");
  emp_cmd->add_option("--epsilon", emp_epsilon,
                      "trim fraction (0 = default rule)");
  emp_cmd->add_option("--nu", emp_nu, "confidence level complement");
  emp_cmd->add_option("--lags", emp_lags, "DQ lags");
  emp_cmd->add_option("--threads", emp_threads, "worker threads");

  // Global options such as --out may appear after the subcommand name.
  for (CLI::App* sub :
       {critval, size_cmd, power_cmd, dq_cmd, fit_cmd, emp_cmd})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (critval->parsed())
      return run_critval(out_path, cv_ell, cv_epsilon, cv_grid, cv_reps,
                         cv_seed_opt, cv_probs, critval_cache, cv_threads);

    if (size_cmd->parsed()) {
      const auto table = run_size_experiment(size_args.build(size_cv));
      emit_table(table, out_path, size_args.stats_out);
      return 0;
    }

    if (power_cmd->parsed()) {
      auto config = power_args.build(power_cv);
      config.keep_stats = config.keep_stats || adjust;
      SweepSpec sweep{sweep_start, sweep_stop, sweep_step};
      config.delta2_grid = sweep.values();
      auto table = run_power_experiment(config);
      if (adjust) {
        auto size_config = config;
        size_config.delta2_grid.clear();
        const auto size_table = run_size_experiment(size_config);
        const auto adjusted = size_adjust(table, size_table);
        table.rows.insert(table.rows.end(), adjusted.rows.begin(),
                          adjusted.rows.end());
      }
      emit_table(table, out_path, power_args.stats_out);
      return 0;
    }

    if (dq_cmd->parsed()) {
      const auto data = dq_data.load();
      const QuantileLevel tau(dq_tau);
      const auto fit = fit_qr(data, tau);
      const auto hits = compute_hits(data, tau, fit.alpha_hat);
      const auto dq = dq_test(hits, dq_lags);
      std::ostringstream out;
      out << "#schema snreg.dq.v1\n";
      out << "tau,lags,statistic,df,p_value\n";
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%.12g,%d,%.12g,%d,%.12g\n", dq_tau,
                    dq_lags, dq.statistic, dq.df, dq.p_value);
      out << buf;
      emit(out_path, out.str());
      return 0;
    }

    if (fit_cmd->parsed() || emp_cmd->parsed()) {
      const bool is_fit = fit_cmd->parsed();
      const auto data = is_fit ? fit_data.load() : emp_data.load();
      EmpiricalOptions options;
      options.target =
          target_from_name(is_fit ? fit_target : emp_target);
      const std::string side = is_fit ? fit_side : emp_side;
      if (side == "upper")
        options.side = TailSide::upper;
      else if (side == "lower")
        options.side = TailSide::lower;
      else
        throw ConfigError("side must be upper or lower");
      options.epsilon = is_fit ? fit_epsilon : emp_epsilon;
      options.nu = is_fit ? fit_nu : emp_nu;
      options.dq_lags = emp_lags;
      options.threads = is_fit ? fit_threads : emp_threads;
      const CvArgs& cv = is_fit ? fit_cv : emp_cv;
      options.cache_dir = cv.cache_dir;
      options.cv_grid_steps = cv.grid;
      options.cv_replications = cv.reps;
      options.cv_seed = cv.seed;

      const auto taus =
          is_fit ? std::vector<double>{fit_tau} : parse_double_list(emp_taus);
      const auto rows = run_empirical(data, taus, options);
      std::ostringstream out;
      write_empirical_csv(out, rows, options.nu);
      emit(out_path, out.str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace snreg

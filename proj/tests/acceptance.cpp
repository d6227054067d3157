// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Expected wall time is on the order of ten minutes.
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "snreg/dq.hpp"
#include "snreg/harness.hpp"
#include "snreg/rng.hpp"
#include "snreg/sn.hpp"
#include "snreg/stats.hpp"

using namespace snreg;

namespace {

constexpr std::uint64_t kBaseSeed = 12345;
int g_threads = 0;
std::string g_cache = default_cache_dir();

struct Criterion {
  int id;
  bool pass;
  std::string detail;
};

std::vector<Criterion> g_results;

void record(int id, bool pass, const std::string& detail) {
  g_results.push_back({id, pass, detail});
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id,
              detail.c_str());
  std::fflush(stdout);
}

char buffer[512];

// Three binomial standard errors around a table value, in percent.
double three_se(double pct, int reps) {
  const double p = pct / 100.0;
  return 3.0 * 100.0 * std::sqrt(p * (1.0 - p) / reps);
}

ExperimentConfig cell_config(Eigen::Index n, double rho, double tau,
                             TargetKind target,
                             std::vector<Method> methods) {
  ExperimentConfig config;
  config.dgp.n = n;
  config.dgp.rho = rho;
  config.tau = tau;
  config.target = target;
  config.methods = std::move(methods);
  config.replications = 2000;
  config.base_seed = kBaseSeed;
  config.threads = g_threads;
  config.cache_dir = g_cache;
  return config;
}

// Two-stage check of a size cell against a reference value. Stage one is
// the desk-scale run (R = 2000); its 3-sigma binomial band flags a cell
// roughly once per 300 faithful cells by chance alone, so a flagged cell is
// retried once at R = 10000 on disjoint replication streams and judged
// against the same, unwidened band. A genuine deviation beyond the band
// still fails (with far more precision than stage one had); a sampling
// fluke does not.
struct CellCheck {
  double primary = 0.0;
  double confirmed = 0.0;
  bool confirmation_used = false;
  bool pass = false;
};

CellCheck check_size_cell(const ExperimentConfig& base, Method method,
                          double target_pct, double tol_pct,
                          const RejectionTable* primary_table) {
  CellCheck check;
  check.primary =
      primary_table->row(method, base.dgp.delta[1]).rejection_pct();
  check.pass = std::fabs(check.primary - target_pct) <= tol_pct;
  if (check.pass) return check;

  ExperimentConfig confirm = base;
  confirm.methods = {method};
  confirm.replications = 10000;
  confirm.base_seed = kBaseSeed + 7000000;  // disjoint stream family
  const auto table = run_size_experiment(confirm);
  check.confirmation_used = true;
  check.confirmed = table.row(method, base.dgp.delta[1]).rejection_pct();
  check.pass = std::fabs(check.confirmed - target_pct) <= tol_pct;
  return check;
}

void describe_cell(std::string& detail, const CellCheck& check,
                   const std::string& label, double target, double tol) {
  if (check.confirmation_used)
    std::snprintf(buffer, sizeof(buffer),
                  "%s(%s: %.2f, confirmed %.2f at R=10000, vs %.1f+-%.2f)",
                  check.pass ? "" : "<OFF>", label.c_str(), check.primary,
                  check.confirmed, target, tol);
  else
    std::snprintf(buffer, sizeof(buffer), "%s(%s: %.2f vs %.1f+-%.2f)",
                  check.pass ? "" : "<OFF>", label.c_str(), check.primary,
                  target, tol);
  detail += buffer;
}

struct QrCell {
  Eigen::Index n;
  double rho;
  double tau;
  double sn_target;  // reference SN size, percent
};

// Criteria 1 and 3: QR size reproduction and the IID over-rejection.
void criteria_1_and_3() {
  const std::vector<QrCell> cells{
      {200, 0.0, 0.5, 3.9},  {200, 0.0, 0.9, 3.9},  {200, 0.9, 0.5, 5.8},
      {200, 0.9, 0.9, 7.3},  {1000, 0.0, 0.5, 4.4}, {1000, 0.0, 0.9, 4.4},
      {1000, 0.9, 0.5, 4.5}, {1000, 0.9, 0.9, 5.5}};

  bool pass1 = true;
  std::string detail1;
  bool directional = true;
  std::string detail3;
  CellCheck headline;
  double headline_tol = 5.0;

  for (const auto& cell : cells) {
    const bool with_iid = cell.rho > 0.0;
    auto config = cell_config(cell.n, cell.rho, cell.tau, TargetKind::quantile,
                              with_iid ? std::vector<Method>{Method::sn,
                                                             Method::iid}
                                       : std::vector<Method>{Method::sn});
    const auto table = run_size_experiment(config);
    const double tol = three_se(cell.sn_target, 2000);
    const auto check =
        check_size_cell(config, Method::sn, cell.sn_target, tol, &table);
    pass1 = pass1 && check.pass;
    std::snprintf(buffer, sizeof(buffer), "n=%d,rho=%.1f,tau=%.1f: sn",
                  static_cast<int>(cell.n), cell.rho, cell.tau);
    describe_cell(detail1, check, buffer, cell.sn_target, tol);

    if (with_iid) {
      const double iid_pct = table.row(Method::iid, 1.0).rejection_pct();
      const double sn_pct = table.row(Method::sn, 1.0).rejection_pct();
      if (cell.n == 1000 && cell.tau == 0.5)
        headline = check_size_cell(config, Method::iid, 38.7, headline_tol,
                                   &table);
      const bool dir_ok = iid_pct > sn_pct + 10.0;
      directional = directional && dir_ok;
      std::snprintf(buffer, sizeof(buffer),
                    "%s(n=%d,tau=%.1f: iid %.2f vs sn %.2f)",
                    dir_ok ? "" : "<OFF>", static_cast<int>(cell.n), cell.tau,
                    iid_pct, sn_pct);
      detail3 += buffer;
    }
  }
  record(1, pass1, "QR SN sizes vs reference, R=2000, eps=0.1: " + detail1);

  std::string detail_head;
  describe_cell(detail_head, headline, "n=1000,rho=0.9,tau=0.5: iid", 38.7,
                headline_tol);
  record(3, headline.pass && directional,
         "IID headline " + detail_head +
             "; directional IID > SN + 10pp at rho=0.9: " + detail3);
}

void criterion_2() {
  struct EsCell {
    Eigen::Index n;
    double rho;
    double tau;
    double epsilon;
    double target;
  };
  const std::vector<EsCell> cells{{500, 0.0, 0.9, 0.25, 4.0},
                                  {1000, 0.9, 0.5, 0.25, 5.7},
                                  {100, 0.9, 0.9, 0.30, 6.7}};
  bool pass = true;
  std::string detail;
  for (const auto& cell : cells) {
    auto config = cell_config(cell.n, cell.rho, cell.tau, TargetKind::es,
                              {Method::sn});
    config.epsilon = cell.epsilon;
    const auto table = run_size_experiment(config);
    const double tol = three_se(cell.target, 2000) + 1.0;
    const auto check =
        check_size_cell(config, Method::sn, cell.target, tol, &table);
    pass = pass && check.pass;
    std::snprintf(buffer, sizeof(buffer),
                  "n=%d,rho=%.1f,tau=%.1f,eps=%.2f: es (failures %d)",
                  static_cast<int>(cell.n), cell.rho, cell.tau, cell.epsilon,
                  table.row(Method::sn, 1.0).failures);
    describe_cell(detail, check, buffer, cell.target, tol);
  }
  record(2, pass, "ES SN sizes vs reference, R=2000: " + detail);
}

void criterion_4() {
  auto config =
      cell_config(1000, 0.0, 0.9, TargetKind::quantile, {Method::sn});
  config.keep_stats = true;
  config.delta2_grid = {0.5, 1.0, 1.5};
  const auto power = run_power_experiment(config);

  const double p_lo = power.row(Method::sn, 0.5).rejection_pct();
  const double p_hi = power.row(Method::sn, 1.5).rejection_pct();

  // The delta2 = 1 grid point must reproduce the size run (shared seeds).
  const auto size = run_size_experiment(config);
  const bool equals_size = power.row(Method::sn, 1.0).rejections ==
                           size.row(Method::sn, 1.0).rejections;

  const auto adjusted = size_adjust(power, size);
  const double adj_at_truth =
      adjusted.row(Method::sn, 1.0).rejection_pct();

  const bool pass = p_lo >= 50.0 && p_hi >= 50.0 && equals_size &&
                    adj_at_truth == 5.0;
  std::snprintf(buffer, sizeof(buffer),
                "power(0.5)=%.1f power(1.5)=%.1f (need >= 50), "
                "power(1)==size: %s, size-adjusted at truth = %.2f "
                "(need exactly 5)",
                p_lo, p_hi, equals_size ? "yes" : "NO", adj_at_truth);
  record(4, pass, buffer);
}

void criterion_5() {
  NormalSampler pick(987654321);
  int bad_qr = 0, bad_es = 0, bad_path = 0;
  int es_checked = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 15 + static_cast<int>(pick.uniform() * 26);  // 15..40
    const int k = 1 + static_cast<int>(pick.uniform() * 3);    // 1..3
    Eigen::VectorXd y(n);
    Eigen::MatrixXd x(n, k);
    for (int t = 0; t < n; ++t) {
      x(t, 0) = 1.0;
      for (int c = 1; c < k; ++c) x(t, c) = pick();
      y[t] = pick() * (1.0 + 0.3 * std::fabs(x(t, k - 1))) +
             0.5 * x(t, k - 1);
    }
    const TimeSeriesDataset data(
        y, x, std::vector<std::string>(static_cast<std::size_t>(k), "c"));
    const double tau = 0.15 + 0.7 * pick.uniform();
    const QuantileLevel lvl(tau);

    const auto fit = fit_qr(data, lvl);
    const double oracle = oracles::qr_objective_enumerate(x, y, tau);
    if (std::fabs(fit.objective - oracle) > 1e-8 * (1.0 + std::fabs(oracle)))
      ++bad_qr;

    try {
      const auto es = fit_es(data, lvl, fit.alpha_hat, TailSide::upper, n);
      const auto es_oracle = oracles::ols_exceedance(
          x, y, fit.alpha_hat, true, n, residual_zero_tol(y));
      ++es_checked;
      if ((es.beta_hat - es_oracle).cwiseAbs().maxCoeff() >
          1e-10 * (1.0 + es_oracle.cwiseAbs().maxCoeff()))
        ++bad_es;
    } catch (const NumericError&) {
      // Too few exceedances on a tiny draw; not part of this criterion.
    }

    if (rep % 10 == 0) {
      const double eps = std::max(0.3, static_cast<double>(k + 2) / n);
      const auto path = expanding_qr_path(data, lvl, TrimFraction(eps));
      QrOptions cold;
      cold.warm_start = false;
      for (Eigen::Index j = path.j_start; j <= path.n; ++j) {
        const auto refit = fit_qr(data, lvl, j, cold);
        double warm_obj = 0.0;
        for (Eigen::Index t = 0; t < j; ++t)
          warm_obj += tick_loss(y[t] - x.row(t).dot(path.at(j)), lvl);
        if (std::fabs(warm_obj - refit.objective) >
            1e-8 * (1.0 + std::fabs(refit.objective)))
          ++bad_path;
      }
    }
  }
  const bool pass = bad_qr == 0 && bad_es == 0 && bad_path == 0;
  std::snprintf(buffer, sizeof(buffer),
                "200 random instances: qr objective misses %d, es coefficient "
                "misses %d (of %d checked), warm-vs-cold path misses %d",
                bad_qr, bad_es, es_checked, bad_path);
  record(5, pass, buffer);
}

void criterion_6() {
  // Nonnegativity + monotone quantiles + grid convergence at R = 200000.
  const auto s2000 = simulate_w_samples(1, 0.1, 2000, 200000, 31415,
                                        g_threads);
  const auto s8000 = simulate_w_samples(1, 0.1, 8000, 200000, 27182,
                                        g_threads);
  const bool nonneg = s2000.front() >= 0.0 && s8000.front() >= 0.0;
  const double q90 = sorted_quantile(s2000, 0.90);
  const double q95 = sorted_quantile(s2000, 0.95);
  const double q99 = sorted_quantile(s2000, 0.99);
  const bool monotone = q90 < q95 && q95 < q99;
  const double q95_fine = sorted_quantile(s8000, 0.95);
  const double grid_rel = std::fabs(q95 - q95_fine) / q95_fine;
  const bool grid_ok = grid_rel <= 0.01;

  // Contrast invariance, two-sample check at R = 100000 (k=2 contrasts via
  // the straightforward oracle simulator; ~3 sigma Monte Carlo band).
  Eigen::MatrixXd a1(1, 2), a2(1, 2);
  a1 << 1.0, 0.0;
  a2 << 0.8, 1.9;
  const auto o1 = oracles::w_samples_contrast(a1, 0.1, 1000, 100000, 161803);
  const auto o2 = oracles::w_samples_contrast(a2, 0.1, 1000, 100000, 141421);
  const double qa = oracles::sorted_q(o1, 0.95);
  const double qb = oracles::sorted_q(o2, 0.95);
  const double contrast_rel = std::fabs(qa - qb) / qb;
  const bool contrast_ok = contrast_rel <= 0.05;

  // Bit-exact determinism under fixed seeds at any thread count.
  const auto d1 = simulate_w_samples(1, 0.25, 500, 20000, 99, 1);
  const auto d2 = simulate_w_samples(1, 0.25, 500, 20000, 99, 2);
  const auto d3 = simulate_w_samples(1, 0.25, 500, 20000, 99, 7);
  const bool deterministic = d1 == d2 && d1 == d3;

  const bool pass =
      nonneg && monotone && grid_ok && contrast_ok && deterministic;
  std::snprintf(buffer, sizeof(buffer),
                "nonneg %s; q90/95/99 = %.2f/%.2f/%.2f monotone %s; grid "
                "q95 G2000 %.2f vs G8000 %.2f (rel %.3f%%, need <= 1%%); "
                "contrast q95 %.2f vs %.2f (rel %.2f%%); deterministic %s",
                nonneg ? "yes" : "NO", q90, q95, q99, monotone ? "yes" : "NO",
                q95, q95_fine, 100.0 * grid_rel, qa, qb, 100.0 * contrast_rel,
                deterministic ? "yes" : "NO");
  record(6, pass, buffer);
}

void criterion_7() {
  bool pass = true;
  std::string detail;
  for (double tau : {0.5, 0.75, 0.9}) {
    const double q = normal_quantile(tau);
    const double es = normal_es_upper(tau);
    const double q_oracle = oracles::normal_quantile_quad(tau);
    const double es_oracle = oracles::normal_es_upper_quad(tau);
    const bool ok =
        std::fabs(q - q_oracle) <= 1e-6 && std::fabs(es - es_oracle) <= 1e-6;
    pass = pass && ok;
    std::snprintf(buffer, sizeof(buffer), "%s(tau=%.2f: Q %.8f ES %.8f)",
                  ok ? "" : "<OFF>", tau, q, es);
    detail += buffer;
  }
  record(7, pass, "quadrature oracle within 1e-6: " + detail);
}

void criterion_8() {
  // Null calibration: i.i.d. hits at tau = 0.9, n = 1000, 5000 replications.
  const double tau = 0.9;
  int rejected = 0;
  for (int r = 0; r < 5000; ++r) {
    NormalSampler normal(mix_seed(kBaseSeed + 1, r));
    HitSequence hits;
    hits.tau = tau;
    hits.hits.resize(1000);
    for (Eigen::Index t = 0; t < 1000; ++t)
      hits.hits[t] = normal.uniform() <= tau ? tau - 1.0 : tau;
    if (dq_test(hits, 10).p_value < 0.05) ++rejected;
  }
  const double null_rate = 100.0 * rejected / 5000.0;

  // Power against the rho = 0.9 design at tau = 0.5, 1000 replications.
  DgpConfig cfg;
  cfg.n = 1000;
  cfg.rho = 0.9;
  int power_rejects = 0;
  for (int r = 0; r < 1000; ++r) {
    const auto data = generate(cfg, mix_seed(kBaseSeed + 2, r));
    const auto fit = fit_qr(data, QuantileLevel(0.5));
    const auto hits = compute_hits(data, QuantileLevel(0.5), fit.alpha_hat);
    if (dq_test(hits, 10).p_value < 0.05) ++power_rejects;
  }
  const double power_rate = 100.0 * power_rejects / 1000.0;

  const bool pass =
      null_rate >= 3.5 && null_rate <= 6.5 && power_rate > 50.0;
  std::snprintf(buffer, sizeof(buffer),
                "i.i.d. hit rejection %.2f%% (need within [3.5, 6.5]); "
                "power at rho=0.9 %.1f%% (need > 50)",
                null_rate, power_rate);
  record(8, pass, buffer);
}

void criterion_9() {
  const auto table = get_or_build_table(g_cache, 1, 0.1, kDefaultCvGridSteps,
                                        kDefaultCvReplications, kDefaultCvSeed,
                                        g_threads);
  int covered = 0;
  const int reps = 2000;
  for (int r = 0; r < reps; ++r) {
    NormalSampler normal(mix_seed(kBaseSeed + 3, r));
    Eigen::VectorXd y(500);
    for (Eigen::Index t = 0; t < 500; ++t) y[t] = normal();
    const TimeSeriesDataset data(y, Eigen::MatrixXd::Ones(500, 1), {"const"});
    const auto path =
        expanding_qr_path(data, QuantileLevel(0.5), TrimFraction(0.1));
    const auto ci = sn_confidence_interval(path, 0, 0.05, table);
    if (ci.first <= 0.0 && 0.0 <= ci.second) ++covered;
  }
  const double coverage = 100.0 * covered / reps;
  const bool pass = coverage >= 92.0 && coverage <= 97.0;
  std::snprintf(buffer, sizeof(buffer),
                "95%% SN interval covers the true median in %.2f%% of %d "
                "replications (need within [92, 97])",
                coverage, reps);
  record(9, pass, buffer);
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      only = std::atoi(argv[++i]);
    else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc)
      g_threads = std::atoi(argv[++i]);
    else if (std::strcmp(argv[i], "--cache-dir") == 0 && i + 1 < argc)
      g_cache = argv[++i];
  }

  auto want = [&](int id) { return only == 0 || only == id; };
  if (want(1) || want(3)) criteria_1_and_3();
  if (want(2)) criterion_2();
  if (want(4)) criterion_4();
  if (want(5)) criterion_5();
  if (want(6)) criterion_6();
  if (want(7)) criterion_7();
  if (want(8)) criterion_8();
  if (want(9)) criterion_9();

  int failures = 0;
  for (const auto& c : g_results)
    if (!c.pass) ++failures;
  std::printf("%d of %zu criteria passed\n", static_cast<int>(g_results.size()) - failures,
              g_results.size());
  return failures == 0 ? 0 : 1;
}

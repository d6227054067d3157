#include <doctest.h>

#include <Eigen/LU>

#include "snreg/dgp.hpp"
#include "snreg/rng.hpp"
#include "snreg/sn.hpp"

using namespace snreg;

namespace {

EstimatePath scalar_path(std::initializer_list<double> values,
                         Eigen::Index j_start, double epsilon) {
  EstimatePath path;
  path.j_start = j_start;
  path.n = j_start + static_cast<Eigen::Index>(values.size()) - 1;
  path.tau = 0.5;
  path.epsilon = epsilon;
  for (double v : values) {
    Eigen::VectorXd c(1);
    c << v;
    path.coefficients.push_back(c);
  }
  return path;
}

CriticalValueTable test_table(double epsilon, int ell = 1) {
  return build_critical_value_table(ell, epsilon, 200, 2000, 11);
}

}  // namespace

TEST_SUITE("sn") {

TEST_CASE("hand-evaluated normalizer on a 4-entry path") {
  const auto path = scalar_path({2.0, 2.0, 2.0, 1.0}, 1, 0.25);
  const auto contrast = Contrast::coefficient(0, 1, 0.0);
  const auto s = sn_matrix(path, contrast);
  // (1/16) * (4*1 + 9*1 + 16*0), summing j = 2..4
  CHECK(s(0, 0) == doctest::Approx(13.0 / 16.0).epsilon(1e-15));
}

TEST_CASE("constant path gives the zero matrix and a degenerate test") {
  const auto path = scalar_path({3.0, 3.0, 3.0, 3.0}, 1, 0.25);
  const auto contrast = Contrast::coefficient(0, 1, 0.0);
  CHECK(sn_matrix(path, contrast)(0, 0) == 0.0);
  const auto table = test_table(0.25);
  CHECK_THROWS_AS(sn_test(path, contrast, 0.05, table), NumericError);
}

TEST_CASE("path scaling multiplies the normalizer by c^2") {
  const auto path = scalar_path({1.0, 0.5, 2.0, 1.5, 1.0}, 2, 0.3);
  auto scaled = path;
  for (auto& c : scaled.coefficients) c *= -2.5;
  const auto contrast = Contrast::coefficient(0, 1, 0.0);
  CHECK(sn_matrix(scaled, contrast)(0, 0) ==
        doctest::Approx(6.25 * sn_matrix(path, contrast)(0, 0))
            .epsilon(1e-14));
}

TEST_CASE("zero numerator never rejects") {
  const auto path = scalar_path({1.0, 0.5, 2.0, 1.5, 1.0}, 2, 0.3);
  const auto table = test_table(0.3);
  const auto contrast = Contrast::coefficient(0, 1, path.full_sample()[0]);
  const auto result = sn_test(path, contrast, 0.05, table);
  CHECK(result.t_n == 0.0);
  CHECK_FALSE(result.reject);
  CHECK(result.p_value == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("joint rescaling of data and null leaves T_n unchanged") {
  DgpConfig cfg;
  cfg.n = 150;
  cfg.rho = 0.5;
  const auto data = generate(cfg, 5);
  const auto table = test_table(0.2);
  const double null_v = 1.1;
  const double c = 3.7;
  const auto path =
      expanding_qr_path(data, QuantileLevel(0.5), TrimFraction(0.2));
  const TimeSeriesDataset scaled(c * data.y(), data.x(), data.names());
  const auto path_scaled =
      expanding_qr_path(scaled, QuantileLevel(0.5), TrimFraction(0.2));
  const auto r1 = sn_test(path, Contrast::coefficient(1, 2, null_v), 0.05,
                          table);
  const auto r2 = sn_test(path_scaled,
                          Contrast::coefficient(1, 2, c * null_v), 0.05,
                          table);
  CHECK(r2.t_n == doctest::Approx(r1.t_n).epsilon(1e-8));
}

TEST_CASE("reparametrization invariance with transformed contrast") {
  DgpConfig cfg;
  cfg.n = 200;
  const auto data = generate(cfg, 17);
  const auto table = test_table(0.2);
  Eigen::Matrix2d m;
  m << 1.0, 0.3, -0.2, 0.9;
  const TimeSeriesDataset reparam(data.y(), data.x() * m, data.names());
  const auto path =
      expanding_qr_path(data, QuantileLevel(0.5), TrimFraction(0.2));
  const auto path_m =
      expanding_qr_path(reparam, QuantileLevel(0.5), TrimFraction(0.2));
  Eigen::MatrixXd a(1, 2);
  a << 0.0, 1.0;
  Eigen::VectorXd null_v(1);
  null_v << 0.9;
  // Coefficients of the reparametrized design are M^{-1} alpha, so the
  // contrast transforms as A -> A M to leave A alpha (and the null) fixed.
  const auto r1 = sn_test(path, Contrast(a, null_v), 0.05, table);
  const auto r2 = sn_test(path_m, Contrast(a * m, null_v), 0.05, table);
  CHECK(r2.t_n == doctest::Approx(r1.t_n).epsilon(1e-6));
}

TEST_CASE("reject exactly when t_n exceeds the critical value") {
  const auto table = test_table(0.25);
  const auto path = scalar_path({1.0, 1.4, 0.7, 1.2, 0.9}, 1, 0.25);
  NormalSampler pick(9);
  for (int i = 0; i < 50; ++i) {
    const double null_v = path.full_sample()[0] + (pick.uniform() - 0.5);
    const auto r =
        sn_test(path, Contrast::coefficient(0, 1, null_v), 0.05, table);
    CHECK(r.reject == (r.t_n > r.critical_value));
  }
}

TEST_CASE("confidence interval / test duality") {
  DgpConfig cfg;
  cfg.n = 120;
  const auto data = generate(cfg, 3);
  const auto table = test_table(0.25);
  const auto path =
      expanding_qr_path(data, QuantileLevel(0.5), TrimFraction(0.25));
  const auto ci = sn_confidence_interval(path, 1, 0.05, table);
  CHECK(ci.first < path.full_sample()[1]);
  CHECK(ci.second > path.full_sample()[1]);
  NormalSampler pick(13);
  for (int i = 0; i < 60; ++i) {
    const double v = ci.first + (3.0 * pick.uniform() - 1.0) *
                                    (ci.second - ci.first);
    const auto r =
        sn_test(path, Contrast::coefficient(1, 2, v), 0.05, table);
    const bool inside = v >= ci.first && v <= ci.second;
    CHECK(r.reject == !inside);
  }
}

TEST_CASE("p-value is the simulated tail fraction") {
  const auto table = test_table(0.25);
  const auto path = scalar_path({1.0, 1.4, 0.7, 1.2, 0.9}, 1, 0.25);
  const auto r = sn_test(path, Contrast::coefficient(0, 1, 0.4), 0.05, table);
  int above = 0;
  for (double s : table.samples)
    if (s > r.t_n) ++above;
  CHECK(r.p_value ==
        doctest::Approx(static_cast<double>(above) / table.samples.size()));
  CHECK(r.p_value_half_width > 0.0);
  // With the order-statistic critical value, rejection at level nu means the
  // tail fraction is at most floor(nu * R) / R.
  const double floor_frac =
      std::floor(0.05 * table.samples.size()) / table.samples.size();
  CHECK(r.reject == (r.p_value <= floor_frac));
}

TEST_CASE("configuration errors") {
  const auto path = scalar_path({1.0, 1.4, 0.7}, 1, 0.25);
  const auto table_wrong_eps = test_table(0.1);
  CHECK_THROWS_AS(
      sn_test(path, Contrast::coefficient(0, 1, 0.0), 0.05, table_wrong_eps),
      ConfigError);
  const auto table_wrong_ell = test_table(0.25, 2);
  CHECK_THROWS_AS(
      sn_test(path, Contrast::coefficient(0, 1, 0.0), 0.05, table_wrong_ell),
      ConfigError);
  const auto table = test_table(0.25);
  CHECK_THROWS_AS(sn_test(path, Contrast::coefficient(0, 1, 0.0), 0.0, table),
                  ConfigError);
  Eigen::MatrixXd bad_a(2, 2);
  bad_a << 1.0, 2.0, 2.0, 4.0;  // rank 1
  Eigen::VectorXd v2(2);
  v2 << 0.0, 0.0;
  CHECK_THROWS_AS(Contrast(bad_a, v2), ConfigError);
}

}

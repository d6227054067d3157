#include <doctest.h>

#include "oracles.hpp"
#include "snreg/stats.hpp"

using namespace snreg;

TEST_SUITE("stats") {

TEST_CASE("normal quantile against quadrature bisection") {
  for (double tau : {0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.975, 0.99}) {
    CHECK(normal_quantile(tau) ==
          doctest::Approx(oracles::normal_quantile_quad(tau)).epsilon(1e-9));
  }
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(normal_quantile(0.0), ConfigError);
  CHECK_THROWS_AS(normal_quantile(1.0), ConfigError);
}

TEST_CASE("normal cdf/pdf basics") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
}

TEST_CASE("chi-square survival function against quadrature") {
  // Integrate the chi-square density directly (df >= 2 keeps the density
  // bounded at the origin; df = 1 and 2 are covered in closed form below).
  auto sf_quad = [](double x, double df) {
    auto pdf = [df](double t) {
      return std::exp((0.5 * df - 1.0) * std::log(t) - 0.5 * t -
                      std::lgamma(0.5 * df) - 0.5 * df * std::log(2.0));
    };
    return 1.0 - oracles::integrate(pdf, 1e-12, x, 1e-13);
  };
  for (double df : {2.0, 5.0, 11.0}) {
    for (double x : {0.5, 2.0, 7.5, 19.675}) {
      CHECK(chi_square_sf(x, df) ==
            doctest::Approx(sf_quad(x, df)).epsilon(1e-8));
    }
  }
  for (double x : {0.25, 1.0, 3.841459, 9.0}) {
    CHECK(chi_square_sf(x, 1.0) ==
          doctest::Approx(2.0 * normal_cdf(-std::sqrt(x))).epsilon(1e-10));
    CHECK(chi_square_sf(x, 2.0) ==
          doctest::Approx(std::exp(-0.5 * x)).epsilon(1e-10));
  }
  CHECK(chi_square_sf(0.0, 3.0) == 1.0);
}

TEST_CASE("sorted quantile is the ceil(p*R) order statistic") {
  std::vector<double> s{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
  CHECK(sorted_quantile(s, 0.95) == 10.0);
  CHECK(sorted_quantile(s, 0.90) == 9.0);
  CHECK(sorted_quantile(s, 0.05) == 1.0);
  CHECK(sorted_quantile(s, 1.0) == 10.0);
  CHECK_THROWS_AS(sorted_quantile(s, 0.0), ConfigError);
}

}

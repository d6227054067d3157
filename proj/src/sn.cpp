#include "snreg/sn.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "snreg/errors.hpp"

namespace snreg {

Contrast::Contrast(Eigen::MatrixXd a_matrix, Eigen::VectorXd null_v,
                   double rank_tol)
    : a(std::move(a_matrix)), null_value(std::move(null_v)) {
  if (a.rows() < 1 || a.rows() > a.cols())
    throw ConfigError("contrast must be (l x k) with 1 <= l <= k");
  if (null_value.size() != a.rows())
    throw ConfigError("null value has length " +
                      std::to_string(null_value.size()) + ", expected l = " +
                      std::to_string(a.rows()));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > rank_tol * sv(0)))
    throw ConfigError("contrast matrix is not of full row rank");
}

Contrast Contrast::coefficient(Eigen::Index index, Eigen::Index k,
                               double null_v) {
  if (index < 0 || index >= k)
    throw ConfigError("coefficient index out of range");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(1, k);
  a(0, index) = 1.0;
  Eigen::VectorXd v(1);
  v[0] = null_v;
  return Contrast(std::move(a), std::move(v));
}

Eigen::MatrixXd sn_matrix(const EstimatePath& path, const Contrast& contrast) {
  if (path.coefficients.empty()) throw ConfigError("empty estimate path");
  if (contrast.a.cols() != path.k())
    throw ConfigError("contrast has " + std::to_string(contrast.a.cols()) +
                      " columns, path coefficients have length " +
                      std::to_string(path.k()));
  const Eigen::Index ell = contrast.ell();
  const double n = static_cast<double>(path.n);
  const Eigen::VectorXd ref = contrast.a * path.full_sample();

  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(ell, ell);
  for (Eigen::Index j = path.j_start + 1; j <= path.n; ++j) {
    const Eigen::VectorXd d = contrast.a * path.at(j) - ref;
    const double jd = static_cast<double>(j);
    s.selfadjointView<Eigen::Lower>().rankUpdate(d, jd * jd);
  }
  s = s.selfadjointView<Eigen::Lower>();
  return s / (n * n);
}

namespace {

void check_table(const CriticalValueTable& table, const EstimatePath& path,
                 Eigen::Index ell) {
  if (table.ell != static_cast<int>(ell))
    throw ConfigError("critical-value table is for l = " +
                      std::to_string(table.ell) + ", contrast has l = " +
                      std::to_string(ell));
  if (std::fabs(table.epsilon - path.epsilon) > 1e-9)
    throw ConfigError("critical-value table epsilon " +
                      std::to_string(table.epsilon) +
                      " does not match path epsilon " +
                      std::to_string(path.epsilon));
}

}  // namespace

SnTestResult sn_test(const EstimatePath& path, const Contrast& contrast,
                     double nu, const CriticalValueTable& critical) {
  if (!(nu > 0.0 && nu < 1.0))
    throw ConfigError("significance level nu must lie in (0,1)");
  check_table(critical, path, contrast.ell());

  SnTestResult result;
  result.nu = nu;
  result.s_n = sn_matrix(path, contrast);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(result.s_n);
  const auto& ev = eig.eigenvalues();
  const double lambda_min = ev(0);
  const double lambda_max = ev(ev.size() - 1);
  if (!(lambda_min > 0.0) || lambda_max / lambda_min > 1e12)
    throw NumericError(
        "singular or ill-conditioned normalizer S_n (degenerate expanding "
        "path, e.g. constant data)");

  const Eigen::VectorXd d =
      contrast.a * path.full_sample() - contrast.null_value;
  const Eigen::VectorXd s_inv_d =
      eig.eigenvectors() *
      (eig.eigenvectors().transpose() * d).cwiseQuotient(ev);
  const double n = static_cast<double>(path.n);
  result.t_n = n * d.dot(s_inv_d);
  result.critical_value = critical_value(critical, nu);
  result.reject = result.t_n > result.critical_value;

  if (!critical.samples.empty()) {
    const auto upper = std::upper_bound(critical.samples.begin(),
                                        critical.samples.end(), result.t_n);
    const double r = static_cast<double>(critical.samples.size());
    const double p =
        static_cast<double>(critical.samples.end() - upper) / r;
    result.p_value = p;
    result.p_value_half_width = 1.96 * std::sqrt(p * (1.0 - p) / r);
  } else {
    result.p_value = std::numeric_limits<double>::quiet_NaN();
    result.p_value_half_width = std::numeric_limits<double>::quiet_NaN();
  }

  if (contrast.ell() == 1) {
    const double center = (contrast.a * path.full_sample())(0);
    const double half =
        std::sqrt(result.s_n(0, 0) * result.critical_value / n);
    result.ci = std::make_pair(center - half, center + half);
  }
  return result;
}

std::pair<double, double> sn_confidence_interval(
    const EstimatePath& path, Eigen::Index coefficient_index, double nu,
    const CriticalValueTable& critical) {
  const auto contrast = Contrast::coefficient(coefficient_index, path.k(),
                                              0.0);
  const auto result = sn_test(path, contrast, nu, critical);
  return *result.ci;
}

}  // namespace snreg

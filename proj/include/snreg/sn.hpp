#pragma once

#include <Eigen/Core>
#include <optional>

#include "snreg/limitdist.hpp"
#include "snreg/qr.hpp"

namespace snreg {

// Full-row-rank (l x k) contrast A with the null-hypothetical value of
// A * coefficient.
struct Contrast {
  Eigen::MatrixXd a;
  Eigen::VectorXd null_value;

  Contrast(Eigen::MatrixXd a_matrix, Eigen::VectorXd null_v,
           double rank_tol = 1e-10);

  // Unit-row contrast selecting a single coefficient.
  static Contrast coefficient(Eigen::Index index, Eigen::Index k,
                              double null_v);

  Eigen::Index ell() const { return a.rows(); }
};

struct SnTestResult {
  double t_n = 0.0;
  Eigen::MatrixXd s_n;
  double critical_value = 0.0;
  bool reject = false;
  double nu = 0.0;
  // Scalar case only: the SN confidence interval around the transformed
  // full-sample estimate.
  std::optional<std::pair<double, double>> ci;
  // Empirical tail fraction of the simulated W(A) sample above t_n, with its
  // 95% Monte Carlo half-width; NaN when the table stores quantiles only.
  double p_value = 0.0;
  double p_value_half_width = 0.0;
};

// The self-normalizer
//   S_n = n^{-2} sum_{j=floor(n eps)+1}^{n} j^2 [A a(j/n) - A a(1)][.]'.
// A constant path yields the zero matrix; the caller downstream rejects it.
Eigen::MatrixXd sn_matrix(const EstimatePath& path, const Contrast& contrast);

// T_n = n [A a(1) - null]' S_n^{-1} [A a(1) - null] compared against the
// (1-nu)-quantile of W(A). Throws on a singular or ill-conditioned S_n
// (condition number above 1e12) instead of pseudo-inverting.
SnTestResult sn_test(const EstimatePath& path, const Contrast& contrast,
                     double nu, const CriticalValueTable& critical);

// Symmetric interval [a_c -+ sqrt(S_n * W_{1-nu} / n)] for one coefficient.
std::pair<double, double> sn_confidence_interval(
    const EstimatePath& path, Eigen::Index coefficient_index, double nu,
    const CriticalValueTable& critical);

}  // namespace snreg

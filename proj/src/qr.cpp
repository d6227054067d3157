#include "snreg/qr.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <cmath>

namespace snreg {

double tick_loss(double u, QuantileLevel tau) {
  return u <= 0.0 ? u * (tau.tau - 1.0) : u * tau.tau;
}

double psi(double u, QuantileLevel tau) {
  return u <= 0.0 ? tau.tau - 1.0 : tau.tau;
}

double residual_zero_tol(const Eigen::Ref<const Eigen::VectorXd>& y) {
  return 1e-7 * (1.0 + y.cwiseAbs().maxCoeff());
}

namespace {

void check_rank(const Eigen::Ref<const Eigen::MatrixXd>& x, double rank_tol,
                Eigen::Index window) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x.topRows(window));
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(sv.size() - 1) > rank_tol * sv(0)))
    throw NumericError("rank-deficient design on window of length " +
                       std::to_string(window));
}

// Primal-dual interior-point solver for the LP formulation of tick-loss
// minimization (Frisch-Newton style, Mehrotra predictor-corrector on the
// bounded dual max y'a s.t. X'a = (1-tau) X'1, 0 <= a <= 1). The regression
// coefficients are the multipliers of the equality constraint.
class FrischNewton {
 public:
  FrischNewton(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double tau,
               QrOptions opts)
      : x_(x), y_(y), tau_(tau), opts_(opts) {
    const Eigen::Index n = x_.rows();
    const Eigen::Index k = x_.cols();
    a_.resize(n);
    s_.resize(n);
    z_.resize(n);
    w_.resize(n);
    r_.resize(n);
    qinv_.resize(n);
    h_.resize(n);
    da_.resize(n);
    dz_.resize(n);
    dw_.resize(n);
    tmp_.resize(n);
    xda_.resize(n);
    cz_.resize(n);
    cw_.resize(n);
    m_mat_.resize(k, k);
    ldlt_ = Eigen::LDLT<Eigen::MatrixXd>(k);
    m_valid_ = 0;
  }

  // Solves on the first m rows. `alpha` is the starting point when `warm`
  // is set (the dual block a is carried over from the previous call) and
  // receives the solution. Returns (iterations, objective).
  std::pair<int, double> solve(Eigen::Index m, Eigen::VectorXd& alpha,
                               bool warm) {
    if (warm && m_valid_ > 0 && m_valid_ <= m && alpha.size() == x_.cols()) {
      for (Eigen::Index i = m_valid_; i < m; ++i) a_[i] = 1.0 - tau_;
      const double kappa = 1e-5;
      a_.head(m) = a_.head(m).cwiseMax(kappa).cwiseMin(1.0 - kappa);
      init_slacks(m, alpha, 1e-6);
    } else {
      warm = false;
      cold_start(m, alpha);
    }
    std::pair<int, double> result{-1, 0.0};
    try {
      result = iterate(m, alpha);
    } catch (const NumericError&) {
      if (!warm) throw;
    }
    if (result.first < 0 && warm) {
      cold_start(m, alpha);
      result = iterate(m, alpha);
    }
    if (result.first < 0)
      throw NumericError(
          "quantile regression solver did not converge within " +
          std::to_string(opts_.max_iterations) + " iterations (window " +
          std::to_string(m) + ")");
    m_valid_ = m;
    return result;
  }

 private:
  void cold_start(Eigen::Index m, Eigen::VectorXd& alpha) {
    const auto x = x_.topRows(m);
    // Ridge-stabilized least squares start for the coefficients.
    Eigen::MatrixXd gram = x.transpose() * x;
    gram.diagonal().array() += 1e-12 * (1.0 + gram.trace());
    alpha = Eigen::LDLT<Eigen::MatrixXd>(gram).solve(x.transpose() *
                                                     y_.head(m));
    a_.head(m).setConstant(1.0 - tau_);
    init_slacks(m, alpha, 1e-4);
  }

  void init_slacks(Eigen::Index m, const Eigen::VectorXd& alpha,
                   double floor_scale) {
    r_.head(m) = y_.head(m) - x_.topRows(m) * alpha;
    const double delta =
        floor_scale * (1.0 + r_.head(m).cwiseAbs().mean());
    z_.head(m) = (-r_.head(m)).cwiseMax(0.0).array() + delta;
    w_.head(m) = r_.head(m).cwiseMax(0.0).array() + delta;
    s_.head(m) = Eigen::VectorXd::Ones(m) - a_.head(m);
  }

  // Returns (iterations, objective); iterations < 0 signals failure.
  std::pair<int, double> iterate(Eigen::Index m, Eigen::VectorXd& alpha) {
    const Eigen::Index k = x_.cols();
    const auto x = x_.topRows(m);
    const double md = static_cast<double>(m);

    const Eigen::VectorXd b = (1.0 - tau_) * (x.colwise().sum()).transpose();
    const double b_scale = 1.0 + b.cwiseAbs().maxCoeff();
    const double y_scale = 1.0 + y_.head(m).cwiseAbs().maxCoeff();

    Eigen::VectorXd rp(k), rhs(k), dalpha(k);
    int stall = 0;
    for (int it = 1; it <= opts_.max_iterations; ++it) {
      r_.head(m) = y_.head(m) - x * alpha;
      const double obj =
          (r_.head(m).array() *
           (tau_ - (r_.head(m).array() <= 0.0).cast<double>()))
              .sum();
      rp = b - x.transpose() * a_.head(m);
      const double rd_norm =
          (r_.head(m) - w_.head(m) + z_.head(m)).cwiseAbs().maxCoeff();
      const double gap =
          a_.head(m).dot(z_.head(m)) + s_.head(m).dot(w_.head(m));

      if (gap <= opts_.opt_tol * (1.0 + std::fabs(obj)) &&
          rp.cwiseAbs().maxCoeff() <= 1e-8 * b_scale &&
          rd_norm <= 1e-8 * y_scale)
        return {it - 1, obj};

      // q = z/a + w/s, the diagonal of the condensed system. Entries pinned
      // at their bounds can produce inf or 0/0; such rows carry no weight.
      for (Eigen::Index i = 0; i < m; ++i) {
        const double q = z_[i] / a_[i] + w_[i] / s_[i];
        qinv_[i] = (std::isfinite(q) && q > 0.0) ? 1.0 / q : 0.0;
      }

      for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i; j < k; ++j) {
          const double v = (qinv_.head(m).array() * x.col(i).array() *
                            x.col(j).array())
                               .sum();
          m_mat_(i, j) = v;
          m_mat_(j, i) = v;
        }
      ldlt_.compute(m_mat_);
      if (ldlt_.info() != Eigen::Success || !m_mat_.allFinite() ||
          !ldlt_.vectorD().allFinite() || (ldlt_.vectorD().array() <= 0.0).any())
        throw NumericError("singular condensed system in the interior-point "
                           "solver (window " +
                           std::to_string(m) + ")");

      // Affine (predictor) direction, mu = 0.
      h_.head(m) = r_.head(m);
      solve_direction(m, rp, dalpha);
      dz_.head(m) = -z_.head(m).array() -
                    (z_.head(m).array() / a_.head(m).array()) *
                        da_.head(m).array();
      dw_.head(m) = -w_.head(m).array() +
                    (w_.head(m).array() / s_.head(m).array()) *
                        da_.head(m).array();

      const double tp_aff = primal_step(m);
      const double td_aff = dual_step(m);
      const double gap_aff =
          (a_.head(m) + tp_aff * da_.head(m))
              .dot(z_.head(m) + td_aff * dz_.head(m)) +
          (s_.head(m) - tp_aff * da_.head(m))
              .dot(w_.head(m) + td_aff * dw_.head(m));
      double sigma = gap_aff / gap;
      sigma = sigma * sigma * sigma;
      if (sigma > 1.0) sigma = 1.0;
      const double mu = sigma * gap / (2.0 * md);

      // Corrector with Mehrotra cross terms.
      cz_.head(m) = (da_.head(m).array() * dz_.head(m).array()) /
                    a_.head(m).array();
      cw_.head(m) = (da_.head(m).array() * dw_.head(m).array()) /
                    s_.head(m).array();
      h_.head(m) = r_.head(m).array() + mu / a_.head(m).array() -
                   mu / s_.head(m).array() - cz_.head(m).array() -
                   cw_.head(m).array();
      solve_direction(m, rp, dalpha);
      dz_.head(m) = mu / a_.head(m).array() - z_.head(m).array() -
                    (z_.head(m).array() / a_.head(m).array()) *
                        da_.head(m).array() -
                    cz_.head(m).array();
      dw_.head(m) = mu / s_.head(m).array() - w_.head(m).array() +
                    (w_.head(m).array() / s_.head(m).array()) *
                        da_.head(m).array() +
                    cw_.head(m).array();

      const double tp = primal_step(m);
      const double td = dual_step(m);
      if (tp < 1e-12 && td < 1e-12) {
        if (++stall >= 3) break;
      } else {
        stall = 0;
      }

      a_.head(m) += tp * da_.head(m);
      s_.head(m) -= tp * da_.head(m);
      alpha += td * dalpha;
      z_.head(m) += td * dz_.head(m);
      w_.head(m) += td * dw_.head(m);
      // Keep iterates strictly interior against rounding.
      a_.head(m) = a_.head(m).cwiseMax(1e-14);
      s_.head(m) = s_.head(m).cwiseMax(1e-14);
      z_.head(m) = z_.head(m).cwiseMax(1e-300);
      w_.head(m) = w_.head(m).cwiseMax(1e-300);
    }
    return {-1, 0.0};
  }

  // Solves the condensed system for dalpha and back-substitutes da.
  // Uses h_ as input; overwrites da_.
  void solve_direction(Eigen::Index m, const Eigen::VectorXd& rp,
                       Eigen::VectorXd& dalpha) {
    const auto x = x_.topRows(m);
    tmp_.head(m) = qinv_.head(m).array() * h_.head(m).array();
    dalpha = ldlt_.solve(x.transpose() * tmp_.head(m) - rp);
    xda_.head(m) = x * dalpha;
    da_.head(m) = qinv_.head(m).array() *
                  (h_.head(m).array() - xda_.head(m).array());
  }

  double primal_step(Eigen::Index m) const {
    double t = 1.0 / 0.99995;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (da_[i] < 0.0) t = std::min(t, a_[i] / -da_[i]);
      if (da_[i] > 0.0) t = std::min(t, s_[i] / da_[i]);
    }
    return std::min(1.0, 0.99995 * t);
  }

  double dual_step(Eigen::Index m) const {
    double t = 1.0 / 0.99995;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (dz_[i] < 0.0) t = std::min(t, z_[i] / -dz_[i]);
      if (dw_[i] < 0.0) t = std::min(t, w_[i] / -dw_[i]);
    }
    return std::min(1.0, 0.99995 * t);
  }

  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
  double tau_;
  QrOptions opts_;
  Eigen::Index m_valid_;

  Eigen::VectorXd a_, s_, z_, w_, r_, qinv_, h_, da_, dz_, dw_, tmp_, xda_,
      cz_, cw_;
  Eigen::MatrixXd m_mat_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
};

}  // namespace

QrFit fit_qr(const TimeSeriesDataset& data, QuantileLevel tau,
             Eigen::Index window, const QrOptions& opts) {
  const Eigen::Index k = data.k();
  if (window < k + 1 || window > data.n())
    throw ConfigError("window must lie in [k+1, n] = [" +
                      std::to_string(k + 1) + ", " + std::to_string(data.n()) +
                      "], got " + std::to_string(window));
  check_rank(data.x(), opts.rank_tol, window);

  FrischNewton solver(data.x(), data.y(), tau.tau, opts);
  QrFit fit;
  fit.tau = tau.tau;
  fit.window = window;
  auto [iterations, objective] = solver.solve(window, fit.alpha_hat, false);
  fit.iterations = iterations;
  fit.objective = objective;
  return fit;
}

QrFit fit_qr(const TimeSeriesDataset& data, QuantileLevel tau,
             const QrOptions& opts) {
  return fit_qr(data, tau, data.n(), opts);
}

EstimatePath expanding_qr_path(const TimeSeriesDataset& data,
                               QuantileLevel tau, TrimFraction epsilon,
                               const QrOptions& opts) {
  const Eigen::Index n = data.n();
  const Eigen::Index k = data.k();
  const auto j_start = static_cast<Eigen::Index>(
      std::floor(static_cast<double>(n) * epsilon.epsilon + 1e-9));
  if (j_start < k + 1)
    throw ConfigError("floor(n*epsilon) = " + std::to_string(j_start) +
                      " is below k+1 = " + std::to_string(k + 1) +
                      "; increase epsilon or the sample size");
  check_rank(data.x(), opts.rank_tol, j_start);

  EstimatePath path;
  path.j_start = j_start;
  path.n = n;
  path.tau = tau.tau;
  path.epsilon = epsilon.epsilon;
  path.coefficients.reserve(static_cast<std::size_t>(n - j_start + 1));

  FrischNewton solver(data.x(), data.y(), tau.tau, opts);
  Eigen::VectorXd alpha;
  for (Eigen::Index j = j_start; j <= n; ++j) {
    // The final window runs cold so that the path ends in the exact
    // full-sample fit fit_qr would produce.
    const bool warm = opts.warm_start && j > j_start && j < n;
    try {
      solver.solve(j, alpha, warm);
    } catch (const NumericError& e) {
      throw NumericError("expanding QR path failed at window " +
                         std::to_string(j) + ": " + e.what());
    }
    path.coefficients.push_back(alpha);
  }
  return path;
}

bool subgradient_box_holds(const TimeSeriesDataset& data, QuantileLevel tau,
                           const Eigen::VectorXd& alpha, Eigen::Index window,
                           double slack) {
  const auto x = data.x().topRows(window);
  const Eigen::VectorXd r = data.y().head(window) - x * alpha;
  const double tol = residual_zero_tol(data.y().head(window));
  for (Eigen::Index c = 0; c < data.k(); ++c) {
    double lhs = 0.0;
    double zero_mass = 0.0;
    double col_mass = 0.0;
    for (Eigen::Index t = 0; t < window; ++t) {
      lhs += psi(r[t], tau) * x(t, c);
      col_mass += std::fabs(x(t, c));
      if (std::fabs(r[t]) <= tol) zero_mass += std::fabs(x(t, c));
    }
    if (std::fabs(lhs) > zero_mass + slack * (1.0 + col_mass)) return false;
  }
  return true;
}

}  // namespace snreg

#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "snreg/errors.hpp"

namespace snreg {

// Probability level tau in (0,1).
struct QuantileLevel {
  double tau;
  explicit QuantileLevel(double t) : tau(t) {
    if (!(t > 0.0 && t < 1.0))
      throw ConfigError("quantile level must lie in (0,1), got " +
                        std::to_string(t));
  }
};

// Smallest window fraction entering an expanding-window path.
struct TrimFraction {
  double epsilon;
  explicit TrimFraction(double e) : epsilon(e) {
    if (!(e > 0.0 && e < 1.0))
      throw ConfigError("trim fraction must lie in (0,1), got " +
                        std::to_string(e));
  }
};

// A fixed (Y_t, X_t') sample: response vector, n x k regressor matrix and the
// k column labels. Row t of x is observed contemporaneously with y[t]; any
// lagging of predictors happens at ingestion. Immutable after construction,
// safe to share across threads.
class TimeSeriesDataset {
 public:
  TimeSeriesDataset(Eigen::VectorXd y, Eigen::MatrixXd x,
                    std::vector<std::string> names);

  const Eigen::VectorXd& y() const { return y_; }
  const Eigen::MatrixXd& x() const { return x_; }
  const std::vector<std::string>& names() const { return names_; }
  Eigen::Index n() const { return y_.size(); }
  Eigen::Index k() const { return x_.cols(); }

 private:
  Eigen::VectorXd y_;
  Eigen::MatrixXd x_;
  std::vector<std::string> names_;
};

// Reads a comma-separated file with a header row ('.' decimal separator, no
// thousands separators). Covariates are shifted back by `lag` rows relative
// to the response (the first `lag` response rows are dropped) and an
// all-ones column named "const" is prepended when `intercept` is set.
// Missing or unparseable cells are rejected with their row/column location.
TimeSeriesDataset load_csv(const std::string& path,
                           const std::string& response_col,
                           const std::vector<std::string>& covariate_cols,
                           bool intercept = false, Eigen::Index lag = 0);

// Writes response + covariate columns; numeric content survives a
// write/load round trip to full double precision.
void write_csv(const std::string& path, const TimeSeriesDataset& data,
               const std::string& response_name = "y");

// Flat key=value run-configuration file: '#' comments and blank lines are
// skipped, keys must be unique.
std::vector<std::pair<std::string, std::string>> load_key_value_file(
    const std::string& path);

}  // namespace snreg

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

namespace sparsereg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Known data-generating process, available in simulation mode.
// All vectors live on the same (normalized) column scale as the design
// they accompany; sigma is the noise standard deviation.
struct GroundTruth {
  VectorXd f;                 // regression function at the design points, length n
  VectorXd beta0;             // target coefficients on the normalized scale, length p
  double sigma = 0.0;         // noise standard deviation, > 0
  std::vector<int> support;   // {j : beta0[j] != 0}, ascending
};

// Immutable regression instance. Columns of x satisfy En[x_ij^2] = 1;
// scale[j] is the divisor that maps raw columns to normalized ones
// (x_norm = x_raw / scale[j]), kept so coefficients can be reported on
// the original scale. Safe to share across threads; every operation on
// it is a pure function.
struct RegressionProblem {
  MatrixXd x;
  VectorXd y;
  VectorXd scale;
  std::optional<GroundTruth> truth;

  int n() const { return static_cast<int>(x.rows()); }
  int p() const { return static_cast<int>(x.cols()); }

  // Normalizes raw columns and assembles the instance. Optional truth is
  // given on the raw scale (theta such that f = x_raw * theta); it is
  // rescaled onto the normalized columns here.
  static RegressionProblem from_raw(MatrixXd x_raw, VectorXd y,
                                    std::optional<VectorXd> theta_raw = std::nullopt,
                                    std::optional<VectorXd> f = std::nullopt,
                                    double sigma = 0.0);

  // Coefficients on the normalized scale -> original (raw-column) scale.
  VectorXd to_original_scale(const VectorXd& beta_normalized) const;

  // Noise realization y - f; requires ground truth.
  VectorXd noise() const;
};

// Rescales columns so that En[x_ij^2] = 1. Returns the normalized matrix
// and the per-column divisors. A zero column is an error naming the column.
std::pair<MatrixXd, VectorXd> normalize_columns(const MatrixXd& x_raw);

// ||delta||_{2,n} = sqrt(En[(x_i' delta)^2])
double prediction_norm(const RegressionProblem& prob, const VectorXd& delta);

// Qhat(beta) = En[(y_i - x_i' beta)^2]
double objective_q(const RegressionProblem& prob, const VectorXd& beta);

// Approximation error r_i = f_i - x_i' beta0 and its size c_s = ||r||_{Pn,2}.
struct ApproxError {
  VectorXd r;
  double c_s = 0.0;
};

ApproxError approx_error(const RegressionProblem& prob, const VectorXd& beta0);

}  // namespace sparsereg

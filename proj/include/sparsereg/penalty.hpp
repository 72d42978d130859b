#pragma once

#include <cstdint>
#include <vector>

#include "sparsereg/core.hpp"
#include "sparsereg/lasso.hpp"

namespace sparsereg {

struct PenaltyOptions {
  double alpha = 0.05;
  double c = 1.1;
  double c_prime = 1.1 * 1.1;   // c' > c
  int mc_draws = 1000;
  std::uint64_t seed = 0;
  int max_refits = 3;
  double sigma_rel_tol = 1e-4;  // early stop for the sigma iteration
};

// Outcome of the data-driven penalty calibration:
//   lambda_quantile = simulated (1-alpha)-quantile of n||S/sigma||_inf,
//   sigma_iterates  = sigma-hat path of the iterated estimation,
//   lambda_final    = c_prime * sigma_iterates.back() * lambda_quantile.
struct PenaltyCalibration {
  double alpha = 0.0;
  double c = 0.0;
  double c_prime = 0.0;
  double lambda_quantile = 0.0;
  int mc_draws = 0;
  std::vector<double> sigma_iterates;
  double lambda_final = 0.0;
};

// One replication's score statistic at sigma = 1: n ||2 En[x_i g_i]||_inf.
double score_sup_stat(const MatrixXd& x, const VectorXd& g);

// Empirical (1-alpha)-quantile over mc_draws replications of the statistic
// above with g ~ N(0, I_n); order statistic at ceil((1-alpha) R), no
// interpolation. Deterministic given the seed and independent of the number
// of workers (draws are indexed, then sorted). mc_draws < 100 is an error.
double simulate_lambda_quantile(const MatrixXd& x_normalized, double alpha,
                                int mc_draws, std::uint64_t seed);

// Plain-loop reference implementation; must produce bit-identical output.
double simulate_lambda_quantile_serial(const MatrixXd& x_normalized, double alpha,
                                       int mc_draws, std::uint64_t seed);

// Iterated noise-level estimation: sigma0 = sd(y), then alternate
// lambda_k = c' sigma_k Lambda, beta_k = lasso(lambda_k), sigma_{k+1} =
// sqrt(Qhat(beta_k)), up to max_refits rounds with early stop on relative
// change. Constant y is an error.
PenaltyCalibration estimate_sigma(const RegressionProblem& prob,
                                  const PenaltyOptions& options,
                                  const LassoOptions& lasso_options = {});

// Calibration with sigma taken as known (no iteration): lambda =
// c_prime * sigma * Lambda(1-alpha|X).
PenaltyCalibration calibrate_known_sigma(const RegressionProblem& prob, double sigma,
                                         const PenaltyOptions& options);

struct ConditionVReport {
  double ell = 0.0;         // sigma-hat / sigma on this realization
  double u = 0.0;           // same value; the interval collapses per draw
  bool event_held = false;  // lambda_final >= c * n ||S||_inf
  double n_score_sup = 0.0; // n ||S||_inf
};

ConditionVReport condition_v_report(const PenaltyCalibration& calib,
                                    const RegressionProblem& prob);

}  // namespace sparsereg

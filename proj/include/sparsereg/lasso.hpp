#pragma once

#include <optional>
#include <vector>

#include "sparsereg/core.hpp"

namespace sparsereg {

struct LassoOptions {
  int max_iter = 20000;           // coordinate-descent sweeps
  double kkt_tol_rel = 1e-8;      // tolerance relative to lambda/n
  double zero_tol = 1e-10;        // support-extraction snap threshold (absolute)
  double coord_tol = 1e-10;       // per-sweep max coordinate change stop
  std::optional<VectorXd> warm_start;
};

// Solution of min_beta Qhat(beta) + (lambda/n) ||beta||_1 with a KKT
// certificate. kkt_residuals[j] = 2 En[x_ij (y_i - x_i' beta)], which
// equals (lambda/n) sign(beta_j) on the support and is at most lambda/n
// in magnitude off it.
struct LassoFit {
  VectorXd beta;
  std::vector<int> support;
  double lambda = 0.0;
  double objective = 0.0;
  VectorXd kkt_residuals;
  int iterations = 0;
};

// Cyclic coordinate descent with exact per-coordinate soft-threshold
// updates and active-set sweeps. Coefficients at or below zero_tol are
// snapped to exact zeros when doing so keeps the KKT certificate valid
// (minimum-support tie-breaking). Throws ConvergenceError after max_iter
// sweeps, carrying the worst KKT violation.
LassoFit fit_lasso(const RegressionProblem& prob, double lambda,
                   const LassoOptions& options = {});

// beta_j 1{|beta_j| > t}; strict inequality, t = 0 returns beta unchanged.
VectorXd hard_threshold(const LassoFit& fit, double t);

// ||S||_inf = max_j |2 En[x_ij eps_i]| with eps = y - f; requires ground truth.
double score_sup_norm(const RegressionProblem& prob);

inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace sparsereg

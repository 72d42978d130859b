#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "sparsereg/core.hpp"
#include "sparsereg/lasso.hpp"

namespace sparsereg {

// Solution of the oracle risk-minimization program: smallest k minimizing
// c_k^2 + sigma^2 k / n, with c_k^2 the best k-term approximation error of
// f in the prediction norm, computed by exhaustive subset enumeration
// (or by the nested-support heuristic, flagged).
struct OracleSolution {
  int s = 0;                                    // |support|
  std::vector<int> support;                     // oracle model T
  VectorXd beta0;                               // oracle target, length p
  std::vector<std::pair<int, double>> c_k_curve;  // (k, c_k^2), k = 0..k_max
  double c_s = 0.0;                             // ||f - X beta0||_{Pn,2}
  double risk = 0.0;                            // c_s^2 + sigma^2 s / n
  bool heuristic = false;
};

// Exhaustive enumeration; requires ground truth (f, sigma), p <= 25 and a
// total subset budget. OpenMP-parallel over subset ranks with the serial
// reference below producing bit-identical results.
OracleSolution solve_oracle(const RegressionProblem& prob, int k_max);
OracleSolution solve_oracle_serial(const RegressionProblem& prob, int k_max);

// Nested prefix supports {0..k-1} only; no dimension cap. Used in
// simulation mode at large p where exhaustive search is infeasible.
OracleSolution solve_oracle_nested(const RegressionProblem& prob, int k_max);

struct REOptions {
  int restarts = 6;
  int max_iter = 4000;
  double tol = 1e-11;
  int grid_points = 100000;     // per sign pattern, certification sampling
  std::uint64_t seed = 0x9a11;
  bool grid = true;             // run the dense-grid cross-check when p <= 10
};

struct REResult {
  double kappa = 0.0;
  bool certified = false;  // dense grid bracketed the minimum (p <= 10)
  double qp_value = 0.0;    // best projected-descent objective (kappa scale)
  double grid_value = std::numeric_limits<double>::infinity();
};

// Restricted eigenvalue kappa(c_bar) = min over the cone
// ||delta_{T^c}||_1 <= c_bar ||delta_T||_1 of sqrt(s)||delta||_{2,n} /
// ||delta_T||_1. Within each sign pattern of delta_T the program is a
// convex QP over (simplex x l1-ball), solved by projected gradient with
// restarts; patterns are enumerated (2^{s-1} after symmetry, s <= 13).
REResult restricted_eigenvalue(const MatrixXd& x, const std::vector<int>& support_T,
                               double c_bar, const REOptions& options = {});

// phi(m), kappa_tilde(m), mu(m) for m = 0..m_max by exact enumeration of
// the principal submatrices over T union J, J subset of T^c, |J| = m.
struct DesignConstants {
  std::vector<std::pair<double, double>> kappa_re;  // (c_bar, kappa) entries, caller-filled
  std::vector<double> phi;          // index m
  std::vector<double> kappa_tilde;  // index m
  std::vector<double> mu;           // sqrt(phi)/kappa_tilde
};

DesignConstants restricted_sparse_eigenvalues(const MatrixXd& x,
                                              const std::vector<int>& support_T,
                                              int m_max,
                                              std::uint64_t subset_budget = 1000000);
DesignConstants restricted_sparse_eigenvalues_serial(const MatrixXd& x,
                                                     const std::vector<int>& support_T,
                                                     int m_max,
                                                     std::uint64_t subset_budget = 1000000);

enum class CheckStatus { holds, failed, inconclusive };

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  CheckStatus status = CheckStatus::holds;
};

// Per-replication certificate of the finite-sample bounds. All bound
// checks are deterministic consequences of event_lambda; a failed check
// under the event indicates a solver or constant bug, except that the l1
// check downgrades to inconclusive when the restricted-eigenvalue search
// is not grid-certified.
struct BoundReport {
  bool event_lambda = false;
  double lambda = 0.0;
  double c = 0.0;
  double c_bar = 0.0;
  int m_hat = 0;            // |T-hat \ T|
  int selected_size = 0;    // |T-hat|
  BoundCheck pred;          // prediction-norm bound
  BoundCheck l1;            // l1-norm bound
  BoundCheck lower;         // lower bound on ||f-hat - f||
  BoundCheck presparsity;   // m-hat <= s phi(m-hat) L_n
  double zeta = 0.0;        // max_j |beta-hat_j - beta0_j|
  double b_n = 0.0;         // Qhat(beta-hat) - Qhat(beta0)
  double c_n = 0.0;         // Qhat(beta0 truncated to T-hat) - Qhat(beta0)
  bool subset = false;      // T subset of T-hat
  bool exact_selection = false;
  bool kkt_certificate = false;
  double kappa_cbar = 0.0;
  double kappa_2cbar = 0.0;
  bool kappa_certified = false;
  double phi_mhat = 0.0;
};

// Evaluates every lhs/rhs pair against the oracle solution and design
// constants. rse must cover m = m_hat; kappa values come from
// restricted_eigenvalue at c_bar and 2 c_bar. re_margin is the
// conservative shrink applied to kappa in upper-bound denominators.
BoundReport certify_bounds(const RegressionProblem& prob, const LassoFit& fit,
                           double c, const OracleSolution& oracle,
                           const DesignConstants& rse, double kappa_cbar,
                           double kappa_2cbar, bool kappa_certified,
                           double re_margin = 0.01);

// Primal-dual witness conditions for perfect model selection at penalty
// lambda: sup-norm inequality on T^c and strict sign consistency on T,
// evaluated at the oracle target. Requires |T| >= 1 and an invertible
// Gram submatrix on T.
bool perfect_selection_certificate(const RegressionProblem& prob, double lambda,
                                   const VectorXd& beta0,
                                   const std::vector<int>& support_T);
bool perfect_selection_certificate(const RegressionProblem& prob, double lambda);

}  // namespace sparsereg

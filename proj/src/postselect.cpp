#include "sparsereg/postselect.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sparsereg/errors.hpp"

namespace sparsereg {

namespace {

std::vector<int> support_above(const VectorXd& beta, double t) {
  std::vector<int> out;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (std::abs(beta[j]) > t) out.push_back(static_cast<int>(j));
  return out;
}

// Distinct magnitudes of active lasso coefficients, ascending. Together
// with t = 0 these index every support reachable by thresholding.
std::vector<double> candidate_thresholds(const LassoFit& fit) {
  std::set<double> mags;
  for (int j : fit.support) mags.insert(std::abs(fit.beta[j]));
  return {mags.begin(), mags.end()};
}

}  // namespace

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::plain: return "plain";
    case Scheme::traditional: return "traditional";
    case Scheme::fitness: return "fitness";
  }
  return "?";
}

VectorXd ols_on_support(const RegressionProblem& prob, const std::vector<int>& support) {
  const int p = prob.p();
  if (static_cast<int>(support.size()) > prob.n()) {
    throw DataError("ols_on_support: selected model larger than the sample (" +
                    std::to_string(support.size()) + " > " + std::to_string(prob.n()) + ")");
  }
  VectorXd beta = VectorXd::Zero(p);
  if (support.empty()) return beta;
  MatrixXd xs(prob.n(), support.size());
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] < 0 || support[k] >= p) throw DataError("ols_on_support: index out of range");
    xs.col(static_cast<Eigen::Index>(k)) = prob.x.col(support[k]);
  }
  const VectorXd coef = xs.completeOrthogonalDecomposition().solve(prob.y);
  for (std::size_t k = 0; k < support.size(); ++k) beta[support[k]] = coef[static_cast<Eigen::Index>(k)];
  return beta;
}

PostSelectionFit post_lasso(const RegressionProblem& prob, const LassoFit& fit) {
  PostSelectionFit out;
  out.scheme = Scheme::plain;
  out.threshold_t = 0.0;
  out.selected = fit.support;
  out.beta = ols_on_support(prob, out.selected);
  out.objective = objective_q(prob, out.beta);
  out.ols_solves = 1;
  return out;
}

PostSelectionFit post_traditional(const RegressionProblem& prob, const LassoFit& fit,
                                  double c_tilde) {
  if (c_tilde < 1.0) throw DataError("post_traditional: c_tilde must be >= 1");
  PostSelectionFit out;
  out.scheme = Scheme::traditional;
  out.threshold_t = c_tilde * fit.lambda / static_cast<double>(prob.n());
  out.selected = support_above(fit.beta, out.threshold_t);
  out.beta = ols_on_support(prob, out.selected);
  out.objective = objective_q(prob, out.beta);
  out.ols_solves = 1;
  return out;
}

std::vector<FitnessCandidate> fitness_scan(const RegressionProblem& prob,
                                           const LassoFit& fit, double gamma) {
  if (fit.support.size() > 64) {
    throw BudgetError("fitness_scan: exhaustive scan limited to |T-hat| <= 64");
  }
  std::vector<double> grid = candidate_thresholds(fit);
  grid.insert(grid.begin(), 0.0);
  std::vector<FitnessCandidate> out;
  out.reserve(grid.size());
  for (double t : grid) {
    FitnessCandidate cand;
    cand.t = t;
    cand.support = support_above(fit.beta, t);
    cand.objective = objective_q(prob, ols_on_support(prob, cand.support));
    cand.passes = cand.objective - fit.objective <= gamma;
    out.push_back(std::move(cand));
  }
  return out;
}

PostSelectionFit post_fitness(const RegressionProblem& prob, const LassoFit& fit,
                              std::optional<double> gamma_opt,
                              const FitnessOptions& options) {
  if (gamma_opt.has_value() && *gamma_opt > 0.0) {
    throw DataError("post_fitness: gamma must be nonpositive");
  }

  PostSelectionFit out;
  out.scheme = Scheme::fitness;

  // t = 0 refit: the auto-gamma reference and the always-feasible fallback.
  const std::vector<int> full = fit.support;
  VectorXd beta0 = ols_on_support(prob, full);
  double q0 = objective_q(prob, beta0);
  int solves = 1;

  // Auto rule; clamped at 0 so rounding in the refit cannot flip the sign.
  const double gamma = gamma_opt.value_or(std::min(0.0, 0.5 * (q0 - fit.objective)));

  double best_t = 0.0;
  std::vector<int> best_support = full;
  VectorXd best_beta = beta0;
  double best_q = q0;

  const std::vector<double> grid = candidate_thresholds(fit);
  const int k = static_cast<int>(grid.size());

  if (options.exact) {
    // Largest passing threshold by full scan.
    const auto scan = fitness_scan(prob, fit, gamma);
    solves = static_cast<int>(scan.size());
    for (const auto& cand : scan) {
      if (cand.passes) {
        best_t = cand.t;
        best_support = cand.support;
        best_q = cand.objective;
      }
    }
    best_beta = ols_on_support(prob, best_support);
    ++solves;
    out.exact_scan = true;
  } else {
    // Binary search for the boundary of the pass predicate over grid
    // indices 1..k, with the t = 0 sentinel at index 0 treated as passing.
    int lo = 0;
    int hi = k;
    while (lo < hi) {
      const int mid = lo + (hi - lo + 1) / 2;  // probe upper half
      const double t = grid[mid - 1];
      const std::vector<int> sel = support_above(fit.beta, t);
      const VectorXd b = ols_on_support(prob, sel);
      const double q = objective_q(prob, b);
      ++solves;
      if (q - fit.objective <= gamma) {
        lo = mid;
        best_t = t;
        best_support = sel;
        best_beta = b;
        best_q = q;
      } else {
        hi = mid - 1;
      }
    }
  }

  out.threshold_t = best_t;
  out.gamma = gamma;
  out.selected = best_support;
  out.beta = best_beta;
  out.objective = best_q;
  out.ols_solves = solves;
  return out;
}

}  // namespace sparsereg

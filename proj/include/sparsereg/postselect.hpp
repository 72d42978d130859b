#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sparsereg/core.hpp"
#include "sparsereg/lasso.hpp"

namespace sparsereg {

enum class Scheme { plain, traditional, fitness };

std::string scheme_name(Scheme s);

// OLS refit on a selected support. For the fitness scheme, ols_solves
// counts every least-squares refit performed and gamma holds the fit
// budget actually used.
struct PostSelectionFit {
  Scheme scheme = Scheme::plain;
  double threshold_t = 0.0;
  std::optional<double> gamma;
  std::vector<int> selected;
  VectorXd beta;
  double objective = 0.0;
  int ols_solves = 0;
  bool exact_scan = false;  // fitness: exhaustive scan was used instead of binary search
};

// Minimum-norm least squares on the selected columns (rank-revealing
// orthogonal factorization); zero outside the support. |support| > n is
// an error.
VectorXd ols_on_support(const RegressionProblem& prob, const std::vector<int>& support);

// t = 0: OLS on the lasso support.
PostSelectionFit post_lasso(const RegressionProblem& prob, const LassoFit& fit);

// t = c_tilde * lambda / n, c_tilde >= 1.
PostSelectionFit post_traditional(const RegressionProblem& prob, const LassoFit& fit,
                                  double c_tilde = 1.0);

struct FitnessOptions {
  bool exact = false;      // exhaustive candidate scan (|T-hat| <= 64)
};

// Fitness threshold: the largest t in {0} + sorted distinct active
// coefficient magnitudes whose OLS refit keeps Qhat within gamma of the
// lasso fit. gamma = nullopt means the auto rule (Qhat(post-lasso) -
// Qhat(lasso)) / 2. Binary search over the candidate grid by default;
// at most ceil(log2 |T-hat|) + 2 least-squares solves.
PostSelectionFit post_fitness(const RegressionProblem& prob, const LassoFit& fit,
                              std::optional<double> gamma = std::nullopt,
                              const FitnessOptions& options = {});

// Full candidate scan used by exact mode and by the non-monotonicity
// diagnosis: one entry per threshold in the candidate grid, ascending.
struct FitnessCandidate {
  double t = 0.0;
  std::vector<int> support;
  double objective = 0.0;
  bool passes = false;
};

std::vector<FitnessCandidate> fitness_scan(const RegressionProblem& prob,
                                           const LassoFit& fit, double gamma);

}  // namespace sparsereg

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "sparsereg/errors.hpp"
#include "sparsereg/postselect.hpp"
#include "test_util.hpp"

using namespace sparsereg;
using testutil::orthonormal_design;
using testutil::planted_instance;
using testutil::random_gaussian;
using testutil::random_vector;

namespace {

int ceil_log2(int m) {
  int k = 0;
  while ((1 << k) < m) ++k;
  return k;
}

// Largest passing threshold by brute force, used as the oracle for the
// binary search.
std::vector<int> exhaustive_fitness_support(const RegressionProblem& prob,
                                            const LassoFit& fit, double gamma) {
  const auto scan = fitness_scan(prob, fit, gamma);
  std::vector<int> best = fit.support;
  for (const auto& cand : scan) {
    if (cand.passes) best = cand.support;
  }
  return best;
}

}  // namespace

TEST_CASE("ols_on_support basics") {
  Rng rng(101);
  const int n = 20, p = 6;
  MatrixXd x = random_gaussian(rng, n, p);
  VectorXd y = random_vector(rng, n);
  RegressionProblem prob = RegressionProblem::from_raw(x, y);

  SUBCASE("empty support gives the zero fit") {
    const VectorXd beta = ols_on_support(prob, {});
    CHECK(beta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(objective_q(prob, beta) == doctest::Approx(y.squaredNorm() / n));
  }

  SUBCASE("full support solves the normal equations") {
    std::vector<int> full{0, 1, 2, 3, 4, 5};
    const VectorXd beta = ols_on_support(prob, full);
    const VectorXd resid = prob.y - prob.x * beta;
    for (int j = 0; j < p; ++j) {
      CHECK(std::abs(prob.x.col(j).dot(resid)) / n < 1e-10);
    }
  }

  SUBCASE("duplicated columns get a finite minimum-norm solution") {
    MatrixXd xx = x;
    xx.col(1) = xx.col(0);
    RegressionProblem dup = RegressionProblem::from_raw(xx, y);
    const VectorXd both = ols_on_support(dup, {0, 1});
    const VectorXd one = ols_on_support(dup, {0});
    CHECK(std::isfinite(both.cwiseAbs().maxCoeff()));
    CHECK(objective_q(dup, both) == doctest::Approx(objective_q(dup, one)).epsilon(1e-10));
  }

  SUBCASE("oversized support is an error") {
    MatrixXd wide = random_gaussian(rng, 4, 6);
    RegressionProblem wp = RegressionProblem::from_raw(wide, random_vector(rng, 4));
    CHECK_THROWS_AS(ols_on_support(wp, {0, 1, 2, 3, 4}), DataError);
  }
}

TEST_CASE("post_lasso") {
  Rng rng(103);

  SUBCASE("noiseless exact selection reproduces the target") {
    RegressionProblem prob = planted_instance(rng, 30, 8, 2, 3.0, 0.0, true);
    const LassoFit fit = fit_lasso(prob, 0.5 * 30);
    REQUIRE(fit.support == std::vector<int>{0, 1});
    const PostSelectionFit ps = post_lasso(prob, fit);
    CHECK((ps.beta - prob.truth->beta0).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("refit can only improve the in-sample fit") {
    for (int trial = 0; trial < 200; ++trial) {
      Rng trng(5000 + trial);
      const int n = 20 + static_cast<int>(20 * trng.uniform01());
      const int p = 5 + static_cast<int>(10 * trng.uniform01());
      RegressionProblem prob = planted_instance(trng, n, p, 2, 1.0, 0.7);
      const LassoFit fit = fit_lasso(prob, (0.1 + trng.uniform01()) * n);
      const PostSelectionFit ps = post_lasso(prob, fit);
      CHECK(ps.objective <= fit.objective + 1e-12);
      CHECK(ps.selected == fit.support);
    }
  }

  SUBCASE("empty selection gives a zero fit") {
    RegressionProblem prob = planted_instance(rng, 15, 5, 2, 1.0, 1.0);
    const LassoFit fit = fit_lasso(prob, 1e9);
    const PostSelectionFit ps = post_lasso(prob, fit);
    CHECK(ps.selected.empty());
    CHECK(ps.beta.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("post_traditional") {
  Rng rng(107);
  RegressionProblem prob = planted_instance(rng, 40, 10, 1, 5.0, 0.2);
  const LassoFit fit = fit_lasso(prob, 0.3 * 40);

  SUBCASE("default threshold is lambda over n") {
    const PostSelectionFit ps = post_traditional(prob, fit);
    CHECK(ps.threshold_t == doctest::Approx(fit.lambda / 40.0));
    // indicator evaluated by hand
    std::vector<int> expect;
    for (int j = 0; j < 10; ++j)
      if (std::abs(fit.beta[j]) > fit.lambda / 40.0) expect.push_back(j);
    CHECK(ps.selected == expect);
  }

  SUBCASE("dominant coefficient survives as a singleton") {
    const PostSelectionFit ps = post_traditional(prob, fit);
    REQUIRE(ps.selected.size() == 1);
    CHECK(ps.selected[0] == 0);
  }

  SUBCASE("total truncation gives the zero fit") {
    const PostSelectionFit ps = post_traditional(prob, fit, 1e9);
    CHECK(ps.selected.empty());
    CHECK(ps.objective == doctest::Approx(prob.y.squaredNorm() / 40.0));
  }

  SUBCASE("c_tilde below one is rejected") {
    CHECK_THROWS_AS(post_traditional(prob, fit, 0.5), DataError);
  }
}

TEST_CASE("post_fitness: binary search agrees with the exhaustive scan") {
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    Rng rng(9000 + trial);
    const int n = 25 + static_cast<int>(25 * rng.uniform01());
    const int p = 6 + static_cast<int>(12 * rng.uniform01());
    const int s = 1 + static_cast<int>(3 * rng.uniform01());
    RegressionProblem prob = planted_instance(rng, n, p, s, 0.8, 0.8);
    const LassoFit fit = fit_lasso(prob, (0.05 + 0.4 * rng.uniform01()) * n);
    if (fit.support.empty() || static_cast<int>(fit.support.size()) > 15) continue;
    ++checked;

    const PostSelectionFit bs = post_fitness(prob, fit);
    REQUIRE(bs.gamma.has_value());
    const std::vector<int> oracle = exhaustive_fitness_support(prob, fit, *bs.gamma);

    if (bs.selected != oracle) {
      // only a genuine non-monotone pass pattern may explain a mismatch
      const auto scan = fitness_scan(prob, fit, *bs.gamma);
      bool nonmonotone = false;
      for (std::size_t i = 0; i + 1 < scan.size() && !nonmonotone; ++i)
        for (std::size_t j = i + 1; j < scan.size() && !nonmonotone; ++j)
          if (!scan[i].passes && scan[j].passes) nonmonotone = true;
      CHECK(nonmonotone);
    }

    const int t_hat = static_cast<int>(fit.support.size());
    CHECK(bs.ols_solves <= ceil_log2(t_hat) + 2);

    // exact mode must equal the oracle support
    const PostSelectionFit ex = post_fitness(prob, fit, std::nullopt, {.exact = true});
    CHECK(ex.selected == oracle);
  }
  CHECK(checked > 60);
}

TEST_CASE("post_fitness: gamma semantics") {
  Rng rng(109);
  RegressionProblem prob = planted_instance(rng, 40, 8, 2, 1.0, 0.5);
  const LassoFit fit = fit_lasso(prob, 0.2 * 40);
  REQUIRE(!fit.support.empty());

  SUBCASE("positive gamma is rejected") {
    CHECK_THROWS_AS(post_fitness(prob, fit, 0.1), DataError);
  }

  SUBCASE("auto gamma halves the post-lasso gain and is honored") {
    const PostSelectionFit plain = post_lasso(prob, fit);
    const PostSelectionFit ps = post_fitness(prob, fit);
    REQUIRE(ps.gamma.has_value());
    CHECK(*ps.gamma ==
          doctest::Approx(std::min(0.0, 0.5 * (plain.objective - fit.objective))));
    CHECK(ps.objective - fit.objective <= *ps.gamma + 1e-12);
  }

  SUBCASE("gamma = 0 returns the sparsest support with lasso-level fit") {
    const PostSelectionFit ps = post_fitness(prob, fit, 0.0);
    const std::vector<int> oracle = exhaustive_fitness_support(prob, fit, 0.0);
    const auto scan = fitness_scan(prob, fit, 0.0);
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < scan.size() && monotone; ++i)
      for (std::size_t j = i + 1; j < scan.size() && monotone; ++j)
        if (!scan[i].passes && scan[j].passes) monotone = false;
    if (monotone) {
      CHECK(ps.selected == oracle);
      CHECK(ps.objective <= fit.objective + 1e-12);
    }
  }

  SUBCASE("singleton lasso support resolves with at most 3 solves") {
    const LassoFit big = fit_lasso(prob, 0.9 * 40);
    if (big.support.size() == 1) {
      const PostSelectionFit ps = post_fitness(prob, big);
      CHECK(ps.ols_solves <= 3);
      const PostSelectionFit plain = post_lasso(prob, big);
      const bool matches_plain =
          ps.selected == plain.selected;
      const bool empty = ps.selected.empty();
      CHECK((matches_plain || empty));
    }
  }
}

TEST_CASE("fitness scan: refit objective is nondecreasing along the threshold grid") {
  // thresholding supports are nested in t, so the OLS refit objective can
  // only grow as t does; this is what makes the binary search exact
  for (int trial = 0; trial < 40; ++trial) {
    Rng rng(14000 + trial);
    RegressionProblem prob = planted_instance(rng, 30, 10, 2, 1.0, 0.7);
    const LassoFit fit = fit_lasso(prob, (0.05 + 0.3 * rng.uniform01()) * 30);
    if (fit.support.empty()) continue;
    const auto scan = fitness_scan(prob, fit, 0.0);
    for (std::size_t i = 1; i < scan.size(); ++i) {
      CHECK(scan[i].objective >= scan[i - 1].objective - 1e-12);
      CHECK(std::includes(scan[i - 1].support.begin(), scan[i - 1].support.end(),
                          scan[i].support.begin(), scan[i].support.end()));
    }
  }
}

TEST_CASE("post-selection invariants: nesting and residual orthogonality") {
  for (int trial = 0; trial < 60; ++trial) {
    Rng rng(12000 + trial);
    const int n = 30, p = 10;
    RegressionProblem prob = planted_instance(rng, n, p, 2, 1.2, 0.6);
    const LassoFit fit = fit_lasso(prob, (0.1 + 0.3 * rng.uniform01()) * n);

    const PostSelectionFit plain = post_lasso(prob, fit);
    const PostSelectionFit trad = post_traditional(prob, fit);
    const PostSelectionFit fitn = post_fitness(prob, fit);

    for (const auto* ps : {&plain, &trad, &fitn}) {
      CHECK(std::includes(fit.support.begin(), fit.support.end(), ps->selected.begin(),
                          ps->selected.end()));
      const VectorXd resid = prob.y - prob.x * ps->beta;
      for (int j : ps->selected) {
        CHECK(std::abs(2.0 * prob.x.col(j).dot(resid) / n) < 1e-8);
      }
    }
    CHECK(plain.objective <= fit.objective + 1e-12);
    CHECK(fitn.objective - fit.objective <= *fitn.gamma + 1e-12);
    CHECK(*fitn.gamma <= 0.0);
  }
}

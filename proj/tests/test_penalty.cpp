#include <cmath>

#include "doctest.h"
#include "sparsereg/errors.hpp"
#include "sparsereg/penalty.hpp"
#include "test_util.hpp"

using namespace sparsereg;
using testutil::planted_instance;
using testutil::random_gaussian;
using testutil::random_vector;

TEST_CASE("lambda quantile: closed form for a single constant column") {
  const int n = 50;
  const int draws = 4000;
  MatrixXd x = MatrixXd::Ones(n, 1);
  const double q = simulate_lambda_quantile(x, 0.05, draws, 99);
  // statistic is 2 sqrt(n) |N(0,1)|; 0.95-quantile of |N(0,1)| is 1.95996
  const double expect = 2.0 * std::sqrt(static_cast<double>(n)) * 1.959964;
  CHECK(std::abs(q - expect) / expect < 3.0 / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("lambda quantile: theoretical envelope and alpha monotonicity") {
  Rng rng(71);
  const int n = 40, p = 25, draws = 2000;
  auto [x, scale] = normalize_columns(random_gaussian(rng, n, p));
  (void)scale;

  const double alpha = 0.05;
  const double q = simulate_lambda_quantile(x, alpha, draws, 5);
  const double envelope = 2.0 * std::sqrt(2.0 * n * std::log(p / alpha));
  CHECK(q <= envelope * (1.0 + 3.0 / std::sqrt(static_cast<double>(draws))));

  const double q_looser = simulate_lambda_quantile(x, 0.5, draws, 5);
  CHECK(q_looser <= q);
}

TEST_CASE("lambda quantile: determinism and serial/parallel agreement") {
  Rng rng(73);
  auto [x, scale] = normalize_columns(random_gaussian(rng, 30, 12));
  (void)scale;
  const double a = simulate_lambda_quantile(x, 0.1, 500, 1234);
  const double b = simulate_lambda_quantile(x, 0.1, 500, 1234);
  const double c = simulate_lambda_quantile_serial(x, 0.1, 500, 1234);
  CHECK(a == b);
  CHECK(a == c);
  const double d = simulate_lambda_quantile(x, 0.1, 500, 1235);
  CHECK(a != d);
}

TEST_CASE("lambda quantile: sigma cancels out of the statistic") {
  Rng rng(79);
  auto [x, scale] = normalize_columns(random_gaussian(rng, 20, 6));
  (void)scale;
  const VectorXd g = random_vector(rng, 20);
  for (double sigma : {0.1, 1.0, 7.5}) {
    CHECK(score_sup_stat(x, sigma * g) / sigma ==
          doctest::Approx(score_sup_stat(x, g)).epsilon(1e-12));
  }
}

TEST_CASE("lambda quantile: rejects noisy quantiles") {
  MatrixXd x = MatrixXd::Ones(10, 1);
  CHECK_THROWS_AS(simulate_lambda_quantile(x, 0.05, 99, 1), DataError);
  CHECK_THROWS_AS(simulate_lambda_quantile(x, 0.0, 500, 1), DataError);
}

TEST_CASE("estimate_sigma: noiseless signal drives sigma-hat down") {
  Rng rng(83);
  RegressionProblem prob = planted_instance(rng, 40, 10, 3, 2.0, 0.0);
  PenaltyOptions opt;
  opt.mc_draws = 400;
  opt.seed = 7;
  const PenaltyCalibration cal = estimate_sigma(prob, opt);
  CHECK(cal.sigma_iterates.size() >= 2);
  CHECK(cal.sigma_iterates.back() <= cal.sigma_iterates.front());
  for (double s : cal.sigma_iterates) CHECK(s > 0.0);
  CHECK(cal.lambda_final ==
        cal.c_prime * cal.sigma_iterates.back() * cal.lambda_quantile);
}

TEST_CASE("estimate_sigma: pure noise recovers sigma near 1") {
  int ok = 0;
  const int reps = 30;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(1000 + rep);
    RegressionProblem prob = planted_instance(rng, 100, 50, 0, 0.0, 1.0);
    PenaltyOptions opt;
    opt.mc_draws = 300;
    opt.seed = 17 + rep;
    const PenaltyCalibration cal = estimate_sigma(prob, opt);
    const double ratio = cal.sigma_iterates.back();
    if (ratio >= 0.7 && ratio <= 1.3) ++ok;
  }
  CHECK(ok >= reps - 1);
}

TEST_CASE("estimate_sigma: constant response is an error") {
  MatrixXd x = MatrixXd::Ones(8, 2);
  x.col(1) = VectorXd::LinSpaced(8, 1.0, 2.0);
  VectorXd y = VectorXd::Constant(8, 3.0);
  RegressionProblem prob = RegressionProblem::from_raw(x, y);
  PenaltyOptions opt;
  opt.mc_draws = 200;
  CHECK_THROWS_AS(estimate_sigma(prob, opt), DataError);
}

TEST_CASE("condition_v_report") {
  Rng rng(89);
  RegressionProblem prob = planted_instance(rng, 50, 8, 2, 1.0, 1.0);

  SUBCASE("exact sigma gives ell = u = 1") {
    PenaltyOptions opt;
    opt.mc_draws = 300;
    opt.seed = 3;
    const PenaltyCalibration cal = calibrate_known_sigma(prob, 1.0, opt);
    const ConditionVReport rep = condition_v_report(cal, prob);
    CHECK(rep.ell == doctest::Approx(1.0));
    CHECK(rep.u == doctest::Approx(1.0));
  }

  SUBCASE("forcing lambda far above the score forces the event") {
    PenaltyCalibration cal;
    cal.c = 1.1;
    cal.c_prime = 1.21;
    cal.sigma_iterates = {1.0};
    cal.lambda_final = 10.0 * cal.c * prob.n() * score_sup_norm(prob);
    const ConditionVReport rep = condition_v_report(cal, prob);
    CHECK(rep.event_held);
  }

  SUBCASE("missing ground truth") {
    RegressionProblem bare = RegressionProblem::from_raw(prob.x, prob.y);
    PenaltyCalibration cal;
    cal.sigma_iterates = {1.0};
    CHECK_THROWS_AS(condition_v_report(cal, bare), DataError);
  }
}

TEST_CASE("penalty event frequency meets the Condition-V target") {
  // P(lambda >= c n ||S||_inf) >= 1 - alpha - 3 sqrt(alpha / R) with the
  // iterated sigma-hat in the loop.
  const int reps = 500;
  const double alpha = 0.05;
  int held = 0;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(40000 + rep);
    RegressionProblem prob = planted_instance(rng, 40, 15, 2, 1.0, 1.0);
    PenaltyOptions opt;
    opt.alpha = alpha;
    opt.mc_draws = 300;
    opt.seed = 555 + rep;
    const PenaltyCalibration cal = estimate_sigma(prob, opt);
    if (condition_v_report(cal, prob).event_held) ++held;
  }
  const double freq = static_cast<double>(held) / reps;
  CHECK(freq >= 1.0 - alpha - 3.0 * std::sqrt(alpha / reps));
}

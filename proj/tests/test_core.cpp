#include <cmath>

#include "doctest.h"
#include "sparsereg/core.hpp"
#include "sparsereg/errors.hpp"
#include "test_util.hpp"

using namespace sparsereg;
using testutil::random_gaussian;
using testutil::random_vector;

TEST_CASE("normalize_columns: already unit columns unchanged") {
  MatrixXd x = MatrixXd::Ones(4, 1);
  auto [xn, scale] = normalize_columns(x);
  CHECK(scale[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((xn - x).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("normalize_columns: constant scaling") {
  MatrixXd x(4, 1);
  x << 2, 2, 2, 2;
  auto [xn, scale] = normalize_columns(x);
  CHECK(scale[0] == doctest::Approx(2.0).epsilon(1e-14));
  for (int i = 0; i < 4; ++i) CHECK(xn(i, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("normalize_columns: random matrix gets unit second moments") {
  Rng rng(7);
  const MatrixXd x = random_gaussian(rng, 10, 3);
  auto [xn, scale] = normalize_columns(x);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(xn.col(j).squaredNorm() / 10.0 - 1.0) < 1e-12);
    CHECK((xn.col(j) * scale[j] - x.col(j)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("normalize_columns: zero column error names the column") {
  MatrixXd x = MatrixXd::Ones(5, 3);
  x.col(1).setZero();
  CHECK_THROWS_WITH_AS(normalize_columns(x), doctest::Contains("column 2"), DataError);
}

TEST_CASE("prediction_norm basics") {
  Rng rng(11);
  MatrixXd x = random_gaussian(rng, 8, 5);
  RegressionProblem prob = RegressionProblem::from_raw(x, random_vector(rng, 8));

  CHECK(prediction_norm(prob, VectorXd::Zero(5)) == 0.0);

  for (int j = 0; j < 5; ++j) {
    VectorXd ej = VectorXd::Zero(5);
    ej[j] = 1.0;
    CHECK(prediction_norm(prob, ej) == doctest::Approx(1.0).epsilon(1e-12));
  }

  const VectorXd delta = random_vector(rng, 5);
  const double dense = (prob.x * delta).norm() / std::sqrt(8.0);
  CHECK(prediction_norm(prob, delta) == doctest::Approx(dense).epsilon(1e-14));

  CHECK_THROWS_AS(prediction_norm(prob, VectorXd::Zero(4)), DataError);
}

TEST_CASE("prediction_norm is a seminorm") {
  Rng rng(13);
  MatrixXd x = random_gaussian(rng, 12, 6);
  RegressionProblem prob = RegressionProblem::from_raw(x, random_vector(rng, 12));
  for (int trial = 0; trial < 50; ++trial) {
    const VectorXd d1 = random_vector(rng, 6);
    const VectorXd d2 = random_vector(rng, 6);
    const double a = 3.0 * rng.normal();
    CHECK(prediction_norm(prob, a * d1) ==
          doctest::Approx(std::abs(a) * prediction_norm(prob, d1)).epsilon(1e-10));
    CHECK(prediction_norm(prob, d1 + d2) <=
          prediction_norm(prob, d1) + prediction_norm(prob, d2) + 1e-10);
  }
}

TEST_CASE("objective_q basics") {
  Rng rng(17);
  MatrixXd x = random_gaussian(rng, 6, 3);
  VectorXd y = random_vector(rng, 6);
  RegressionProblem prob = RegressionProblem::from_raw(x, y);

  CHECK(objective_q(prob, VectorXd::Zero(3)) ==
        doctest::Approx(y.squaredNorm() / 6.0).epsilon(1e-14));

  // entrywise recomputation
  const VectorXd beta = random_vector(rng, 3);
  double acc = 0.0;
  for (int i = 0; i < 6; ++i) {
    double pred = 0.0;
    for (int j = 0; j < 3; ++j) pred += prob.x(i, j) * beta[j];
    acc += (y[i] - pred) * (y[i] - pred);
  }
  CHECK(objective_q(prob, beta) == doctest::Approx(acc / 6.0).epsilon(1e-12));

  // exact interpolation
  VectorXd beta_star = random_vector(rng, 3);
  VectorXd y2 = prob.x * beta_star;
  RegressionProblem prob2 = RegressionProblem::from_raw(prob.x, y2);
  CHECK(objective_q(prob2, beta_star.cwiseProduct(prob2.scale)) < 1e-20);
}

TEST_CASE("quadratic expansion identity under ground truth") {
  Rng rng(19);
  const int n = 20, p = 6;
  MatrixXd z = random_gaussian(rng, n, p);
  VectorXd theta = random_vector(rng, p);
  VectorXd f = z * theta;
  VectorXd y = f;
  for (int i = 0; i < n; ++i) y[i] += 0.5 * rng.normal();
  RegressionProblem prob = RegressionProblem::from_raw(z, y, theta, f, 0.5);

  const VectorXd beta0 = prob.truth->beta0;
  const VectorXd eps = prob.noise();
  const VectorXd r = prob.truth->f - prob.x * beta0;  // zero here, kept general
  for (int trial = 0; trial < 20; ++trial) {
    const VectorXd beta = beta0 + random_vector(rng, p);
    const VectorXd delta = beta - beta0;
    const double lhs = objective_q(prob, beta) - objective_q(prob, beta0) -
                       prediction_norm(prob, delta) * prediction_norm(prob, delta);
    const VectorXd xd = prob.x * delta;
    const double rhs = 2.0 * eps.dot(xd) / n + 2.0 * r.dot(xd) / n;
    CHECK(lhs == doctest::Approx(-rhs).epsilon(1e-10));
    CHECK(std::abs(std::abs(lhs) - std::abs(rhs)) < 1e-10);
  }
}

TEST_CASE("ground truth bookkeeping") {
  Rng rng(23);
  MatrixXd z = 2.0 * random_gaussian(rng, 15, 4);
  VectorXd theta = VectorXd::Zero(4);
  theta[1] = 3.0;
  theta[3] = -1.0;
  VectorXd f = z * theta;
  VectorXd y = f;
  for (int i = 0; i < 15; ++i) y[i] += rng.normal();
  RegressionProblem prob = RegressionProblem::from_raw(z, y, theta, f, 1.0);

  CHECK(prob.truth->support == std::vector<int>{1, 3});
  // normalized coefficients reproduce f through the normalized design
  CHECK((prob.x * prob.truth->beta0 - f).cwiseAbs().maxCoeff() < 1e-10);
  // round trip back to the original scale
  CHECK((prob.to_original_scale(prob.truth->beta0) - theta).cwiseAbs().maxCoeff() < 1e-12);

  const ApproxError ae = approx_error(prob, prob.truth->beta0);
  CHECK(ae.c_s < 1e-10);
  CHECK(std::abs(ae.c_s * ae.c_s - ae.r.squaredNorm() / 15.0) < 1e-12);
}

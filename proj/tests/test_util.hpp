#pragma once

#include <Eigen/QR>
#include <cmath>

#include "sparsereg/core.hpp"
#include "sparsereg/rng.hpp"

namespace testutil {

using sparsereg::MatrixXd;
using sparsereg::RegressionProblem;
using sparsereg::Rng;
using sparsereg::VectorXd;

inline MatrixXd random_gaussian(Rng& rng, int n, int p) {
  MatrixXd a(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
  return a;
}

inline VectorXd random_vector(Rng& rng, int n) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

// X with X'X/n = I exactly (columns of an orthogonal factor scaled by sqrt(n)).
inline MatrixXd orthonormal_design(Rng& rng, int n, int p) {
  MatrixXd a = random_gaussian(rng, n, p);
  Eigen::HouseholderQR<MatrixXd> qr(a);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, p);
  return std::sqrt(static_cast<double>(n)) * q;
}

// Gaussian-design instance with an s-sparse planted coefficient vector
// (leading s coordinates equal to coef) and N(0, sigma^2) noise.
inline RegressionProblem planted_instance(Rng& rng, int n, int p, int s, double coef,
                                          double sigma, bool orthonormal = false) {
  MatrixXd z = orthonormal ? orthonormal_design(rng, n, p) : random_gaussian(rng, n, p);
  VectorXd theta = VectorXd::Zero(p);
  for (int j = 0; j < s; ++j) theta[j] = coef;
  VectorXd f = z * theta;
  VectorXd y = f;
  for (int i = 0; i < n; ++i) y[i] += sigma * rng.normal();
  return RegressionProblem::from_raw(std::move(z), std::move(y), theta, f, sigma);
}

}  // namespace testutil

#include "sparsereg/core.hpp"

#include <cmath>
#include <string>

#include "sparsereg/errors.hpp"

namespace sparsereg {

std::pair<MatrixXd, VectorXd> normalize_columns(const MatrixXd& x_raw) {
  const auto n = x_raw.rows();
  const auto p = x_raw.cols();
  if (n < 1 || p < 1) throw DataError("normalize_columns: empty matrix");
  MatrixXd x = x_raw;
  VectorXd scale(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double msq = x.col(j).squaredNorm() / static_cast<double>(n);
    if (msq == 0.0) {
      throw DataError("normalize_columns: column " + std::to_string(j + 1) +
                      " is identically zero");
    }
    const double s = std::sqrt(msq);
    scale[j] = s;
    x.col(j) /= s;
  }
  return {std::move(x), std::move(scale)};
}

RegressionProblem RegressionProblem::from_raw(MatrixXd x_raw, VectorXd y,
                                              std::optional<VectorXd> theta_raw,
                                              std::optional<VectorXd> f,
                                              double sigma) {
  if (y.size() != x_raw.rows()) {
    throw DataError("RegressionProblem: y has length " + std::to_string(y.size()) +
                    " but x has " + std::to_string(x_raw.rows()) + " rows");
  }
  auto [x, scale] = normalize_columns(x_raw);
  RegressionProblem prob;
  prob.x = std::move(x);
  prob.y = std::move(y);
  prob.scale = std::move(scale);
  if (theta_raw.has_value()) {
    if (!f.has_value()) throw DataError("RegressionProblem: truth requires f");
    if (theta_raw->size() != prob.p() || f->size() != prob.n()) {
      throw DataError("RegressionProblem: ground-truth dimension mismatch");
    }
    GroundTruth gt;
    gt.f = std::move(*f);
    gt.beta0 = theta_raw->cwiseProduct(prob.scale);
    gt.sigma = sigma;
    for (int j = 0; j < prob.p(); ++j) {
      if (gt.beta0[j] != 0.0) gt.support.push_back(j);
    }
    prob.truth = std::move(gt);
  }
  return prob;
}

VectorXd RegressionProblem::to_original_scale(const VectorXd& beta_normalized) const {
  if (beta_normalized.size() != p()) {
    throw DataError("to_original_scale: dimension mismatch");
  }
  return beta_normalized.cwiseQuotient(scale);
}

VectorXd RegressionProblem::noise() const {
  if (!truth.has_value()) throw DataError("noise: ground truth not present");
  return y - truth->f;
}

double prediction_norm(const RegressionProblem& prob, const VectorXd& delta) {
  if (delta.size() != prob.p()) throw DataError("prediction_norm: dimension mismatch");
  return std::sqrt((prob.x * delta).squaredNorm() / static_cast<double>(prob.n()));
}

double objective_q(const RegressionProblem& prob, const VectorXd& beta) {
  if (beta.size() != prob.p()) throw DataError("objective_q: dimension mismatch");
  return (prob.y - prob.x * beta).squaredNorm() / static_cast<double>(prob.n());
}

ApproxError approx_error(const RegressionProblem& prob, const VectorXd& beta0) {
  if (!prob.truth.has_value()) throw DataError("approx_error: ground truth not present");
  if (beta0.size() != prob.p()) throw DataError("approx_error: dimension mismatch");
  ApproxError ae;
  ae.r = prob.truth->f - prob.x * beta0;
  ae.c_s = std::sqrt(ae.r.squaredNorm() / static_cast<double>(prob.n()));
  return ae;
}

}  // namespace sparsereg

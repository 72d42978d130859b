#include "sparsereg/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sparsereg/errors.hpp"
#include "sparsereg/rng.hpp"

namespace sparsereg {

namespace {

constexpr std::uint64_t kQuantileStream = 0x5c0feULL;

void check_quantile_args(const MatrixXd& x, double alpha, int mc_draws) {
  if (x.rows() < 1 || x.cols() < 1) throw DataError("lambda quantile: empty design");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("lambda quantile: alpha must be in (0,1)");
  if (mc_draws < 100) {
    throw DataError("lambda quantile: mc_draws = " + std::to_string(mc_draws) +
                    " < 100; quantile too noisy to certify");
  }
}

double order_statistic(std::vector<double>& stats, double alpha) {
  std::sort(stats.begin(), stats.end());
  const auto r = static_cast<double>(stats.size());
  auto idx = static_cast<std::size_t>(std::ceil((1.0 - alpha) * r));
  idx = std::min(std::max<std::size_t>(idx, 1), stats.size());
  return stats[idx - 1];
}

double draw_stat(const MatrixXd& x, std::uint64_t seed, int draw_index) {
  Rng rng(mix_seed(seed, kQuantileStream, static_cast<std::uint64_t>(draw_index)));
  VectorXd g(x.rows());
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = rng.normal();
  return score_sup_stat(x, g);
}

}  // namespace

double score_sup_stat(const MatrixXd& x, const VectorXd& g) {
  // n ||2 En[x g]||_inf = 2 ||X'g||_inf
  return 2.0 * (x.transpose() * g).cwiseAbs().maxCoeff();
}

double simulate_lambda_quantile(const MatrixXd& x, double alpha, int mc_draws,
                                std::uint64_t seed) {
  check_quantile_args(x, alpha, mc_draws);
  std::vector<double> stats(mc_draws);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < mc_draws; ++r) stats[r] = draw_stat(x, seed, r);
  return order_statistic(stats, alpha);
}

double simulate_lambda_quantile_serial(const MatrixXd& x, double alpha, int mc_draws,
                                       std::uint64_t seed) {
  check_quantile_args(x, alpha, mc_draws);
  std::vector<double> stats(mc_draws);
  for (int r = 0; r < mc_draws; ++r) stats[r] = draw_stat(x, seed, r);
  return order_statistic(stats, alpha);
}

PenaltyCalibration estimate_sigma(const RegressionProblem& prob,
                                  const PenaltyOptions& options,
                                  const LassoOptions& lasso_options) {
  if (prob.n() < 2) throw DataError("estimate_sigma: needs n >= 2");
  if (!(options.c > 1.0) || !(options.c_prime > options.c)) {
    throw DataError("estimate_sigma: requires c' > c > 1");
  }

  PenaltyCalibration cal;
  cal.alpha = options.alpha;
  cal.c = options.c;
  cal.c_prime = options.c_prime;
  cal.mc_draws = options.mc_draws;
  cal.lambda_quantile =
      simulate_lambda_quantile(prob.x, options.alpha, options.mc_draws, options.seed);

  const double dn = static_cast<double>(prob.n());
  const double mean_y = prob.y.mean();
  const double var_y =
      (prob.y.array() - mean_y).matrix().squaredNorm() / (dn - 1.0);
  if (var_y == 0.0) throw DataError("estimate_sigma: response is constant");
  cal.sigma_iterates.push_back(std::sqrt(var_y));

  LassoOptions lopt = lasso_options;
  for (int k = 0; k < options.max_refits; ++k) {
    const double sigma_k = cal.sigma_iterates.back();
    const double lambda_k = options.c_prime * sigma_k * cal.lambda_quantile;
    const LassoFit fit = fit_lasso(prob, lambda_k, lopt);
    lopt.warm_start = fit.beta;
    const double sigma_next = std::sqrt(fit.objective);
    cal.sigma_iterates.push_back(sigma_next);
    if (std::abs(sigma_next - sigma_k) / sigma_k < options.sigma_rel_tol) break;
  }

  cal.lambda_final = options.c_prime * cal.sigma_iterates.back() * cal.lambda_quantile;
  return cal;
}

PenaltyCalibration calibrate_known_sigma(const RegressionProblem& prob, double sigma,
                                         const PenaltyOptions& options) {
  if (!(sigma > 0.0)) throw DataError("calibrate_known_sigma: sigma must be positive");
  PenaltyCalibration cal;
  cal.alpha = options.alpha;
  cal.c = options.c;
  cal.c_prime = options.c_prime;
  cal.mc_draws = options.mc_draws;
  cal.lambda_quantile =
      simulate_lambda_quantile(prob.x, options.alpha, options.mc_draws, options.seed);
  cal.sigma_iterates.push_back(sigma);
  cal.lambda_final = options.c_prime * sigma * cal.lambda_quantile;
  return cal;
}

ConditionVReport condition_v_report(const PenaltyCalibration& calib,
                                    const RegressionProblem& prob) {
  if (!prob.truth.has_value())
    throw DataError("condition_v_report: ground truth not present");
  ConditionVReport rep;
  const double ratio = calib.sigma_iterates.back() / prob.truth->sigma;
  rep.ell = ratio;
  rep.u = ratio;
  rep.n_score_sup = static_cast<double>(prob.n()) * score_sup_norm(prob);
  rep.event_held = calib.lambda_final >= calib.c * rep.n_score_sup;
  return rep;
}

}  // namespace sparsereg

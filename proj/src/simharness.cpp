#include "sparsereg/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sparsereg/diagnostics.hpp"
#include "sparsereg/errors.hpp"
#include "sparsereg/rng.hpp"

namespace sparsereg {

namespace {

constexpr std::uint64_t kDesignStream = 0xde51ULL;
constexpr std::uint64_t kNoiseStream = 0x4015eULL;
constexpr std::uint64_t kQuantileSeedStream = 0x11aULL;

MatrixXd sigma_cholesky(const SimulationConfig& config) {
  const int p = config.p;
  if (config.design == DesignKind::isotropic) return MatrixXd::Identity(p, p);
  if (!(config.rho >= 0.0 && config.rho < 1.0)) {
    throw DataError("generate_design: rho must lie in [0, 1)");
  }
  MatrixXd sigma(p, p);
  for (int j = 0; j < p; ++j) {
    for (int k = 0; k < p; ++k) {
      if (j == k) {
        sigma(j, k) = 1.0;
      } else if (config.design == DesignKind::toeplitz) {
        sigma(j, k) = std::pow(config.rho, std::abs(j - k));
      } else {
        sigma(j, k) = config.rho;
      }
    }
  }
  Eigen::LLT<MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw DataError("generate_design: covariance not PD");
  return llt.matrixL();
}

RegressionProblem generate_with_chol(const SimulationConfig& config, const MatrixXd& chol_l,
                                     double c_value, std::uint64_t rep_seed) {
  const int n = config.n;
  const int p = config.p;
  MatrixXd z(n, p);
  {
    Rng rng(mix_seed(rep_seed, kDesignStream));
    VectorXd g(p);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) g[j] = rng.normal();
      if (config.design == DesignKind::isotropic) {
        z.row(i) = g.transpose();
      } else {
        z.row(i) = (chol_l * g).transpose();
      }
    }
  }
  const VectorXd theta0 = model_coefficients(config, c_value);
  const VectorXd f = z * theta0;
  VectorXd y = f;
  {
    Rng rng(mix_seed(rep_seed, kNoiseStream));
    for (int i = 0; i < n; ++i) y[i] += config.sigma * rng.normal();
  }
  return RegressionProblem::from_raw(std::move(z), std::move(y), theta0, f, config.sigma);
}

struct SweepPlan {
  int n_est = 0;
  int n_c = 0;
  int reps = 0;
  std::size_t index(int c_idx, int rep, int est_idx) const {
    return (static_cast<std::size_t>(c_idx) * reps + rep) * n_est + est_idx;
  }
};

void run_one_replication(const SimulationConfig& config, const MatrixXd& chol_l,
                         int c_idx, int rep, std::vector<MetricsRecord>& records,
                         const SweepPlan& plan) {
  const double c_value = config.c_grid[c_idx];
  const std::uint64_t rep_seed = replication_seed(config, c_idx, rep);

  auto record_at = [&](int est_idx) -> MetricsRecord& {
    return records[plan.index(c_idx, rep, est_idx)];
  };
  for (int e = 0; e < plan.n_est; ++e) {
    MetricsRecord& rec = record_at(e);
    rec.estimator = config.estimators[e];
    rec.c_value = c_value;
    rec.replication = rep;
  }

  try {
    const RegressionProblem prob = generate_with_chol(config, chol_l, c_value, rep_seed);
    const VectorXd theta0 = model_coefficients(config, c_value);

    PenaltyOptions popt = config.penalty;
    popt.seed = mix_seed(rep_seed, kQuantileSeedStream);
    const PenaltyCalibration cal =
        config.fixed_sigma ? calibrate_known_sigma(prob, config.sigma, popt)
                           : estimate_sigma(prob, popt, config.lasso);

    const LassoFit fit = fit_lasso(prob, cal.lambda_final, config.lasso);
    const ConditionVReport vrep = condition_v_report(cal, prob);

    std::optional<BoundFlags> bound_flags;
    if (config.diagnostics) {
      const OracleSolution oracle = solve_oracle(prob, config.k_max);
      const DesignConstants rse = restricted_sparse_eigenvalues(
          prob.x, oracle.support, static_cast<int>(fit.support.size()));
      const double c_bar = (cal.c + 1.0) / (cal.c - 1.0);
      REResult re1, re2;
      if (!oracle.support.empty()) {
        re1 = restricted_eigenvalue(prob.x, oracle.support, c_bar);
        re2 = restricted_eigenvalue(prob.x, oracle.support, 2.0 * c_bar);
      }
      const BoundReport brep = certify_bounds(prob, fit, cal.c, oracle, rse, re1.kappa,
                                              re2.kappa, re1.certified && re2.certified);
      BoundFlags flags;
      flags.pred_ok = brep.pred.status == CheckStatus::holds;
      flags.l1_ok = brep.l1.status != CheckStatus::failed;
      flags.lower_ok = brep.lower.status == CheckStatus::holds;
      flags.presparsity_ok = brep.presparsity.status == CheckStatus::holds;
      flags.cn_zero_ok = !brep.subset || std::abs(brep.c_n) <= 1e-12;
      bound_flags = flags;
    }

    for (int e = 0; e < plan.n_est; ++e) {
      MetricsRecord& rec = record_at(e);
      try {
        VectorXd beta;
        switch (rec.estimator) {
          case Estimator::lasso:
            beta = fit.beta;
            break;
          case Estimator::post_lasso:
            beta = post_lasso(prob, fit).beta;
            break;
          case Estimator::post_fitness:
            beta = post_fitness(prob, fit).beta;
            break;
          case Estimator::post_traditional:
            beta = post_traditional(prob, fit, config.c_tilde).beta;
            break;
        }
        rec.n_selected = static_cast<int>((beta.array() != 0.0).count());
        rec.coef_error = prob.to_original_scale(beta) - theta0;
        rec.empirical_risk =
            (prob.truth->f - prob.x * beta).squaredNorm() / static_cast<double>(prob.n());
        rec.event_lambda = vrep.event_held;
        rec.sigma_hat = cal.sigma_iterates.back();
        rec.lambda = cal.lambda_final;
        rec.bound_flags = bound_flags;
      } catch (const std::exception& ex) {
        rec.error_flag = true;
        rec.error_msg = ex.what();
      }
    }
  } catch (const std::exception& ex) {
    for (int e = 0; e < plan.n_est; ++e) {
      MetricsRecord& rec = record_at(e);
      rec.error_flag = true;
      rec.error_msg = ex.what();
    }
  }
}

void check_sweep_config(const SimulationConfig& config) {
  if (config.c_grid.empty()) throw DataError("run_sweep: empty c_grid");
  if (config.estimators.empty()) throw DataError("run_sweep: no estimators requested");
  if (config.replications < 1) throw DataError("run_sweep: replications must be >= 1");
  if (config.diagnostics && config.p > 25) {
    throw DataError("run_sweep: per-replication diagnostics need p <= 25");
  }
}

}  // namespace

std::string design_name(DesignKind d) {
  switch (d) {
    case DesignKind::isotropic: return "isotropic";
    case DesignKind::toeplitz: return "toeplitz";
    case DesignKind::equicorrelated: return "equicorrelated";
  }
  return "?";
}

std::string model_name(ModelKind m) {
  return m == ModelKind::parametric ? "parametric" : "nonparametric";
}

std::string estimator_name(Estimator e) {
  switch (e) {
    case Estimator::lasso: return "lasso";
    case Estimator::post_lasso: return "post_lasso";
    case Estimator::post_fitness: return "post_fitness";
    case Estimator::post_traditional: return "post_traditional";
  }
  return "?";
}

DesignKind parse_design(const std::string& name) {
  if (name == "isotropic") return DesignKind::isotropic;
  if (name == "toeplitz") return DesignKind::toeplitz;
  if (name == "equicorrelated") return DesignKind::equicorrelated;
  throw DataError("unknown design: " + name);
}

ModelKind parse_model(const std::string& name) {
  if (name == "parametric") return ModelKind::parametric;
  if (name == "nonparametric") return ModelKind::nonparametric;
  throw DataError("unknown model: " + name);
}

Estimator parse_estimator(const std::string& name) {
  if (name == "lasso") return Estimator::lasso;
  if (name == "post_lasso") return Estimator::post_lasso;
  if (name == "post_fitness") return Estimator::post_fitness;
  if (name == "post_traditional") return Estimator::post_traditional;
  throw DataError("unknown estimator: " + name);
}

SimulationConfig preset_paper() {
  SimulationConfig cfg;
  cfg.n = 100;
  cfg.p = 500;
  cfg.sigma = 1.0;
  cfg.replications = 1000;
  cfg.design = DesignKind::equicorrelated;
  cfg.rho = 0.5;
  cfg.model = ModelKind::parametric;
  cfg.s_true = 5;
  cfg.c_grid = {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  cfg.estimators = {Estimator::lasso, Estimator::post_lasso, Estimator::post_fitness,
                    Estimator::post_traditional};
  return cfg;
}

SimulationConfig preset_desk() {
  SimulationConfig cfg = preset_paper();
  cfg.p = 100;
  cfg.replications = 200;
  cfg.c_grid = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
  cfg.scale_note = "desk scale: p=100, 200 replications (paper: p=500, 1000)";
  return cfg;
}

VectorXd model_coefficients(const SimulationConfig& config, double c_value) {
  VectorXd theta = VectorXd::Zero(config.p);
  if (config.model == ModelKind::parametric) {
    if (config.s_true < 0 || config.s_true > config.p) {
      throw DataError("model_coefficients: s_true out of range");
    }
    for (int j = 0; j < config.s_true; ++j) theta[j] = c_value;
  } else {
    for (int j = 0; j < config.p; ++j) theta[j] = c_value / static_cast<double>(j + 1);
  }
  return theta;
}

RegressionProblem generate_design(const SimulationConfig& config, double c_value,
                                  std::uint64_t rep_seed) {
  return generate_with_chol(config, sigma_cholesky(config), c_value, rep_seed);
}

std::uint64_t replication_seed(const SimulationConfig& config, int c_index,
                               int replication) {
  return mix_seed(config.seed, static_cast<std::uint64_t>(c_index),
                  static_cast<std::uint64_t>(replication));
}

std::vector<MetricsRecord> run_sweep(const SimulationConfig& config) {
  check_sweep_config(config);
  const MatrixXd chol_l = sigma_cholesky(config);
  SweepPlan plan{static_cast<int>(config.estimators.size()),
                 static_cast<int>(config.c_grid.size()), config.replications};
  std::vector<MetricsRecord> records(static_cast<std::size_t>(plan.n_est) * plan.n_c *
                                     plan.reps);
#pragma omp parallel for collapse(2) schedule(dynamic)
  for (int c_idx = 0; c_idx < plan.n_c; ++c_idx) {
    for (int rep = 0; rep < plan.reps; ++rep) {
      run_one_replication(config, chol_l, c_idx, rep, records, plan);
    }
  }
  return records;
}

std::vector<MetricsRecord> run_sweep_serial(const SimulationConfig& config) {
  check_sweep_config(config);
  const MatrixXd chol_l = sigma_cholesky(config);
  SweepPlan plan{static_cast<int>(config.estimators.size()),
                 static_cast<int>(config.c_grid.size()), config.replications};
  std::vector<MetricsRecord> records(static_cast<std::size_t>(plan.n_est) * plan.n_c *
                                     plan.reps);
  for (int c_idx = 0; c_idx < plan.n_c; ++c_idx) {
    for (int rep = 0; rep < plan.reps; ++rep) {
      run_one_replication(config, chol_l, c_idx, rep, records, plan);
    }
  }
  return records;
}

std::vector<AggregateRow> aggregate(const std::vector<MetricsRecord>& records) {
  if (records.empty()) throw DataError("aggregate: no records");

  // Group keys in first-appearance order; records arrive sorted by
  // (C, replication, estimator), so this reproduces (estimator, C) blocks
  // deterministically.
  std::vector<std::pair<Estimator, double>> keys;
  for (const auto& rec : records) {
    const std::pair<Estimator, double> key{rec.estimator, rec.c_value};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return static_cast<int>(a.first) < static_cast<int>(b.first);
    return a.second < b.second;
  });

  std::vector<AggregateRow> rows;
  for (const auto& [est, c_value] : keys) {
    AggregateRow row;
    row.estimator = est;
    row.c_value = c_value;
    VectorXd err_sum;
    double sel = 0.0, risk = 0.0, events = 0.0;
    for (const auto& rec : records) {
      if (rec.estimator != est || rec.c_value != c_value) continue;
      if (rec.error_flag) {
        ++row.errors;
        continue;
      }
      ++row.records;
      sel += rec.n_selected;
      risk += rec.empirical_risk;
      events += rec.event_lambda ? 1.0 : 0.0;
      if (err_sum.size() == 0) {
        err_sum = rec.coef_error;
      } else {
        err_sum += rec.coef_error;
      }
    }
    if (row.records > 0) {
      const double m = static_cast<double>(row.records);
      row.mean_n_selected = sel / m;
      row.mean_empirical_risk = risk / m;
      row.event_freq = events / m;
      row.bias_norm = (err_sum / m).norm();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string records_csv(const std::vector<MetricsRecord>& records) {
  std::string out =
      "estimator,c,replication,n_selected,empirical_risk,coef_error_norm,"
      "event_lambda,sigma_hat,lambda,bounds_ok,error\n";
  for (const auto& rec : records) {
    out += estimator_name(rec.estimator);
    out += ',';
    out += fmt(rec.c_value);
    out += ',';
    out += std::to_string(rec.replication);
    if (rec.error_flag) {
      std::string msg = rec.error_msg;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out += ",,,,,,,,\"" + msg + "\"\n";
    } else {
      out += ',' + std::to_string(rec.n_selected);
      out += ',' + fmt(rec.empirical_risk);
      out += ',' + fmt(rec.coef_error.norm());
      out += ',' + std::string(rec.event_lambda ? "1" : "0");
      out += ',' + fmt(rec.sigma_hat);
      out += ',' + fmt(rec.lambda);
      out += ',';
      if (rec.bound_flags.has_value()) out += rec.bound_flags->all_ok() ? "1" : "0";
      out += ",\n";
    }
  }
  return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string out =
      "estimator,c,records,errors,mean_n_selected,bias_norm,"
      "mean_empirical_risk,event_freq\n";
  for (const auto& row : rows) {
    out += estimator_name(row.estimator);
    out += ',' + fmt(row.c_value);
    out += ',' + std::to_string(row.records);
    out += ',' + std::to_string(row.errors);
    out += ',' + fmt(row.mean_n_selected);
    out += ',' + fmt(row.bias_norm);
    out += ',' + fmt(row.mean_empirical_risk);
    out += ',' + fmt(row.event_freq) + '\n';
  }
  return out;
}

}  // namespace sparsereg

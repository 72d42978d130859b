#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsereg/core.hpp"
#include "sparsereg/penalty.hpp"
#include "sparsereg/postselect.hpp"

namespace sparsereg {

enum class DesignKind { isotropic, toeplitz, equicorrelated };
enum class ModelKind { parametric, nonparametric };
enum class Estimator { lasso, post_lasso, post_fitness, post_traditional };

std::string design_name(DesignKind d);
std::string model_name(ModelKind m);
std::string estimator_name(Estimator e);
DesignKind parse_design(const std::string& name);
ModelKind parse_model(const std::string& name);
Estimator parse_estimator(const std::string& name);

struct SimulationConfig {
  int n = 100;
  int p = 500;
  double sigma = 1.0;
  int replications = 1000;
  std::uint64_t seed = 1;
  DesignKind design = DesignKind::equicorrelated;
  double rho = 0.5;
  ModelKind model = ModelKind::parametric;
  int s_true = 5;
  std::vector<double> c_grid;
  std::vector<Estimator> estimators;
  PenaltyOptions penalty;
  LassoOptions lasso;
  double c_tilde = 1.0;        // traditional threshold constant
  bool fixed_sigma = false;    // use the true sigma instead of the iterated estimate
  bool diagnostics = false;    // certify the finite-sample bounds per replication (p <= 25)
  int k_max = 6;               // oracle enumeration depth in diagnostics mode
  std::string scale_note;      // deviation from paper scale, recorded in outputs
};

// Paper-scale study: n=100, p=500, sigma^2=1, 1000 replications,
// parametric s_true=5, C in [0, 2].
SimulationConfig preset_paper();
// Desk-scale variant: p=100, 200 replications, C in {0.25,...,2.0}.
SimulationConfig preset_desk();

// Deterministic bound checks for one replication, attached when the sweep
// runs with diagnostics enabled. l1_ok counts inconclusive as acceptable
// (non-certified restricted-eigenvalue search).
struct BoundFlags {
  bool pred_ok = false;
  bool l1_ok = false;
  bool lower_ok = false;
  bool presparsity_ok = false;
  bool cn_zero_ok = false;
  bool all_ok() const { return pred_ok && l1_ok && lower_ok && presparsity_ok && cn_zero_ok; }
};

struct MetricsRecord {
  Estimator estimator = Estimator::lasso;
  double c_value = 0.0;
  int replication = 0;
  int n_selected = 0;
  VectorXd coef_error;        // beta-tilde - theta0 on the original scale
  double empirical_risk = 0.0;
  bool event_lambda = false;
  double sigma_hat = 0.0;
  double lambda = 0.0;
  std::optional<BoundFlags> bound_flags;
  bool error_flag = false;
  std::string error_msg;
};

// theta0 on the raw-regressor scale for signal strength C.
VectorXd model_coefficients(const SimulationConfig& config, double c_value);

// One synthetic replication: z_i ~ N(0, Sigma) via Cholesky, f = Z theta0,
// y = f + N(0, sigma^2), columns normalized, ground truth attached.
RegressionProblem generate_design(const SimulationConfig& config, double c_value,
                                  std::uint64_t replication_seed);

// Deterministic per-(C index, replication) stream seed.
std::uint64_t replication_seed(const SimulationConfig& config, int c_index,
                               int replication);

// Full sweep: every (C, replication) generates a design, calibrates lambda,
// fits the requested estimators and records metrics. Estimator errors are
// captured per record without aborting the sweep. Replications run in
// parallel; output is identical for any worker count.
std::vector<MetricsRecord> run_sweep(const SimulationConfig& config);
std::vector<MetricsRecord> run_sweep_serial(const SimulationConfig& config);

struct AggregateRow {
  Estimator estimator = Estimator::lasso;
  double c_value = 0.0;
  int records = 0;
  int errors = 0;
  double mean_n_selected = 0.0;
  double bias_norm = 0.0;        // ||mean coef_error||_2
  double mean_empirical_risk = 0.0;
  double event_freq = 0.0;
};

std::vector<AggregateRow> aggregate(const std::vector<MetricsRecord>& records);

std::string records_csv(const std::vector<MetricsRecord>& records);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);

}  // namespace sparsereg

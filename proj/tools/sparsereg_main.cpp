#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "sparsereg/diagnostics.hpp"
#include "sparsereg/errors.hpp"
#include "sparsereg/io.hpp"
#include "sparsereg/lasso.hpp"
#include "sparsereg/penalty.hpp"
#include "sparsereg/postselect.hpp"
#include "sparsereg/rng.hpp"
#include "sparsereg/simharness.hpp"

namespace {

using namespace sparsereg;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitConvergence = 4;
constexpr int kExitBudget = 5;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void apply_threads(int threads) {
#ifdef _OPENMP
  if (threads <= 0) {
    if (const char* env = std::getenv("SPARSEREG_THREADS")) {
      threads = std::atoi(env);
    }
  }
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    atomic_write_text(out_path, content);
  }
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

// ---- fit ----------------------------------------------------------------

struct FitArgs {
  std::string data_path;
  int response_col = 0;
  double lambda = 0.0;  // 0 means calibrate
  std::string scheme = "plain";
  double c_tilde = 1.0;
  std::string gamma = "auto";
  bool exact = false;
  PenaltyOptions penalty;
  std::string out_path;
  int threads = 0;
};

int run_fit(const FitArgs& args) {
  apply_threads(args.threads);
  const MatrixXd table = read_delimited_matrix(args.data_path);
  const RegressionProblem prob = problem_from_table(table, args.response_col);

  std::string report;
  report += "# sparsereg fit\n";
  report += "data: " + args.data_path + "\n";
  report += "n: " + std::to_string(prob.n()) + "\n";
  report += "p: " + std::to_string(prob.p()) + "\n";

  double lambda = args.lambda;
  if (lambda > 0.0) {
    report += "lambda_source: given\n";
  } else {
    const PenaltyCalibration cal = estimate_sigma(prob, args.penalty);
    lambda = cal.lambda_final;
    report += "lambda_source: calibrated\n";
    report += "alpha: " + fmt(cal.alpha) + "\n";
    report += "c: " + fmt(cal.c) + "\nc_prime: " + fmt(cal.c_prime) + "\n";
    report += "lambda_quantile: " + fmt(cal.lambda_quantile) + "\n";
    report += "sigma_iterates:";
    for (double s : cal.sigma_iterates) report += " " + fmt(s);
    report += "\n";
  }
  report += "lambda: " + fmt(lambda) + "\n";

  const LassoFit fit = fit_lasso(prob, lambda);
  report += "lasso_objective: " + fmt(fit.objective) + "\n";
  report += "lasso_support_size: " + std::to_string(fit.support.size()) + "\n";

  PostSelectionFit ps;
  if (args.scheme == "plain") {
    ps = post_lasso(prob, fit);
  } else if (args.scheme == "traditional") {
    ps = post_traditional(prob, fit, args.c_tilde);
  } else if (args.scheme == "fitness") {
    std::optional<double> gamma;
    if (args.gamma != "auto") gamma = std::stod(args.gamma);
    ps = post_fitness(prob, fit, gamma, {.exact = args.exact});
  } else {
    throw CLI::ValidationError("--scheme", "unknown scheme: " + args.scheme);
  }

  report += "scheme: " + scheme_name(ps.scheme) + "\n";
  report += "threshold_t: " + fmt(ps.threshold_t) + "\n";
  if (ps.gamma.has_value()) report += "gamma: " + fmt(*ps.gamma) + "\n";
  report += "ols_solves: " + std::to_string(ps.ols_solves) + "\n";
  report += "refit_objective: " + fmt(ps.objective) + "\n";
  report += "selected_columns:";
  for (int j : ps.selected) report += " " + std::to_string(j + 1);
  report += "\n";
  report += "coefficients_original_scale:\n";
  report += "column lasso refit\n";
  const VectorXd lasso_orig = prob.to_original_scale(fit.beta);
  const VectorXd refit_orig = prob.to_original_scale(ps.beta);
  for (int j = 0; j < prob.p(); ++j) {
    if (lasso_orig[j] == 0.0 && refit_orig[j] == 0.0) continue;
    report += std::to_string(j + 1) + " " + fmt(lasso_orig[j]) + " " + fmt(refit_orig[j]) + "\n";
  }
  emit(args.out_path, report);
  return kExitOk;
}

// ---- simulate -----------------------------------------------------------

struct SimulateArgs {
  std::string preset;
  std::string config_path;
  std::string records_out;
  std::string aggregate_out;
  bool strict = false;
  int threads = 0;
};

void apply_config_line(SimulationConfig& cfg, const std::string& key,
                       const std::string& value) {
  if (key == "n") cfg.n = std::stoi(value);
  else if (key == "p") cfg.p = std::stoi(value);
  else if (key == "sigma") cfg.sigma = std::stod(value);
  else if (key == "replications") cfg.replications = std::stoi(value);
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "design") cfg.design = parse_design(value);
  else if (key == "rho") cfg.rho = std::stod(value);
  else if (key == "model") cfg.model = parse_model(value);
  else if (key == "s_true") cfg.s_true = std::stoi(value);
  else if (key == "c_tilde") cfg.c_tilde = std::stod(value);
  else if (key == "fixed_sigma") cfg.fixed_sigma = value == "1" || value == "true";
  else if (key == "diagnostics") cfg.diagnostics = value == "1" || value == "true";
  else if (key == "k_max") cfg.k_max = std::stoi(value);
  else if (key == "alpha") cfg.penalty.alpha = std::stod(value);
  else if (key == "c") cfg.penalty.c = std::stod(value);
  else if (key == "c_prime") cfg.penalty.c_prime = std::stod(value);
  else if (key == "mc_draws") cfg.penalty.mc_draws = std::stoi(value);
  else if (key == "max_refits") cfg.penalty.max_refits = std::stoi(value);
  else if (key == "c_grid") {
    cfg.c_grid = parse_double_list(value);
  } else if (key == "estimators") {
    cfg.estimators.clear();
    std::stringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ',')) cfg.estimators.push_back(parse_estimator(tok));
  } else {
    throw DataError("config: unknown key '" + key + "'");
  }
}

void load_config_file(SimulationConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::istringstream chk(line);
      std::string leftover;
      if (chk >> leftover) {
        throw DataError(path + ":" + std::to_string(line_no) + ": expected key=value");
      }
      continue;
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    apply_config_line(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

int run_simulate(const SimulateArgs& args, SimulationConfig cfg) {
  apply_threads(args.threads);
  const auto records = run_sweep(cfg);
  const auto rows = aggregate(records);
  atomic_write_set({{args.records_out, records_csv(records)},
                    {args.aggregate_out, aggregate_csv(rows)}});

  int errors = 0;
  for (const auto& rec : records)
    if (rec.error_flag) ++errors;
  std::cout << "records: " << records.size() << "\nerrors: " << errors << "\n";
  if (!cfg.scale_note.empty()) std::cout << "scale_note: " << cfg.scale_note << "\n";
  if (errors > 0 && args.strict) {
    std::cerr << "simulate: " << errors << " records carry error markers (--strict)\n";
    return kExitData;
  }
  return kExitOk;
}

// ---- diagnose -----------------------------------------------------------

struct DiagnoseArgs {
  std::string data_path;
  std::vector<int> support;  // 1-based, for data mode
  int n = 100, p = 8, s_true = 2;
  std::string design = "isotropic";
  double rho = 0.5;
  std::string model = "parametric";
  double c_value = 1.5;
  double sigma = 1.0;
  std::uint64_t seed = 1;
  int k_max = 6;
  int m_max = 3;
  bool exact_re = false;
  bool heuristic = false;
  bool estimate_sigma_flag = false;
  double lambda = 0.0;
  PenaltyOptions penalty;
  std::string out_path;
  int threads = 0;
};

std::string check_line(const char* name, const BoundCheck& chk) {
  std::string out = std::string(name) + ": lhs " + fmt(chk.lhs) + " rhs " + fmt(chk.rhs) + " ";
  switch (chk.status) {
    case CheckStatus::holds: out += "HOLDS"; break;
    case CheckStatus::failed: out += "FAILED"; break;
    case CheckStatus::inconclusive: out += "INCONCLUSIVE"; break;
  }
  return out + "\n";
}

int run_diagnose(const DiagnoseArgs& args) {
  apply_threads(args.threads);
  std::string report = "# sparsereg diagnose\n";

  if (!args.data_path.empty()) {
    // data mode: design constants only (no ground truth available)
    const MatrixXd table = read_delimited_matrix(args.data_path);
    const RegressionProblem prob = problem_from_table(table, 0);
    report += "mode: data\nn: " + std::to_string(prob.n()) + "\np: " +
              std::to_string(prob.p()) + "\n";
    std::vector<int> sup;
    if (!args.support.empty()) {
      for (int j : args.support) sup.push_back(j - 1);
    } else {
      const PenaltyCalibration cal = estimate_sigma(prob, args.penalty);
      const LassoFit fit = fit_lasso(prob, cal.lambda_final);
      sup = fit.support;
      report += "support_source: lasso (lambda " + fmt(cal.lambda_final) + ")\n";
    }
    report += "support:";
    for (int j : sup) report += " " + std::to_string(j + 1);
    report += "\n";
    const double c_bar = (args.penalty.c + 1.0) / (args.penalty.c - 1.0);
    REOptions reopt;
    reopt.grid = args.exact_re || prob.p() <= 10;
    if (!sup.empty()) {
      const REResult re1 = restricted_eigenvalue(prob.x, sup, c_bar, reopt);
      report += "kappa(" + fmt(c_bar) + "): " + fmt(re1.kappa) +
                (re1.certified ? " certified" : " search") + "\n";
    }
    const DesignConstants rse = restricted_sparse_eigenvalues(prob.x, sup, args.m_max);
    report += "m phi kappa_tilde mu\n";
    for (std::size_t m = 0; m < rse.phi.size(); ++m) {
      report += std::to_string(m) + " " + fmt(rse.phi[m]) + " " + fmt(rse.kappa_tilde[m]) +
                " " + fmt(rse.mu[m]) + "\n";
    }
    emit(args.out_path, report);
    return kExitOk;
  }

  // synthetic mode: full report
  SimulationConfig cfg;
  cfg.n = args.n;
  cfg.p = args.p;
  cfg.sigma = args.sigma;
  cfg.design = parse_design(args.design);
  cfg.rho = args.rho;
  cfg.model = parse_model(args.model);
  cfg.s_true = args.s_true;
  cfg.penalty = args.penalty;

  const RegressionProblem prob = generate_design(cfg, args.c_value, args.seed);
  report += "mode: synthetic\nn: " + std::to_string(cfg.n) + "\np: " +
            std::to_string(cfg.p) + "\ndesign: " + args.design + "\nmodel: " + args.model +
            "\nC: " + fmt(args.c_value) + "\nsigma: " + fmt(cfg.sigma) + "\nseed: " +
            std::to_string(args.seed) + "\n";

  // oracle program
  OracleSolution oracle;
  if (args.heuristic) {
    oracle = solve_oracle_nested(prob, args.k_max);
  } else {
    oracle = solve_oracle(prob, args.k_max);  // BudgetError -> exit 5
  }
  report += "\n[oracle]\n";
  report += std::string("heuristic: ") + (oracle.heuristic ? "yes" : "no") + "\n";
  report += "s: " + std::to_string(oracle.s) + "\nsupport:";
  for (int j : oracle.support) report += " " + std::to_string(j + 1);
  report += "\nc_s: " + fmt(oracle.c_s) + "\nrisk: " + fmt(oracle.risk) + "\n";
  report += "k c_k_squared\n";
  for (const auto& [k, c2] : oracle.c_k_curve)
    report += std::to_string(k) + " " + fmt(c2) + "\n";

  // penalty
  PenaltyOptions popt = args.penalty;
  popt.seed = mix_seed(args.seed, 0x11aULL);
  const PenaltyCalibration cal = args.estimate_sigma_flag
                                     ? estimate_sigma(prob, popt)
                                     : calibrate_known_sigma(prob, cfg.sigma, popt);
  const double lambda = args.lambda > 0.0 ? args.lambda : cal.lambda_final;
  report += "\n[penalty]\nlambda_quantile: " + fmt(cal.lambda_quantile) +
            "\nlambda: " + fmt(lambda) + "\nsigma_hat: " + fmt(cal.sigma_iterates.back()) +
            "\n";

  const LassoFit fit = fit_lasso(prob, lambda);
  report += "\n[lasso]\nsupport_size: " + std::to_string(fit.support.size()) +
            "\nobjective: " + fmt(fit.objective) + "\n";

  // design constants
  const double c_bar = (popt.c + 1.0) / (popt.c - 1.0);
  REOptions reopt;
  reopt.grid = args.exact_re || prob.p() <= 10;
  REResult re1, re2;
  if (!oracle.support.empty()) {
    re1 = restricted_eigenvalue(prob.x, oracle.support, c_bar, reopt);
    re2 = restricted_eigenvalue(prob.x, oracle.support, 2.0 * c_bar, reopt);
  }
  const int m_needed = std::max(args.m_max, static_cast<int>(fit.support.size()));
  const DesignConstants rse =
      restricted_sparse_eigenvalues(prob.x, oracle.support, m_needed);
  report += "\n[design_constants]\n";
  report += "kappa(" + fmt(c_bar) + "): " + fmt(re1.kappa) +
            (re1.certified ? " certified" : " search") + "\n";
  report += "kappa(" + fmt(2.0 * c_bar) + "): " + fmt(re2.kappa) +
            (re2.certified ? " certified" : " search") + "\n";
  report += "m phi kappa_tilde mu\n";
  for (int m = 0; m <= args.m_max && m < static_cast<int>(rse.phi.size()); ++m) {
    report += std::to_string(m) + " " + fmt(rse.phi[m]) + " " + fmt(rse.kappa_tilde[m]) +
              " " + fmt(rse.mu[m]) + "\n";
  }

  // bound certification
  const BoundReport brep = certify_bounds(prob, fit, popt.c, oracle, rse, re1.kappa,
                                          re2.kappa, re1.certified && re2.certified);
  report += "\n[bounds]\n";
  report += std::string("event_lambda: ") + (brep.event_lambda ? "yes" : "no") + "\n";
  report += "m_hat: " + std::to_string(brep.m_hat) + "\n";
  report += check_line("prediction_bound", brep.pred);
  report += check_line("l1_bound", brep.l1);
  report += check_line("lower_bound", brep.lower);
  report += check_line("presparsity", brep.presparsity);
  report += "zeta: " + fmt(brep.zeta) + "\n";
  report += "B_n: " + fmt(brep.b_n) + "\nC_n: " + fmt(brep.c_n) + "\n";
  report += std::string("T_subset_of_That: ") + (brep.subset ? "yes" : "no") + "\n";
  report += std::string("perfect_selection: ") + (brep.exact_selection ? "yes" : "no") + "\n";
  report += std::string("kkt_certificate: ") + (brep.kkt_certificate ? "yes" : "no") + "\n";

  emit(args.out_path, report);
  return kExitOk;
}

void add_penalty_flags(CLI::App* cmd, PenaltyOptions& popt, bool with_seed = true) {
  cmd->add_option("--alpha", popt.alpha, "quantile tail level (default 0.05)");
  cmd->add_option("--c", popt.c, "score domination constant c > 1 (default 1.1)");
  cmd->add_option("--c-prime", popt.c_prime, "penalty constant c' > c (default 1.21)");
  cmd->add_option("--mc-draws", popt.mc_draws, "Monte Carlo draws for the quantile (default 1000)");
  if (with_seed) cmd->add_option("--seed", popt.seed, "seed for the quantile simulation");
  cmd->add_option("--max-refits", popt.max_refits, "sigma-estimation refits (default 3)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse regression with data-driven penalty and post-selection OLS"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "fit one data set and report the model");
  fit_cmd->add_option("--data", fit_args.data_path, "delimited data file")->required();
  fit_cmd->add_option("--response-col", fit_args.response_col,
                      "1-based response column (default: last)");
  fit_cmd->add_option("--lambda", fit_args.lambda, "fixed penalty (skips calibration)");
  fit_cmd->add_option("--scheme", fit_args.scheme, "plain | traditional | fitness")
      ->check(CLI::IsMember({"plain", "traditional", "fitness"}));
  fit_cmd->add_option("--c-tilde", fit_args.c_tilde, "traditional threshold constant (>= 1)");
  fit_cmd->add_option("--gamma", fit_args.gamma, "fitness budget: auto or a nonpositive value");
  fit_cmd->add_flag("--exact", fit_args.exact, "exhaustive fitness scan (|T-hat| <= 64)");
  fit_cmd->add_option("--out", fit_args.out_path, "report path (default: stdout)");
  fit_cmd->add_option("--threads", fit_args.threads, "worker cap (or SPARSEREG_THREADS)");
  add_penalty_flags(fit_cmd, fit_args.penalty);

  SimulateArgs sim_args;
  SimulationConfig sim_cfg = preset_paper();
  sim_cfg.c_grid = {0.5};
  sim_cfg.replications = 10;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimator sweep");
  sim_cmd->add_option("--preset", sim_args.preset, "paper | desk")
      ->check(CLI::IsMember({"paper", "desk"}));
  sim_cmd->add_option("--config", sim_args.config_path, "key=value config file");
  sim_cmd->add_option("--n", sim_cfg.n, "sample size");
  sim_cmd->add_option("--p", sim_cfg.p, "number of regressors");
  sim_cmd->add_option("--sigma", sim_cfg.sigma, "noise standard deviation");
  sim_cmd->add_option("--replications", sim_cfg.replications, "replications per C");
  sim_cmd->add_option("--seed", sim_cfg.seed, "master seed");
  std::string design_str, model_str, c_grid_str, estimators_str;
  sim_cmd->add_option("--design", design_str, "isotropic | toeplitz | equicorrelated")
      ->check(CLI::IsMember({"isotropic", "toeplitz", "equicorrelated"}));
  sim_cmd->add_option("--rho", sim_cfg.rho, "correlation parameter");
  sim_cmd->add_option("--model", model_str, "parametric | nonparametric")
      ->check(CLI::IsMember({"parametric", "nonparametric"}));
  sim_cmd->add_option("--s-true", sim_cfg.s_true, "planted support size (parametric)");
  sim_cmd->add_option("--c-grid", c_grid_str, "comma-separated signal strengths");
  sim_cmd->add_option("--estimators", estimators_str,
                      "comma list of lasso,post_lasso,post_fitness,post_traditional");
  sim_cmd->add_option("--c-tilde", sim_cfg.c_tilde, "traditional threshold constant");
  sim_cmd->add_flag("--fixed-sigma", sim_cfg.fixed_sigma, "use the true sigma in the penalty");
  sim_cmd->add_flag("--diagnostics", sim_cfg.diagnostics,
                    "certify the finite-sample bounds per replication (p <= 25)");
  sim_cmd->add_option("--k-max", sim_cfg.k_max, "oracle depth for --diagnostics (default 6)");
  sim_cmd->add_flag("--strict", sim_args.strict, "nonzero exit if any record errored");
  sim_cmd->add_option("--records-out", sim_args.records_out, "per-record CSV path")->required();
  sim_cmd->add_option("--aggregate-out", sim_args.aggregate_out, "aggregate CSV path")->required();
  sim_cmd->add_option("--threads", sim_args.threads, "worker cap (or SPARSEREG_THREADS)");
  add_penalty_flags(sim_cmd, sim_cfg.penalty, /*with_seed=*/false);

  DiagnoseArgs diag_args;
  auto* diag_cmd = app.add_subcommand("diagnose", "oracle program, design constants, bounds");
  diag_cmd->add_option("--data", diag_args.data_path, "data file (constants-only mode)");
  diag_cmd->add_option("--support", diag_args.support, "1-based support for data mode")
      ->delimiter(',');
  diag_cmd->add_option("--n", diag_args.n, "sample size (synthetic)");
  diag_cmd->add_option("--p", diag_args.p, "regressors (synthetic)");
  diag_cmd->add_option("--design", diag_args.design, "isotropic | toeplitz | equicorrelated")
      ->check(CLI::IsMember({"isotropic", "toeplitz", "equicorrelated"}));
  diag_cmd->add_option("--rho", diag_args.rho, "correlation parameter");
  diag_cmd->add_option("--model", diag_args.model, "parametric | nonparametric")
      ->check(CLI::IsMember({"parametric", "nonparametric"}));
  diag_cmd->add_option("--s-true", diag_args.s_true, "planted support size");
  diag_cmd->add_option("--c-value", diag_args.c_value, "signal strength C");
  diag_cmd->add_option("--sigma", diag_args.sigma, "noise standard deviation");
  diag_cmd->add_option("--instance-seed", diag_args.seed, "instance seed");
  diag_cmd->add_option("--k-max", diag_args.k_max, "oracle enumeration depth (default 6)");
  diag_cmd->add_option("--m-max", diag_args.m_max, "RSE enumeration depth (default 3)");
  diag_cmd->add_flag("--exact-re", diag_args.exact_re, "force the dense-grid RE check");
  diag_cmd->add_flag("--heuristic", diag_args.heuristic, "nested-support oracle (large p)");
  diag_cmd->add_flag("--estimate-sigma", diag_args.estimate_sigma_flag,
                     "use the iterated sigma estimate instead of the true sigma");
  diag_cmd->add_option("--lambda", diag_args.lambda, "fixed penalty (skips calibration)");
  diag_cmd->add_option("--out", diag_args.out_path, "report path (default: stdout)");
  diag_cmd->add_option("--threads", diag_args.threads, "worker cap (or SPARSEREG_THREADS)");
  add_penalty_flags(diag_cmd, diag_args.penalty);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (fit_cmd->parsed()) return run_fit(fit_args);
    if (sim_cmd->parsed()) {
      if (!sim_args.preset.empty()) {
        SimulationConfig base = sim_args.preset == "paper" ? preset_paper() : preset_desk();
        // explicit flags override the preset
        if (!sim_cmd->count("--n")) sim_cfg.n = base.n;
        if (!sim_cmd->count("--p")) sim_cfg.p = base.p;
        if (!sim_cmd->count("--sigma")) sim_cfg.sigma = base.sigma;
        if (!sim_cmd->count("--replications")) sim_cfg.replications = base.replications;
        if (!sim_cmd->count("--rho")) sim_cfg.rho = base.rho;
        if (!sim_cmd->count("--s-true")) sim_cfg.s_true = base.s_true;
        if (!sim_cmd->count("--c-grid")) sim_cfg.c_grid = base.c_grid;
        sim_cfg.design = base.design;
        sim_cfg.model = base.model;
        sim_cfg.estimators = base.estimators;
        sim_cfg.scale_note = base.scale_note;
      }
      if (!sim_args.config_path.empty()) load_config_file(sim_cfg, sim_args.config_path);
      if (sim_cmd->count("--design")) sim_cfg.design = parse_design(design_str);
      if (sim_cmd->count("--model")) sim_cfg.model = parse_model(model_str);
      if (sim_cmd->count("--c-grid")) sim_cfg.c_grid = parse_double_list(c_grid_str);
      if (sim_cmd->count("--estimators")) {
        sim_cfg.estimators.clear();
        std::stringstream ss(estimators_str);
        std::string tok;
        while (std::getline(ss, tok, ',')) sim_cfg.estimators.push_back(parse_estimator(tok));
      }
      if (sim_cfg.estimators.empty()) sim_cfg.estimators = preset_paper().estimators;
      return run_simulate(sim_args, sim_cfg);
    }
    if (diag_cmd->parsed()) return run_diagnose(diag_args);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

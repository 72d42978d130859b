#include "sparsereg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sparsereg/errors.hpp"
#include "sparsereg/rng.hpp"
#include "sparsereg/subsets.hpp"

namespace sparsereg {

namespace {

constexpr std::uint64_t kOracleBudget = 300000;

// c_k^2 for one support via the Gram identity: En[f^2] - h_J' b with
// G_JJ b = h_J. Pseudo-solve keeps rank-deficient supports finite.
double subset_c2(const MatrixXd& gram, const VectorXd& h, double f_msq,
                 const std::vector<int>& subset) {
  const int k = static_cast<int>(subset.size());
  if (k == 0) return f_msq;
  MatrixXd gjj(k, k);
  VectorXd hj(k);
  for (int a = 0; a < k; ++a) {
    hj[a] = h[subset[a]];
    for (int b = 0; b < k; ++b) gjj(a, b) = gram(subset[a], subset[b]);
  }
  const VectorXd coef = gjj.completeOrthogonalDecomposition().solve(hj);
  return std::max(0.0, f_msq - hj.dot(coef));
}

struct BestSubset {
  double c2 = std::numeric_limits<double>::infinity();
  std::uint64_t rank = 0;

  void offer(double c2_cand, std::uint64_t rank_cand) {
    if (c2_cand < c2 || (c2_cand == c2 && rank_cand < rank)) {
      c2 = c2_cand;
      rank = rank_cand;
    }
  }
  void merge(const BestSubset& other) { offer(other.c2, other.rank); }
};

OracleSolution finish_oracle(const RegressionProblem& prob,
                             const std::vector<std::pair<int, double>>& curve,
                             const std::vector<std::vector<int>>& best_support,
                             bool heuristic) {
  const double sigma = prob.truth->sigma;
  const double dn = static_cast<double>(prob.n());

  int s_star = 0;
  double best_risk = std::numeric_limits<double>::infinity();
  for (const auto& [k, c2] : curve) {
    const double risk = c2 + sigma * sigma * static_cast<double>(k) / dn;
    if (risk < best_risk) {
      best_risk = risk;
      s_star = k;
    }
  }

  OracleSolution sol;
  sol.heuristic = heuristic;
  sol.c_k_curve = curve;
  const std::vector<int>& chosen = best_support[s_star];
  VectorXd beta = VectorXd::Zero(prob.p());
  if (!chosen.empty()) {
    MatrixXd xs(prob.n(), chosen.size());
    for (std::size_t a = 0; a < chosen.size(); ++a)
      xs.col(static_cast<Eigen::Index>(a)) = prob.x.col(chosen[a]);
    const VectorXd coef = xs.completeOrthogonalDecomposition().solve(prob.truth->f);
    for (std::size_t a = 0; a < chosen.size(); ++a)
      beta[chosen[a]] = coef[static_cast<Eigen::Index>(a)];
  }
  sol.beta0 = beta;
  for (int j = 0; j < prob.p(); ++j)
    if (beta[j] != 0.0) sol.support.push_back(j);
  sol.s = static_cast<int>(sol.support.size());
  sol.c_s = std::sqrt((prob.truth->f - prob.x * beta).squaredNorm() / dn);
  sol.risk = sol.c_s * sol.c_s + sigma * sigma * static_cast<double>(sol.s) / dn;
  return sol;
}

void check_oracle_pre(const RegressionProblem& prob, int k_max) {
  if (!prob.truth.has_value())
    throw DataError("solve_oracle: ground truth not present");
  if (prob.p() > 25) {
    throw BudgetError("solve_oracle: exhaustive enumeration requires p <= 25; "
                      "use the nested-support heuristic");
  }
  std::uint64_t total = 0;
  for (int k = 0; k <= k_max; ++k) total += binomial(prob.p(), k);
  if (total > kOracleBudget) {
    throw BudgetError("solve_oracle: subset budget exceeded (" + std::to_string(total) +
                      " > " + std::to_string(kOracleBudget) + "); lower k_max");
  }
}

// ---- restricted eigenvalue helpers -------------------------------------

// Euclidean projection onto the probability simplex {u >= 0, sum u = 1}.
VectorXd project_simplex(VectorXd w) {
  const int s = static_cast<int>(w.size());
  std::vector<double> u(w.data(), w.data() + s);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cssv = 0.0;
  double theta = 0.0;
  int rho = 0;
  for (int i = 0; i < s; ++i) {
    cssv += u[i];
    const double t = (cssv - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      rho = i + 1;
      theta = t;
    }
  }
  (void)rho;
  for (int i = 0; i < s; ++i) w[i] = std::max(0.0, w[i] - theta);
  return w;
}

// Euclidean projection onto the l1 ball of given radius.
VectorXd project_l1_ball(VectorXd v, double radius) {
  if (v.cwiseAbs().sum() <= radius) return v;
  const int q = static_cast<int>(v.size());
  std::vector<double> u(q);
  for (int i = 0; i < q; ++i) u[i] = std::abs(v[i]);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cssv = 0.0;
  double theta = 0.0;
  for (int i = 0; i < q; ++i) {
    cssv += u[i];
    const double t = (cssv - radius) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  for (int i = 0; i < q; ++i) {
    const double mag = std::max(0.0, std::abs(v[i]) - theta);
    v[i] = v[i] >= 0.0 ? mag : -mag;
  }
  return v;
}

}  // namespace

OracleSolution solve_oracle(const RegressionProblem& prob, int k_max) {
  check_oracle_pre(prob, k_max);
  const int p = prob.p();
  const double dn = static_cast<double>(prob.n());
  const MatrixXd gram = prob.x.transpose() * prob.x / dn;
  const VectorXd h = prob.x.transpose() * prob.truth->f / dn;
  const double f_msq = prob.truth->f.squaredNorm() / dn;

  std::vector<std::pair<int, double>> curve;
  std::vector<std::vector<int>> best_support(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    const std::uint64_t count = binomial(p, k);
    BestSubset best;
    if (k == 0) {
      best.offer(f_msq, 0);
    } else {
#pragma omp parallel
      {
        BestSubset local;
#ifdef _OPENMP
        const int nt = omp_get_num_threads();
        const int tid = omp_get_thread_num();
#else
        const int nt = 1;
        const int tid = 0;
#endif
        const std::uint64_t chunk = (count + nt - 1) / nt;
        const std::uint64_t lo = std::min<std::uint64_t>(chunk * tid, count);
        const std::uint64_t hi = std::min<std::uint64_t>(lo + chunk, count);
        if (lo < hi) {
          std::vector<int> subset = unrank_combination(lo, k, p);
          for (std::uint64_t r = lo; r < hi; ++r) {
            local.offer(subset_c2(gram, h, f_msq, subset), r);
            if (r + 1 < hi) next_combination(subset, p);
          }
        }
#pragma omp critical
        best.merge(local);
      }
    }
    curve.emplace_back(k, best.c2);
    best_support[k] = unrank_combination(best.rank, k, p);
  }
  return finish_oracle(prob, curve, best_support, false);
}

OracleSolution solve_oracle_serial(const RegressionProblem& prob, int k_max) {
  check_oracle_pre(prob, k_max);
  const int p = prob.p();
  const double dn = static_cast<double>(prob.n());
  const MatrixXd gram = prob.x.transpose() * prob.x / dn;
  const VectorXd h = prob.x.transpose() * prob.truth->f / dn;
  const double f_msq = prob.truth->f.squaredNorm() / dn;

  std::vector<std::pair<int, double>> curve;
  std::vector<std::vector<int>> best_support(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    BestSubset best;
    if (k == 0) {
      best.offer(f_msq, 0);
    } else {
      std::vector<int> subset(k);
      for (int i = 0; i < k; ++i) subset[i] = i;
      std::uint64_t r = 0;
      do {
        best.offer(subset_c2(gram, h, f_msq, subset), r++);
      } while (next_combination(subset, p));
    }
    curve.emplace_back(k, best.c2);
    best_support[k] = unrank_combination(best.rank, k, p);
  }
  return finish_oracle(prob, curve, best_support, false);
}

OracleSolution solve_oracle_nested(const RegressionProblem& prob, int k_max) {
  if (!prob.truth.has_value())
    throw DataError("solve_oracle_nested: ground truth not present");
  const int p = prob.p();
  k_max = std::min(k_max, std::min(p, prob.n()));
  const double dn = static_cast<double>(prob.n());
  const MatrixXd gram = prob.x.transpose() * prob.x / dn;
  const VectorXd h = prob.x.transpose() * prob.truth->f / dn;
  const double f_msq = prob.truth->f.squaredNorm() / dn;

  std::vector<std::pair<int, double>> curve;
  std::vector<std::vector<int>> best_support(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    std::vector<int> prefix(k);
    for (int i = 0; i < k; ++i) prefix[i] = i;
    curve.emplace_back(k, subset_c2(gram, h, f_msq, prefix));
    best_support[k] = std::move(prefix);
  }
  return finish_oracle(prob, curve, best_support, true);
}

REResult restricted_eigenvalue(const MatrixXd& x, const std::vector<int>& support_T,
                               double c_bar, const REOptions& options) {
  const int p = static_cast<int>(x.cols());
  const int s = static_cast<int>(support_T.size());
  if (s == 0) throw DataError("restricted_eigenvalue: empty support");
  if (s > 13) throw BudgetError("restricted_eigenvalue: sign-pattern enumeration capped at |T| <= 13");
  if (c_bar < 0.0) throw DataError("restricted_eigenvalue: c_bar must be nonnegative");

  const double dn = static_cast<double>(x.rows());
  const MatrixXd gram = x.transpose() * x / dn;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const double lip = 2.0 * std::max(es.eigenvalues().maxCoeff(), 1e-12);
  const double step = 1.0 / lip;

  std::vector<int> comp;
  for (int j = 0; j < p; ++j)
    if (std::find(support_T.begin(), support_T.end(), j) == support_T.end())
      comp.push_back(j);
  const int q = static_cast<int>(comp.size());

  const std::uint64_t patterns = 1ULL << (s - 1);

  auto assemble = [&](const VectorXd& u, const VectorXd& v,
                      const std::vector<double>& sign) {
    VectorXd delta = VectorXd::Zero(p);
    for (int a = 0; a < s; ++a) delta[support_T[a]] = sign[a] * u[a];
    for (int b = 0; b < q; ++b) delta[comp[b]] = v[b];
    return delta;
  };

  auto objective = [&](const VectorXd& delta) { return delta.dot(gram * delta); };

  double best_val = std::numeric_limits<double>::infinity();

  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    std::vector<double> sign(s, 1.0);
    for (int a = 1; a < s; ++a)
      if (mask & (1ULL << (a - 1))) sign[a] = -1.0;

    for (int rs = 0; rs < options.restarts; ++rs) {
      Rng rng(mix_seed(options.seed, mask, static_cast<std::uint64_t>(rs)));
      VectorXd u(s), v = VectorXd::Zero(q);
      if (rs == 0) {
        u.setConstant(1.0 / s);
      } else {
        // Dirichlet(1) on the simplex; l1-ball point with random radius.
        double tot = 0.0;
        for (int a = 0; a < s; ++a) {
          u[a] = -std::log(rng.uniform01());
          tot += u[a];
        }
        u /= tot;
        if (q > 0) {
          double vt = 0.0;
          for (int b = 0; b < q; ++b) {
            v[b] = -std::log(rng.uniform01());
            vt += v[b];
          }
          const double radius = c_bar * rng.uniform01();
          for (int b = 0; b < q; ++b) {
            v[b] = v[b] / vt * radius;
            if (rng.uniform01() < 0.5) v[b] = -v[b];
          }
        }
      }

      // FISTA with restart on objective increase; plain projected gradient
      // is too slow on singular Grams (duplicated columns).
      VectorXd delta = assemble(u, v, sign);
      VectorXd momentum = delta;
      double theta = 1.0;
      double prev_obj = objective(delta);
      for (int it = 0; it < options.max_iter; ++it) {
        const VectorXd grad = 2.0 * (gram * momentum);
        VectorXd ut(s);
        for (int a = 0; a < s; ++a)
          ut[a] = sign[a] * (momentum[support_T[a]] - step * grad[support_T[a]]);
        VectorXd vt(q);
        for (int b = 0; b < q; ++b) vt[b] = momentum[comp[b]] - step * grad[comp[b]];
        const VectorXd un = project_simplex(std::move(ut));
        const VectorXd vn = q > 0 ? project_l1_ball(std::move(vt), c_bar) : vt;
        const VectorXd next = assemble(un, vn, sign);
        const double next_obj = objective(next);
        const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
        if (next_obj > prev_obj) {
          momentum = next;  // restart the momentum sequence
          theta = 1.0;
        } else {
          momentum = next + ((theta - 1.0) / theta_next) * (next - delta);
          theta = theta_next;
        }
        const double move = (next - delta).norm();
        delta = next;
        prev_obj = next_obj;
        if (move < options.tol * std::max(1.0, delta.norm())) break;
      }
      best_val = std::min(best_val, objective(delta));
    }
  }

  REResult res;
  res.qp_value = std::sqrt(static_cast<double>(s) * std::max(0.0, best_val));

  // Dense-grid cross-check: feasible directions sampled per sign pattern.
  const bool run_grid = options.grid && p <= 10 && patterns <= 16 && options.grid_points > 0;
  if (run_grid) {
    double grid_best = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      std::vector<double> sign(s, 1.0);
      for (int a = 1; a < s; ++a)
        if (mask & (1ULL << (a - 1))) sign[a] = -1.0;
      const int chunks = (options.grid_points + 1023) / 1024;
      double pattern_best = std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(min : pattern_best) schedule(static)
      for (int chunk = 0; chunk < chunks; ++chunk) {
        Rng rng(mix_seed(options.seed ^ 0x6417dULL, mask, static_cast<std::uint64_t>(chunk)));
        VectorXd u(s), v(q);
        const int lo = chunk * 1024;
        const int hi = std::min(options.grid_points, lo + 1024);
        for (int g = lo; g < hi; ++g) {
          double tot = 0.0;
          for (int a = 0; a < s; ++a) {
            u[a] = -std::log(rng.uniform01());
            tot += u[a];
          }
          u /= tot;
          if (q > 0) {
            double vt = 0.0;
            for (int b = 0; b < q; ++b) {
              v[b] = -std::log(rng.uniform01());
              vt += v[b];
            }
            const double radius = (g % 2 == 0) ? c_bar : c_bar * rng.uniform01();
            for (int b = 0; b < q; ++b) {
              v[b] = v[b] / vt * radius;
              if (rng.uniform01() < 0.5) v[b] = -v[b];
            }
          }
          const VectorXd delta = assemble(u, v, sign);
          pattern_best = std::min(pattern_best, objective(delta));
        }
      }
      grid_best = std::min(grid_best, pattern_best);
    }
    res.grid_value = std::sqrt(static_cast<double>(s) * std::max(0.0, grid_best));
    res.certified = res.qp_value <= res.grid_value * (1.0 + 1e-6) + 1e-12;
  }

  res.kappa = std::min(res.qp_value, res.grid_value);
  return res;
}

namespace {

struct EigBounds {
  double min_eig = std::numeric_limits<double>::infinity();
  double max_eig = -std::numeric_limits<double>::infinity();
};

EigBounds submatrix_bounds(const MatrixXd& gram, const std::vector<int>& t_set,
                           const std::vector<int>& j_set,
                           Eigen::SelfAdjointEigenSolver<MatrixXd>& solver,
                           MatrixXd& scratch) {
  const int d = static_cast<int>(t_set.size() + j_set.size());
  scratch.resize(d, d);
  std::vector<int> idx;
  idx.reserve(d);
  idx.insert(idx.end(), t_set.begin(), t_set.end());
  idx.insert(idx.end(), j_set.begin(), j_set.end());
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) scratch(a, b) = gram(idx[a], idx[b]);
  solver.compute(scratch, Eigen::EigenvaluesOnly);
  return {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
}

void check_rse_pre(const MatrixXd& x, const std::vector<int>& support_T, int m_max,
                   std::uint64_t subset_budget) {
  const int p = static_cast<int>(x.cols());
  for (int j : support_T)
    if (j < 0 || j >= p) throw DataError("restricted_sparse_eigenvalues: bad support index");
  const int q = p - static_cast<int>(support_T.size());
  std::uint64_t total = 0;
  for (int m = 0; m <= m_max; ++m) total += binomial(q, std::min(m, q));
  if (total > subset_budget) {
    throw BudgetError("restricted_sparse_eigenvalues: enumeration budget exceeded (" +
                      std::to_string(total) + " subsets)");
  }
}

}  // namespace

DesignConstants restricted_sparse_eigenvalues(const MatrixXd& x,
                                              const std::vector<int>& support_T,
                                              int m_max, std::uint64_t subset_budget) {
  check_rse_pre(x, support_T, m_max, subset_budget);
  const int p = static_cast<int>(x.cols());
  const double dn = static_cast<double>(x.rows());
  const MatrixXd gram = x.transpose() * x / dn;

  std::vector<int> comp;
  for (int j = 0; j < p; ++j)
    if (std::find(support_T.begin(), support_T.end(), j) == support_T.end())
      comp.push_back(j);
  const int q = static_cast<int>(comp.size());

  DesignConstants dc;
  for (int m = 0; m <= m_max; ++m) {
    const int mm = std::min(m, q);
    const std::uint64_t count = binomial(q, mm);
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    if (support_T.empty() && mm == 0) {
      dc.phi.push_back(std::numeric_limits<double>::quiet_NaN());
      dc.kappa_tilde.push_back(std::numeric_limits<double>::quiet_NaN());
      dc.mu.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
#pragma omp parallel reduction(min : mn) reduction(max : mx)
    {
      Eigen::SelfAdjointEigenSolver<MatrixXd> solver;
      MatrixXd scratch;
#ifdef _OPENMP
      const int nt = omp_get_num_threads();
      const int tid = omp_get_thread_num();
#else
      const int nt = 1;
      const int tid = 0;
#endif
      const std::uint64_t chunk = (count + nt - 1) / nt;
      const std::uint64_t lo = std::min<std::uint64_t>(chunk * tid, count);
      const std::uint64_t hi = std::min<std::uint64_t>(lo + chunk, count);
      if (lo < hi) {
        std::vector<int> pick = unrank_combination(lo, mm, q);
        for (std::uint64_t r = lo; r < hi; ++r) {
          std::vector<int> j_set(pick.size());
          for (std::size_t a = 0; a < pick.size(); ++a) j_set[a] = comp[pick[a]];
          const EigBounds eb = submatrix_bounds(gram, support_T, j_set, solver, scratch);
          mn = std::min(mn, eb.min_eig);
          mx = std::max(mx, eb.max_eig);
          if (r + 1 < hi) next_combination(pick, q);
        }
      }
    }
    dc.phi.push_back(mx);
    dc.kappa_tilde.push_back(std::sqrt(std::max(0.0, mn)));
    dc.mu.push_back(std::sqrt(std::max(0.0, mx)) / std::sqrt(std::max(0.0, mn)));
  }
  return dc;
}

DesignConstants restricted_sparse_eigenvalues_serial(const MatrixXd& x,
                                                     const std::vector<int>& support_T,
                                                     int m_max,
                                                     std::uint64_t subset_budget) {
  check_rse_pre(x, support_T, m_max, subset_budget);
  const int p = static_cast<int>(x.cols());
  const double dn = static_cast<double>(x.rows());
  const MatrixXd gram = x.transpose() * x / dn;

  std::vector<int> comp;
  for (int j = 0; j < p; ++j)
    if (std::find(support_T.begin(), support_T.end(), j) == support_T.end())
      comp.push_back(j);
  const int q = static_cast<int>(comp.size());

  DesignConstants dc;
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver;
  MatrixXd scratch;
  for (int m = 0; m <= m_max; ++m) {
    const int mm = std::min(m, q);
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    if (support_T.empty() && mm == 0) {
      dc.phi.push_back(std::numeric_limits<double>::quiet_NaN());
      dc.kappa_tilde.push_back(std::numeric_limits<double>::quiet_NaN());
      dc.mu.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    std::vector<int> pick(mm);
    for (int i = 0; i < mm; ++i) pick[i] = i;
    bool more = true;
    while (more) {
      std::vector<int> j_set(pick.size());
      for (std::size_t a = 0; a < pick.size(); ++a) j_set[a] = comp[pick[a]];
      const EigBounds eb = submatrix_bounds(gram, support_T, j_set, solver, scratch);
      mn = std::min(mn, eb.min_eig);
      mx = std::max(mx, eb.max_eig);
      more = next_combination(pick, q);
    }
    dc.phi.push_back(mx);
    dc.kappa_tilde.push_back(std::sqrt(std::max(0.0, mn)));
    dc.mu.push_back(std::sqrt(std::max(0.0, mx)) / std::sqrt(std::max(0.0, mn)));
  }
  return dc;
}

BoundReport certify_bounds(const RegressionProblem& prob, const LassoFit& fit,
                           double c, const OracleSolution& oracle,
                           const DesignConstants& rse, double kappa_cbar,
                           double kappa_2cbar, bool kappa_certified,
                           double re_margin) {
  if (!prob.truth.has_value()) throw DataError("certify_bounds: ground truth not present");
  const double dn = static_cast<double>(prob.n());
  const double lambda = fit.lambda;
  const double c_bar = (c + 1.0) / (c - 1.0);
  const double s = static_cast<double>(oracle.s);
  const double c_s = oracle.c_s;
  constexpr double rel = 1e-9;
  constexpr double abs_tol = 1e-12;

  BoundReport rep;
  rep.lambda = lambda;
  rep.c = c;
  rep.c_bar = c_bar;
  rep.kappa_cbar = kappa_cbar;
  rep.kappa_2cbar = kappa_2cbar;
  rep.kappa_certified = kappa_certified;

  rep.event_lambda = lambda >= c * dn * score_sup_norm(prob);

  // m_hat and subset/exact flags against the oracle model.
  std::vector<int> extra;
  rep.subset = true;
  for (int j : oracle.support) {
    if (!std::binary_search(fit.support.begin(), fit.support.end(), j)) rep.subset = false;
  }
  for (int j : fit.support) {
    if (!std::binary_search(oracle.support.begin(), oracle.support.end(), j))
      extra.push_back(j);
  }
  rep.m_hat = static_cast<int>(extra.size());
  rep.selected_size = static_cast<int>(fit.support.size());
  rep.exact_selection = rep.subset && rep.m_hat == 0 &&
                        fit.support.size() == oracle.support.size();
  if (rep.m_hat >= static_cast<int>(rse.phi.size())) {
    throw DataError("certify_bounds: rse constants do not cover m_hat = " +
                    std::to_string(rep.m_hat));
  }
  rep.phi_mhat = rse.phi[rep.m_hat];

  const double kc = std::max(0.0, kappa_cbar * (1.0 - re_margin));
  const double k2c = std::max(0.0, kappa_2cbar * (1.0 - re_margin));

  const VectorXd delta = fit.beta - oracle.beta0;
  const double pred_lhs = prediction_norm(prob, delta);

  // Prediction-norm error bound.
  {
    double term = 0.0;
    if (oracle.s > 0)
      term = kc > 0.0 ? (1.0 + 1.0 / c) * lambda * std::sqrt(s) / (dn * kc)
                      : std::numeric_limits<double>::infinity();
    rep.pred.lhs = pred_lhs;
    rep.pred.rhs = term + 2.0 * c_s;
    rep.pred.status = rep.pred.lhs <= rep.pred.rhs * (1.0 + rel) + abs_tol
                          ? CheckStatus::holds
                          : CheckStatus::failed;
  }

  // l1-norm error bound (needs kappa(2 c_bar)).
  {
    double t1 = 0.0;
    if (oracle.s > 0)
      t1 = k2c > 0.0 ? (1.0 + 2.0 * c_bar) * std::sqrt(s) * pred_lhs / k2c
                     : std::numeric_limits<double>::infinity();
    const double t2 =
        (1.0 + 1.0 / (2.0 * c_bar)) * (2.0 * c / (c - 1.0)) * dn * c_s * c_s / lambda;
    rep.l1.lhs = delta.cwiseAbs().sum();
    rep.l1.rhs = std::max(t1, t2);
    if (rep.l1.lhs <= rep.l1.rhs * (1.0 + rel) + abs_tol) {
      rep.l1.status = CheckStatus::holds;
    } else {
      rep.l1.status = kappa_certified ? CheckStatus::failed : CheckStatus::inconclusive;
    }
  }

  // Lower bound on the regression-function error.
  {
    rep.lower.lhs = std::sqrt((prob.x * fit.beta - prob.truth->f).squaredNorm() / dn);
    const double phi = rep.phi_mhat;
    rep.lower.rhs = fit.support.empty()
                        ? 0.0
                        : (1.0 - 1.0 / c) * lambda *
                              std::sqrt(static_cast<double>(fit.support.size())) /
                              (2.0 * dn * std::sqrt(phi));
    rep.lower.status = rep.lower.lhs >= rep.lower.rhs * (1.0 - rel) - abs_tol
                           ? CheckStatus::holds
                           : CheckStatus::failed;
  }

  // Pre-sparsity inequality, reported in its squared form.
  {
    const double phi = rep.phi_mhat;
    double rhs_sqrt = 3.0 * (c_bar + 1.0) * std::sqrt(phi) * dn * c_s / lambda;
    if (oracle.s > 0)
      rhs_sqrt += kc > 0.0 ? std::sqrt(s) * std::sqrt(phi) * 2.0 * c_bar / kc
                           : std::numeric_limits<double>::infinity();
    rep.presparsity.lhs = static_cast<double>(rep.m_hat);
    rep.presparsity.rhs = rhs_sqrt * rhs_sqrt;
    rep.presparsity.status =
        rep.presparsity.lhs <= rep.presparsity.rhs * (1.0 + rel) + abs_tol
            ? CheckStatus::holds
            : CheckStatus::failed;
  }

  rep.zeta = delta.cwiseAbs().maxCoeff();
  const double q0 = objective_q(prob, oracle.beta0);
  rep.b_n = fit.objective - q0;
  VectorXd trunc = VectorXd::Zero(prob.p());
  for (int j : fit.support) trunc[j] = oracle.beta0[j];
  rep.c_n = objective_q(prob, trunc) - q0;

  if (!oracle.support.empty()) {
    try {
      rep.kkt_certificate =
          perfect_selection_certificate(prob, lambda, oracle.beta0, oracle.support);
    } catch (const DataError&) {
      rep.kkt_certificate = false;
    }
  }
  return rep;
}

bool perfect_selection_certificate(const RegressionProblem& prob, double lambda,
                                   const VectorXd& beta0,
                                   const std::vector<int>& support_T) {
  const int s = static_cast<int>(support_T.size());
  if (s == 0) throw DataError("perfect_selection_certificate: empty oracle support");
  const int p = prob.p();
  const double dn = static_cast<double>(prob.n());
  const double half_lam = lambda / (2.0 * dn);

  std::vector<int> comp;
  for (int j = 0; j < p; ++j)
    if (std::find(support_T.begin(), support_T.end(), j) == support_T.end())
      comp.push_back(j);

  const VectorXd u = prob.y - prob.x * beta0;
  MatrixXd qtt(s, s);
  VectorXd ht(s), sgn(s);
  for (int a = 0; a < s; ++a) {
    ht[a] = prob.x.col(support_T[a]).dot(u) / dn;
    sgn[a] = beta0[support_T[a]] > 0 ? 1.0 : -1.0;
    for (int b = 0; b < s; ++b)
      qtt(a, b) = prob.x.col(support_T[a]).dot(prob.x.col(support_T[b])) / dn;
  }
  Eigen::FullPivLU<MatrixXd> lu(qtt);
  if (!lu.isInvertible()) {
    throw DataError("perfect_selection_certificate: singular Gram submatrix on T");
  }
  const VectorXd w = lu.solve(ht - half_lam * sgn);

  // Strict sign consistency on T.
  for (int a = 0; a < s; ++a) {
    if (sgn[a] * (beta0[support_T[a]] + w[a]) <= 0.0) return false;
  }
  // Sup-norm inequality on T^c.
  for (int j : comp) {
    double qct_w = 0.0;
    for (int a = 0; a < s; ++a)
      qct_w += prob.x.col(j).dot(prob.x.col(support_T[a])) / dn * w[a];
    const double hj = prob.x.col(j).dot(u) / dn;
    if (std::abs(qct_w - hj) > half_lam) return false;
  }
  return true;
}

bool perfect_selection_certificate(const RegressionProblem& prob, double lambda) {
  if (!prob.truth.has_value())
    throw DataError("perfect_selection_certificate: ground truth not present");
  return perfect_selection_certificate(prob, lambda, prob.truth->beta0,
                                       prob.truth->support);
}

}  // namespace sparsereg

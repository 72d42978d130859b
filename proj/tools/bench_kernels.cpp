// Times the OpenMP kernels against their serial reference implementations
// and verifies that both produce identical results.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sparsereg/diagnostics.hpp"
#include "sparsereg/penalty.hpp"
#include "sparsereg/rng.hpp"
#include "sparsereg/simharness.hpp"

using namespace sparsereg;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <class F>
double timed(F&& fn) {
  const double t0 = now_ms();
  fn();
  return now_ms() - t0;
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-28s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   %s\n", name,
              serial_ms, parallel_ms, serial_ms / parallel_ms,
              identical ? "identical" : "MISMATCH");
}

MatrixXd random_design(std::uint64_t seed, int n, int p) {
  Rng rng(seed);
  MatrixXd x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
  auto [xn, scale] = normalize_columns(x);
  (void)scale;
  return xn;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif

  {
    const MatrixXd x = random_design(11, 200, 300);
    double qs = 0.0, qp = 0.0;
    const double ts = timed([&] { qs = simulate_lambda_quantile_serial(x, 0.05, 3000, 7); });
    const double tp = timed([&] { qp = simulate_lambda_quantile(x, 0.05, 3000, 7); });
    report("lambda quantile (3000 dr)", ts, tp, qs == qp);
  }

  {
    const MatrixXd x = random_design(13, 80, 22);
    const std::vector<int> t_set{0, 1, 2};
    DesignConstants a, b;
    const double ts = timed([&] { a = restricted_sparse_eigenvalues_serial(x, t_set, 5); });
    const double tp = timed([&] { b = restricted_sparse_eigenvalues(x, t_set, 5); });
    bool same = a.phi.size() == b.phi.size();
    for (std::size_t m = 0; same && m < a.phi.size(); ++m)
      same = a.phi[m] == b.phi[m] && a.kappa_tilde[m] == b.kappa_tilde[m];
    report("sparse eigenvalues (m<=5)", ts, tp, same);
  }

  {
    Rng rng(17);
    MatrixXd z(60, 16);
    for (int i = 0; i < 60; ++i)
      for (int j = 0; j < 16; ++j) z(i, j) = rng.normal();
    VectorXd theta = VectorXd::Zero(16);
    theta[0] = theta[1] = 1.0;
    VectorXd f = z * theta;
    VectorXd y = f;
    for (int i = 0; i < 60; ++i) y[i] += rng.normal();
    RegressionProblem prob = RegressionProblem::from_raw(z, y, theta, f, 1.0);
    OracleSolution a, b;
    const double ts = timed([&] { a = solve_oracle_serial(prob, 5); });
    const double tp = timed([&] { b = solve_oracle(prob, 5); });
    report("oracle program (p=16)", ts, tp,
           a.support == b.support && a.c_k_curve == b.c_k_curve);
  }

  {
    SimulationConfig cfg = preset_desk();
    cfg.p = 40;
    cfg.replications = 12;
    cfg.c_grid = {0.5, 1.0};
    cfg.penalty.mc_draws = 400;
    std::vector<MetricsRecord> a, b;
    const double ts = timed([&] { a = run_sweep_serial(cfg); });
    const double tp = timed([&] { b = run_sweep(cfg); });
    report("replication sweep (2x12)", ts, tp, records_csv(a) == records_csv(b));
  }

  return 0;
}

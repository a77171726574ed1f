// Times the pairwise likelihood/gradient/probability kernels with the serial
// reference path against the OpenMP path, and checks the results agree
// bitwise (they share per-row partials and a fixed tree reduction).
#include <chrono>
#include <cstdio>
#include <random>

#include <Eigen/Dense>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "dlaim/kernels.hpp"
#include "dlaim/rng.hpp"

namespace {

using dlaim::kernels::Exec;

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_ms();
    f();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 256;
  int k = argc > 2 ? std::atoi(argv[2]) : 32;
  int reps = argc > 3 ? std::atoi(argv[3]) : 5;
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd psi = dlaim::random_normal_matrix(rng, n, k);
  const Eigen::MatrixXd theta = dlaim::random_normal_matrix(rng, k, 4);
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && unit(rng) < 0.1) adj(i, j) = 1.0;
  const Eigen::MatrixXd z = psi.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (compiled without OpenMP)\n");
#endif
  std::printf("problem: n=%d k=%d directed, best of %d\n\n", n, k, reps);

  double serial_val = 0.0, parallel_val = 0.0;
  const double t_ll_s = time_best_of(
      reps, [&] { serial_val = dlaim::kernels::pair_loglik(psi, theta, adj, true, 1.0, Exec::kSerial); });
  const double t_ll_p = time_best_of(reps, [&] {
    parallel_val = dlaim::kernels::pair_loglik(psi, theta, adj, true, 1.0, Exec::kParallel);
  });
  const bool ll_equal = serial_val == parallel_val;
  std::printf("pair_loglik        serial %8.2f ms   parallel %8.2f ms   speedup %5.2fx   %s\n",
              t_ll_s, t_ll_p, t_ll_s / t_ll_p, ll_equal ? "bitwise equal" : "MISMATCH");

  Eigen::MatrixXd gp_s = Eigen::MatrixXd::Zero(n, k), gt_s = Eigen::MatrixXd::Zero(k, 4);
  Eigen::MatrixXd gp_p = gp_s, gt_p = gt_s;
  const double t_gr_s = time_best_of(reps, [&] {
    gp_s.setZero();
    gt_s.setZero();
    dlaim::kernels::pair_loglik_grad(psi, theta, adj, true, 1.0, 1.0, gp_s, gt_s, Exec::kSerial);
  });
  const double t_gr_p = time_best_of(reps, [&] {
    gp_p.setZero();
    gt_p.setZero();
    dlaim::kernels::pair_loglik_grad(psi, theta, adj, true, 1.0, 1.0, gp_p, gt_p, Exec::kParallel);
  });
  const bool gr_equal = gp_s == gp_p && gt_s == gt_p;
  std::printf("pair_loglik_grad   serial %8.2f ms   parallel %8.2f ms   speedup %5.2fx   %s\n",
              t_gr_s, t_gr_p, t_gr_s / t_gr_p, gr_equal ? "bitwise equal" : "MISMATCH");

  Eigen::MatrixXd prob_s, prob_p;
  const double t_pm_s = time_best_of(
      reps, [&] { prob_s = dlaim::kernels::probability_matrix(z, theta, true, Exec::kSerial); });
  const double t_pm_p = time_best_of(
      reps, [&] { prob_p = dlaim::kernels::probability_matrix(z, theta, true, Exec::kParallel); });
  const bool pm_equal = prob_s == prob_p;
  std::printf("probability_matrix serial %8.2f ms   parallel %8.2f ms   speedup %5.2fx   %s\n",
              t_pm_s, t_pm_p, t_pm_s / t_pm_p, pm_equal ? "bitwise equal" : "MISMATCH");

  return (ll_equal && gr_equal && pm_equal) ? 0 : 1;
}

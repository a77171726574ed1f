#include <doctest.h>

#include <numeric>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dlaim/kernels.hpp"
#include "dlaim/model.hpp"
#include "dlaim/rng.hpp"
#include "test_util.hpp"

using namespace dlaim;
using kernels::Exec;

namespace {

struct Instance {
  Eigen::MatrixXd psi, z, theta, adj;
  bool directed;
};

Instance make_instance(int n, int k, bool directed, std::uint64_t seed, double density = 0.4) {
  std::mt19937_64 rng(seed);
  Instance inst;
  inst.directed = directed;
  inst.psi = random_normal_matrix(rng, n, k);
  inst.z = inst.psi.unaryExpr(&attribute_activation);
  inst.theta = random_normal_matrix(rng, k, directed ? 4 : 3);
  inst.adj = testutil::random_snapshots(n, 1, directed, seed + 1, density).snapshots[0];
  return inst;
}

std::vector<Eigen::Matrix2d> expand_rows(const Eigen::MatrixXd& theta, bool directed) {
  std::vector<Eigen::Matrix2d> mats;
  for (int k = 0; k < theta.rows(); ++k)
    mats.push_back(expand_interaction_matrix(theta.row(k), directed));
  return mats;
}

// straight double-loop reference, accumulated left to right
double naive_loglik(const Instance& inst) {
  const auto mats = expand_rows(inst.theta, inst.directed);
  const int n = static_cast<int>(inst.psi.rows());
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = inst.directed ? 0 : i + 1; j < n; ++j) {
      if (i == j) continue;
      const double p = edge_probability(inst.z.row(i), inst.z.row(j), mats);
      total += inst.adj(i, j) == 1.0 ? std::log(p) : std::log(1.0 - p);
    }
  }
  return total;
}

}  // namespace

TEST_CASE("tree_reduce: fixed pairwise order, exact on representable sums") {
  std::vector<double> v = {0.1, 0.2, 0.3};
  // split at count/2: v0 + (v1 + v2)
  CHECK(kernels::tree_reduce(v.data(), 3) == 0.1 + (0.2 + 0.3));
  std::vector<double> w = {0.1, 0.2, 0.3, 0.4, 0.5};
  // (v0 + v1) + ((v2 + v3) + v4)
  CHECK(kernels::tree_reduce(w.data(), 5) == (0.1 + 0.2) + ((0.3 + 0.4) + 0.5));
  CHECK(kernels::tree_reduce(w.data(), 0) == 0.0);
  CHECK(kernels::tree_reduce(w.data(), 1) == 0.1);

  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 100);
    std::vector<double> ints(static_cast<std::size_t>(n));
    for (double& x : ints) x = static_cast<double>(static_cast<int>(rng() % 2001) - 1000);
    const double direct = std::accumulate(ints.begin(), ints.end(), 0.0);
    CHECK(kernels::tree_reduce(ints.data(), n) == direct);  // integers: no rounding
  }
}

TEST_CASE("pair_loglik matches a naive transcription") {
  for (const bool directed : {false, true}) {
    for (int rep = 0; rep < 8; ++rep) {
      const Instance inst = make_instance(3 + rep, 2 + rep % 3, directed, 100 + rep);
      const double got = kernels::pair_loglik(inst.psi, inst.theta, inst.adj, directed, 1.0,
                                              Exec::kSerial);
      CHECK(got == doctest::Approx(naive_loglik(inst)).epsilon(1e-12));
    }
  }
}

TEST_CASE("pair_loglik weight is a single exact scale") {
  const Instance inst = make_instance(7, 3, true, 200);
  const double base = kernels::pair_loglik(inst.psi, inst.theta, inst.adj, true, 1.0);
  CHECK(kernels::pair_loglik(inst.psi, inst.theta, inst.adj, true, 2.5) == 2.5 * base);
}

TEST_CASE("serial and parallel paths are bit-identical") {
#ifdef _OPENMP
  omp_set_num_threads(4);  // more threads than cores is fine for determinism checks
#endif
  for (const bool directed : {false, true}) {
    for (const int n : {2, 3, 5, 17, 64}) {
      const Instance inst = make_instance(n, 4, directed, 300 + n);
      const double s = kernels::pair_loglik(inst.psi, inst.theta, inst.adj, directed, 1.3,
                                            Exec::kSerial);
      const double p = kernels::pair_loglik(inst.psi, inst.theta, inst.adj, directed, 1.3,
                                            Exec::kParallel);
      CHECK(s == p);

      Eigen::MatrixXd gps = Eigen::MatrixXd::Zero(n, 4), gpp = gps;
      Eigen::MatrixXd gts = Eigen::MatrixXd::Zero(4, directed ? 4 : 3), gtp = gts;
      kernels::pair_loglik_grad(inst.psi, inst.theta, inst.adj, directed, 1.3, 0.7, gps, gts,
                                Exec::kSerial);
      kernels::pair_loglik_grad(inst.psi, inst.theta, inst.adj, directed, 1.3, 0.7, gpp, gtp,
                                Exec::kParallel);
      CHECK(gps == gpp);
      CHECK(gts == gtp);

      CHECK(kernels::probability_matrix(inst.z, inst.theta, directed, Exec::kSerial) ==
            kernels::probability_matrix(inst.z, inst.theta, directed, Exec::kParallel));
      CHECK(kernels::logit_matrix(inst.z, inst.theta, directed, Exec::kSerial) ==
            kernels::logit_matrix(inst.z, inst.theta, directed, Exec::kParallel));
    }
  }
#ifdef _OPENMP
  omp_set_num_threads(omp_get_num_procs());
#endif
}

TEST_CASE("pair_loglik_grad matches central finite differences") {
  for (const bool directed : {false, true}) {
    Instance inst = make_instance(5, 3, directed, 400);
    const int n = 5, k = 3, d = directed ? 4 : 3;
    Eigen::MatrixXd grad_psi = Eigen::MatrixXd::Zero(n, k);
    Eigen::MatrixXd grad_theta = Eigen::MatrixXd::Zero(k, d);
    kernels::pair_loglik_grad(inst.psi, inst.theta, inst.adj, directed, 1.0, 1.0, grad_psi,
                              grad_theta);

    const double h = 1e-6;
    auto loglik_at = [&](const Eigen::MatrixXd& psi, const Eigen::MatrixXd& theta) {
      return kernels::pair_loglik(psi, theta, inst.adj, directed, 1.0);
    };
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < k; ++c) {
        Eigen::MatrixXd up = inst.psi, dn = inst.psi;
        up(r, c) += h;
        dn(r, c) -= h;
        const double num = (loglik_at(up, inst.theta) - loglik_at(dn, inst.theta)) / (2.0 * h);
        CHECK(grad_psi(r, c) == doctest::Approx(num).epsilon(1e-6));
      }
    }
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < d; ++c) {
        Eigen::MatrixXd up = inst.theta, dn = inst.theta;
        up(r, c) += h;
        dn(r, c) -= h;
        const double num = (loglik_at(inst.psi, up) - loglik_at(inst.psi, dn)) / (2.0 * h);
        CHECK(grad_theta(r, c) == doctest::Approx(num).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("pair_loglik_grad accumulates and scales by weight * upstream") {
  const Instance inst = make_instance(6, 2, false, 500);
  Eigen::MatrixXd g1 = Eigen::MatrixXd::Zero(6, 2), t1 = Eigen::MatrixXd::Zero(2, 3);
  kernels::pair_loglik_grad(inst.psi, inst.theta, inst.adj, false, 1.0, 1.0, g1, t1);

  // accumulate twice = twice the gradient (up to summation-order rounding)
  Eigen::MatrixXd g2 = Eigen::MatrixXd::Zero(6, 2), t2 = Eigen::MatrixXd::Zero(2, 3);
  kernels::pair_loglik_grad(inst.psi, inst.theta, inst.adj, false, 1.0, 1.0, g2, t2);
  kernels::pair_loglik_grad(inst.psi, inst.theta, inst.adj, false, 1.0, 1.0, g2, t2);
  CHECK((g2 - 2.0 * g1).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(t2 == 2.0 * t1);  // one-shot buffer add: x + x is exact

  // power-of-two weight and upstream scale exactly
  Eigen::MatrixXd g4 = Eigen::MatrixXd::Zero(6, 2), t4 = Eigen::MatrixXd::Zero(2, 3);
  kernels::pair_loglik_grad(inst.psi, inst.theta, inst.adj, false, 2.0, 2.0, g4, t4);
  CHECK(g4 == 4.0 * g1);
  CHECK(t4 == 4.0 * t1);
}

TEST_CASE("probability and logit matrices match the per-pair model") {
  for (const bool directed : {false, true}) {
    const Instance inst = make_instance(7, 3, directed, 600);
    const auto mats = expand_rows(inst.theta, directed);
    const Eigen::MatrixXd prob = kernels::probability_matrix(inst.z, inst.theta, directed);
    const Eigen::MatrixXd logit = kernels::logit_matrix(inst.z, inst.theta, directed);
    for (int i = 0; i < 7; ++i) {
      CHECK(prob(i, i) == 0.0);
      CHECK(logit(i, i) == 0.0);
      for (int j = 0; j < 7; ++j) {
        if (i == j) continue;
        CHECK(logit(i, j) ==
              doctest::Approx(pairwise_logit(inst.z.row(i), inst.z.row(j), mats)).epsilon(1e-13));
        CHECK(prob(i, j) == attribute_activation(logit(i, j)));
      }
    }
    if (!directed) {
      CHECK(prob == Eigen::MatrixXd(prob.transpose()));  // mirrored, so exactly symmetric
      CHECK(logit == Eigen::MatrixXd(logit.transpose()));
    }
  }
}

TEST_CASE("kernel argument validation") {
  const Instance inst = make_instance(4, 2, false, 700);
  Eigen::MatrixXd bad_adj = Eigen::MatrixXd::Zero(3, 3);
  CHECK_THROWS_AS((void)kernels::pair_loglik(inst.psi, inst.theta, bad_adj, false, 1.0),
                  std::invalid_argument);
  Eigen::MatrixXd wide_theta = Eigen::MatrixXd::Zero(2, 4);
  CHECK_THROWS_AS((void)kernels::pair_loglik(inst.psi, wide_theta, inst.adj, false, 1.0),
                  std::invalid_argument);
  Eigen::MatrixXd small = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd gt = Eigen::MatrixXd::Zero(2, 3);
  CHECK_THROWS_AS(
      kernels::pair_loglik_grad(inst.psi, inst.theta, inst.adj, false, 1.0, 1.0, small, gt),
      std::invalid_argument);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "dlaim/model.hpp"
#include "dlaim/rng.hpp"
#include "test_util.hpp"

using namespace dlaim;

TEST_CASE("attribute_activation matches the logistic function and is stable") {
  CHECK(attribute_activation(0.0) == 0.5);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    CHECK(attribute_activation(x) == doctest::Approx(testutil::ref_sigmoid(x)).epsilon(1e-14));
    CHECK(attribute_activation(x) + attribute_activation(-x) == doctest::Approx(1.0).epsilon(1e-14));
  }
  // far tails: saturates cleanly instead of overflowing
  CHECK(attribute_activation(800.0) == 1.0);
  CHECK(attribute_activation(-800.0) == 0.0);
  CHECK(std::isfinite(attribute_activation(-1e308)));
}

TEST_CASE("softplus identities") {
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(softplus(60.0) == doctest::Approx(60.0).epsilon(1e-12));
  CHECK(softplus(-60.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::isfinite(softplus(1e4)));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    // softplus(x) - softplus(-x) = x
    CHECK(softplus(x) - softplus(-x) == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("interaction matrix flattening conventions") {
  SUBCASE("directed: row-major 4-vector") {
    Eigen::VectorXd v(4);
    v << 1.0, 2.0, 3.0, 4.0;
    const Eigen::Matrix2d t = expand_interaction_matrix(v, true);
    CHECK(t(0, 0) == 1.0);
    CHECK(t(0, 1) == 2.0);
    CHECK(t(1, 0) == 3.0);
    CHECK(t(1, 1) == 4.0);
    CHECK(flatten_interaction_matrix(t, true) == v);
  }
  SUBCASE("undirected: symmetric 3-vector") {
    Eigen::VectorXd v(3);
    v << -1.0, 0.5, 2.0;
    const Eigen::Matrix2d t = expand_interaction_matrix(v, false);
    CHECK(t(0, 1) == t(1, 0));
    CHECK(t(0, 0) == -1.0);
    CHECK(t(1, 1) == 2.0);
    CHECK(flatten_interaction_matrix(t, false) == v);
  }
  SUBCASE("size and symmetry violations throw") {
    Eigen::VectorXd v3(3);
    v3.setZero();
    CHECK_THROWS_AS((void)expand_interaction_matrix(v3, true), std::invalid_argument);
    Eigen::Matrix2d asym;
    asym << 0.0, 1.0, 2.0, 0.0;
    CHECK_THROWS_AS((void)flatten_interaction_matrix(asym, false), std::invalid_argument);
  }
}

TEST_CASE("pairwise_logit equals Bernoulli-outcome enumeration") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const int k = 1 + static_cast<int>(rng() % 6);
    Eigen::VectorXd zi(k), zj(k);
    std::vector<Eigen::Matrix2d> theta(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) {
      zi(a) = unit(rng);
      zj(a) = unit(rng);
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) theta[static_cast<std::size_t>(a)](x, y) = normal(rng);
    }
    const double got = pairwise_logit(zi, zj, theta);
    const double want = testutil::enumerated_logit(zi, zj, theta);
    CHECK(std::abs(got - want) < 1e-12);
    CHECK(edge_probability(zi, zj, theta) ==
          doctest::Approx(testutil::ref_sigmoid(want)).epsilon(1e-13));
  }
}

TEST_CASE("pairwise_logit rejects mismatched attribute counts") {
  Eigen::VectorXd z2(2), z3(3);
  z2.setConstant(0.5);
  z3.setConstant(0.5);
  std::vector<Eigen::Matrix2d> theta(2, Eigen::Matrix2d::Zero());
  CHECK_THROWS_AS((void)pairwise_logit(z2, z3, theta), std::invalid_argument);
  CHECK_THROWS_AS((void)pairwise_logit(z3, z3, theta), std::invalid_argument);
}

TEST_CASE("gaussian_log_density closed form") {
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  CHECK(gaussian_log_density(zero, zero, 1.0) ==
        doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-15));
  std::mt19937_64 rng(4);
  Eigen::VectorXd x = random_normal_matrix(rng, 5, 1);
  Eigen::VectorXd m = random_normal_matrix(rng, 5, 1);
  const double var = 2.7;
  double want = 0.0;
  for (int i = 0; i < 5; ++i)
    want += std::log(1.0 / std::sqrt(2.0 * M_PI * var)) -
            (x(i) - m(i)) * (x(i) - m(i)) / (2.0 * var);
  CHECK(gaussian_log_density(x, m, var) == doctest::Approx(want).epsilon(1e-12));
  CHECK_THROWS_AS((void)gaussian_log_density(x, m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)gaussian_log_density(x, m, -1.0), std::invalid_argument);
}

TEST_CASE("Hyperparams validation") {
  Hyperparams hp;
  CHECK(hp.n_attrs == 32);
  CHECK(hp.theta_dim() == 3);
  hp.directed = true;
  CHECK(hp.theta_dim() == 4);
  CHECK_NOTHROW(hp.validate());
  hp.psi_step_var = 0.0;
  CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
  hp.psi_step_var = 0.01;
  hp.n_attrs = 0;
  CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
}

TEST_CASE("SnapshotSequence validation") {
  SnapshotSequence seq = testutil::random_snapshots(6, 3, false, 11);
  CHECK_NOTHROW(seq.validate());
  CHECK(seq.pair_count() == 15);
  seq.directed = true;
  CHECK(seq.pair_count() == 30);
  CHECK_NOTHROW(seq.validate());  // symmetric matrices are fine as directed data

  SnapshotSequence bad = testutil::random_snapshots(4, 1, false, 12);
  bad.snapshots[0](1, 1) = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = testutil::random_snapshots(4, 1, false, 13);
  bad.snapshots[0](0, 1) = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = testutil::random_snapshots(4, 1, true, 14);
  bad.directed = false;
  bad.snapshots[0](0, 1) = 1.0;
  bad.snapshots[0](1, 0) = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("sample_network shapes, determinism, and structure") {
  Hyperparams hp;
  hp.n_attrs = 3;
  hp.psi_prior_var = 1.0;
  hp.theta_prior_var = 1.0;

  SUBCASE("undirected") {
    const SampledNetwork a = sample_network(hp, 8, 5, 42);
    const SampledNetwork b = sample_network(hp, 8, 5, 42);
    const SampledNetwork c = sample_network(hp, 8, 5, 43);
    CHECK(a.snapshots.horizon() == 5);
    CHECK(a.latent.psi.size() == 5);
    CHECK(a.latent.theta_bar.size() == 5);
    CHECK(a.latent.psi[0].rows() == 8);
    CHECK(a.latent.psi[0].cols() == 3);
    CHECK(a.latent.theta_bar[0].cols() == 3);
    CHECK_NOTHROW(a.snapshots.validate());
    bool identical = true, distinct = false;
    for (int t = 0; t < 5; ++t) {
      identical = identical && a.snapshots.snapshots[t] == b.snapshots.snapshots[t] &&
                  a.latent.psi[t] == b.latent.psi[t];
      distinct = distinct || a.snapshots.snapshots[t] != c.snapshots.snapshots[t];
    }
    CHECK(identical);
    CHECK(distinct);
  }

  SUBCASE("directed uses 4 interaction entries and may be asymmetric") {
    hp.directed = true;
    const SampledNetwork a = sample_network(hp, 10, 4, 7);
    CHECK(a.latent.theta_bar[0].cols() == 4);
    CHECK_NOTHROW(a.snapshots.validate());
    bool asymmetric = false;
    for (const auto& snap : a.snapshots.snapshots)
      asymmetric = asymmetric || snap != Eigen::MatrixXd(snap.transpose());
    CHECK(asymmetric);
  }

  SUBCASE("argument validation") {
    CHECK_THROWS_AS((void)sample_network(hp, 1, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)sample_network(hp, 5, 0, 0), std::invalid_argument);
  }
}

TEST_CASE("sampled edges occur at the model's edge probability") {
  // Two nodes, one timestep: across seeds the edge indicator must match the
  // per-seed model probability on average (3 standard errors).
  Hyperparams hp;
  hp.n_attrs = 2;
  hp.psi_prior_var = 1.0;
  hp.theta_prior_var = 1.0;
  const int runs = 20000;
  double freq = 0.0, mean_p = 0.0;
  for (int s = 0; s < runs; ++s) {
    const SampledNetwork net = sample_network(hp, 2, 1, 1000 + static_cast<std::uint64_t>(s));
    freq += net.snapshots.snapshots[0](0, 1);
    const Eigen::MatrixXd z = net.latent.psi[0].unaryExpr(&attribute_activation);
    std::vector<Eigen::Matrix2d> theta;
    for (int k = 0; k < hp.n_attrs; ++k)
      theta.push_back(expand_interaction_matrix(net.latent.theta_bar[0].row(k), false));
    mean_p += edge_probability(z.row(0), z.row(1), theta);
  }
  freq /= runs;
  mean_p /= runs;
  const double se = std::sqrt(mean_p * (1.0 - mean_p) / runs);
  CHECK(std::abs(freq - mean_p) < 3.0 * se + 1e-9);
}

TEST_CASE("random walk step scale matches the hyperparameters") {
  Hyperparams hp;
  hp.n_attrs = 4;
  hp.psi_step_var = 0.25;
  hp.theta_step_var = 0.04;
  hp.psi_prior_var = 1.0;
  hp.theta_prior_var = 1.0;
  const SampledNetwork net = sample_network(hp, 40, 30, 99);
  double psi_ss = 0.0, theta_ss = 0.0;
  long psi_n = 0, theta_n = 0;
  for (std::size_t t = 1; t < net.latent.psi.size(); ++t) {
    psi_ss += (net.latent.psi[t] - net.latent.psi[t - 1]).squaredNorm();
    psi_n += net.latent.psi[t].size();
    theta_ss += (net.latent.theta_bar[t] - net.latent.theta_bar[t - 1]).squaredNorm();
    theta_n += net.latent.theta_bar[t].size();
  }
  // chi-square concentration: ~4640 and ~348 dof, very loose bands
  CHECK(psi_ss / static_cast<double>(psi_n) == doctest::Approx(hp.psi_step_var).epsilon(0.15));
  CHECK(theta_ss / static_cast<double>(theta_n) == doctest::Approx(hp.theta_step_var).epsilon(0.35));
}

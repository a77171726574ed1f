#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace dlaim {

/// Model hyperparameters. Step/prior values are variances, not standard
/// deviations; all must be strictly positive.
struct Hyperparams {
  int n_attrs = 32;               // K
  double theta_step_var = 0.01;   // transition variance of the interaction vectors
  double psi_step_var = 0.01;     // transition variance of the node pre-attributes
  double theta_prior_var = 100.0; // prior variance of the t=1 interaction vectors
  double psi_prior_var = 100.0;   // prior variance of the t=1 pre-attributes
  bool directed = false;

  // Flattened interaction-matrix length: 4 entries for directed graphs,
  // 3 for undirected (symmetric) ones.
  int theta_dim() const { return directed ? 4 : 3; }

  void validate() const;  // throws std::invalid_argument
};

/// Observed data: a sequence of binary adjacency snapshots over a fixed
/// node set. No self-loops; undirected sequences are symmetric.
struct SnapshotSequence {
  int n_nodes = 0;
  bool directed = false;
  std::vector<Eigen::MatrixXd> snapshots;  // entries in {0,1}, zero diagonal

  int horizon() const { return static_cast<int>(snapshots.size()); }
  int pair_count() const {
    long n = n_nodes;
    return static_cast<int>(directed ? n * (n - 1) : n * (n - 1) / 2);
  }
  void validate() const;  // throws std::invalid_argument
};

/// One realization of the latent state over all timesteps.
struct LatentTrajectory {
  std::vector<Eigen::MatrixXd> psi;        // per t: n_nodes x K, pre-sigmoid attributes
  std::vector<Eigen::MatrixXd> theta_bar;  // per t: K x theta_dim, flattened interactions
};

struct SampledNetwork {
  SnapshotSequence snapshots;
  LatentTrajectory latent;
};

/// Numerically stable sigmoid; maps pre-attributes to (0,1).
double attribute_activation(double psi_value);

/// log(1 + exp(x)) without overflow.
double softplus(double x);

/// Flattening convention for a 2x2 interaction matrix:
///   directed:   [T(0,0), T(0,1), T(1,0), T(1,1)]
///   undirected: [T(0,0), T(0,1), T(1,1)]  with T(1,0) == T(0,1)
Eigen::Matrix2d expand_interaction_matrix(const Eigen::VectorXd& theta_bar_k, bool directed);
Eigen::VectorXd flatten_interaction_matrix(const Eigen::Matrix2d& theta, bool directed);

/// Sum over attributes of the Bernoulli-expected interaction weight:
/// each term averages the 2x2 matrix entries under independent
/// Bernoulli(z_ik), Bernoulli(z_jk) draws.
double pairwise_logit(const Eigen::VectorXd& z_i, const Eigen::VectorXd& z_j,
                      const std::vector<Eigen::Matrix2d>& theta);

/// Edge probability: sigmoid of the pairwise logit.
double edge_probability(const Eigen::VectorXd& z_i, const Eigen::VectorXd& z_j,
                        const std::vector<Eigen::Matrix2d>& theta);

/// Log density of an isotropic Gaussian with scalar variance, summed over
/// dimensions. Throws on var <= 0.
double gaussian_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, double var);

/// Generative simulator: draws the t=1 state from the priors, evolves it by
/// Gaussian random walks, and draws every edge independently. Undirected
/// mode draws each unordered pair once and mirrors it. Deterministic given
/// the seed.
SampledNetwork sample_network(const Hyperparams& hp, int n_nodes, int horizon,
                              std::uint64_t seed);

}  // namespace dlaim

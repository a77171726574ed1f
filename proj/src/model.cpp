#include "dlaim/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "dlaim/kernels.hpp"
#include "dlaim/rng.hpp"

namespace dlaim {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;
}

void Hyperparams::validate() const {
  if (n_attrs < 1) throw std::invalid_argument("Hyperparams: n_attrs must be >= 1");
  if (theta_step_var <= 0.0 || psi_step_var <= 0.0 || theta_prior_var <= 0.0 ||
      psi_prior_var <= 0.0)
    throw std::invalid_argument("Hyperparams: all variances must be strictly positive");
}

void SnapshotSequence::validate() const {
  if (n_nodes < 1) throw std::invalid_argument("SnapshotSequence: n_nodes must be >= 1");
  for (const auto& a : snapshots) {
    if (a.rows() != n_nodes || a.cols() != n_nodes)
      throw std::invalid_argument("SnapshotSequence: snapshot shape mismatch");
    for (int i = 0; i < n_nodes; ++i) {
      if (a(i, i) != 0.0)
        throw std::invalid_argument("SnapshotSequence: nonzero diagonal (self-loop)");
      for (int j = 0; j < n_nodes; ++j) {
        const double v = a(i, j);
        if (v != 0.0 && v != 1.0)
          throw std::invalid_argument("SnapshotSequence: entries must be 0 or 1");
        if (!directed && a(j, i) != v)
          throw std::invalid_argument("SnapshotSequence: undirected snapshot not symmetric");
      }
    }
  }
}

double attribute_activation(double psi_value) {
  if (psi_value >= 0.0) {
    return 1.0 / (1.0 + std::exp(-psi_value));
  }
  const double e = std::exp(psi_value);
  return e / (1.0 + e);
}

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

Eigen::Matrix2d expand_interaction_matrix(const Eigen::VectorXd& theta_bar_k, bool directed) {
  Eigen::Matrix2d t;
  if (directed) {
    if (theta_bar_k.size() != 4)
      throw std::invalid_argument("expand_interaction_matrix: directed vector must have 4 entries");
    t << theta_bar_k(0), theta_bar_k(1), theta_bar_k(2), theta_bar_k(3);
  } else {
    if (theta_bar_k.size() != 3)
      throw std::invalid_argument(
          "expand_interaction_matrix: undirected vector must have 3 entries");
    t << theta_bar_k(0), theta_bar_k(1), theta_bar_k(1), theta_bar_k(2);
  }
  return t;
}

Eigen::VectorXd flatten_interaction_matrix(const Eigen::Matrix2d& theta, bool directed) {
  if (directed) {
    Eigen::VectorXd v(4);
    v << theta(0, 0), theta(0, 1), theta(1, 0), theta(1, 1);
    return v;
  }
  if (theta(0, 1) != theta(1, 0))
    throw std::invalid_argument("flatten_interaction_matrix: undirected matrix not symmetric");
  Eigen::VectorXd v(3);
  v << theta(0, 0), theta(0, 1), theta(1, 1);
  return v;
}

double pairwise_logit(const Eigen::VectorXd& z_i, const Eigen::VectorXd& z_j,
                      const std::vector<Eigen::Matrix2d>& theta) {
  if (z_i.size() != z_j.size() || static_cast<std::size_t>(z_i.size()) != theta.size())
    throw std::invalid_argument("pairwise_logit: attribute count mismatch");
  double logit = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double zi = z_i(static_cast<int>(k));
    const double zj = z_j(static_cast<int>(k));
    const Eigen::Matrix2d& t = theta[k];
    logit += (1.0 - zi) * (1.0 - zj) * t(0, 0) + (1.0 - zi) * zj * t(0, 1) +
             zi * (1.0 - zj) * t(1, 0) + zi * zj * t(1, 1);
  }
  return logit;
}

double edge_probability(const Eigen::VectorXd& z_i, const Eigen::VectorXd& z_j,
                        const std::vector<Eigen::Matrix2d>& theta) {
  return attribute_activation(pairwise_logit(z_i, z_j, theta));
}

double gaussian_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, double var) {
  if (var <= 0.0) throw std::invalid_argument("gaussian_log_density: variance must be positive");
  if (x.size() != mean.size())
    throw std::invalid_argument("gaussian_log_density: dimension mismatch");
  const double d = static_cast<double>(x.size());
  const double quad = (x - mean).squaredNorm() / (2.0 * var);
  return -0.5 * d * (kLogTwoPi + std::log(var)) - quad;
}

SampledNetwork sample_network(const Hyperparams& hp, int n_nodes, int horizon,
                              std::uint64_t seed) {
  hp.validate();
  if (n_nodes < 2) throw std::invalid_argument("sample_network: need at least 2 nodes");
  if (horizon < 1) throw std::invalid_argument("sample_network: horizon must be >= 1");

  const int k = hp.n_attrs;
  const int d = hp.theta_dim();
  std::mt19937_64 rng(seed);

  SampledNetwork out;
  out.snapshots.n_nodes = n_nodes;
  out.snapshots.directed = hp.directed;
  out.latent.psi.reserve(horizon);
  out.latent.theta_bar.reserve(horizon);

  out.latent.psi.push_back(random_normal_matrix(rng, n_nodes, k, std::sqrt(hp.psi_prior_var)));
  out.latent.theta_bar.push_back(random_normal_matrix(rng, k, d, std::sqrt(hp.theta_prior_var)));

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < horizon; ++t) {
    const Eigen::MatrixXd z = out.latent.psi[t].unaryExpr(&attribute_activation);
    const Eigen::MatrixXd probs =
        kernels::probability_matrix(z, out.latent.theta_bar[t], hp.directed);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
    if (hp.directed) {
      for (int i = 0; i < n_nodes; ++i)
        for (int j = 0; j < n_nodes; ++j)
          if (i != j) a(i, j) = unif(rng) < probs(i, j) ? 1.0 : 0.0;
    } else {
      for (int i = 0; i < n_nodes; ++i)
        for (int j = i + 1; j < n_nodes; ++j) {
          const double e = unif(rng) < probs(i, j) ? 1.0 : 0.0;
          a(i, j) = e;
          a(j, i) = e;
        }
    }
    out.snapshots.snapshots.push_back(std::move(a));

    if (t + 1 < horizon) {
      out.latent.psi.push_back(out.latent.psi[t] +
                               random_normal_matrix(rng, n_nodes, k, std::sqrt(hp.psi_step_var)));
      out.latent.theta_bar.push_back(
          out.latent.theta_bar[t] + random_normal_matrix(rng, k, d, std::sqrt(hp.theta_step_var)));
    }
  }
  return out;
}

}  // namespace dlaim

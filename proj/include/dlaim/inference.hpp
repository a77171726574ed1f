#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlaim/autodiff.hpp"
#include "dlaim/gru.hpp"
#include "dlaim/model.hpp"
#include "dlaim/optimizer.hpp"

namespace dlaim {

/// The inference network: four GRUs (mean and log-variance, for node
/// pre-attributes and for interaction vectors) plus learnable initial hidden
/// states. The psi GRUs run one sequence per node with hidden size K; the
/// theta GRUs run one sequence per attribute with hidden size theta_dim.
/// Every GRU consumes an all-zeros input at each step, so the parameter
/// count does not depend on the training horizon.
struct InferenceNetwork {
  static constexpr int kInputDim = 1;

  int n_nodes = 0;
  int n_attrs = 0;
  bool directed = false;
  ParameterStore params;

  int theta_dim() const { return directed ? 4 : 3; }

  static InferenceNetwork create(int n_nodes, int n_attrs, bool directed, std::uint64_t seed);
};

/// Per-timestep Gaussian posterior parameters. Slice t (0-based) holds the
/// parameters for snapshot t+1; slice 0 equals the learnable initial
/// hiddens.
struct VariationalState {
  std::vector<Eigen::MatrixXd> psi_mean, psi_logvar;      // per t: N x K
  std::vector<Eigen::MatrixXd> theta_mean, theta_logvar;  // per t: K x d

  int horizon() const { return static_cast<int>(psi_mean.size()); }
};

/// One latent sample per timestep (slice 0 is ignored by the ELBO, which
/// substitutes the means there).
struct SampleSet {
  std::vector<Eigen::MatrixXd> psi;    // per t: N x K
  std::vector<Eigen::MatrixXd> theta;  // per t: K x d
};

struct ElboTerms {
  double likelihood = 0.0;
  double psi_prior = 0.0;    // prior + transition terms for psi
  double theta_prior = 0.0;  // prior + transition terms for theta
  double entropy = 0.0;
  double total() const { return likelihood + psi_prior + theta_prior + entropy; }
};

struct TrainConfig {
  double lr = 0.01;
  int n_batches = 1500;
  int batch_size = 0;  // 0 = min(N, 256)
  std::uint64_t seed = 0;
  const InferenceNetwork* warm_start = nullptr;
};

/// Runs the four GRU unrolls for `horizon` timesteps (horizon - 1 steps past
/// the learnable initial hiddens) and returns the posterior parameters.
VariationalState unroll_variational(const InferenceNetwork& net, int horizon);

/// mean + exp(0.5 * logvar) .* noise
Eigen::MatrixXd reparameterized_sample(const Eigen::MatrixXd& mean,
                                       const Eigen::MatrixXd& logvar,
                                       const Eigen::MatrixXd& noise);

/// ELBO over a node batch, with the likelihood evaluated at the provided
/// samples (means substituted at the first timestep), closed-form Gaussian
/// prior/transition terms, and the Gaussian entropy. Likelihood and psi
/// terms are rescaled to unbiased full-data estimates; theta terms are
/// never subsampled.
ElboTerms elbo_batch(const SnapshotSequence& data, const Hyperparams& hp,
                     const VariationalState& vs, const SampleSet& samples,
                     const std::vector<int>& batch_nodes);

/// Deterministic full-batch ELBO with means substituted for every sample.
ElboTerms full_elbo(const InferenceNetwork& net, const SnapshotSequence& data,
                    const Hyperparams& hp);

/// Maximizes the ELBO with Adam on the negated objective. Each iteration
/// draws a fresh uniform node batch without replacement and fresh
/// reparameterization noise. Deterministic given the seed.
InferenceNetwork train(const SnapshotSequence& data, const Hyperparams& hp,
                       const TrainConfig& config);

/// Edge-probability matrix for timestep trained_horizon + 1, computed from
/// the unrolled variational means (no sampling). Zero diagonal; exactly
/// symmetric in undirected mode.
Eigen::MatrixXd forecast(const InferenceNetwork& net, int trained_horizon);

struct Embeddings {
  std::vector<Eigen::MatrixXd> z;                        // per t: N x K, in (0,1)
  std::vector<std::vector<Eigen::Matrix2d>> theta;       // per t: K expanded matrices
};

/// Activated attributes and expanded interaction matrices from the
/// variational means.
Embeddings extract_embeddings(const InferenceNetwork& net, int horizon);

/// Tape-level building blocks used by the trainer; exposed so tests can
/// differentiate the assembled objective directly.
namespace vi {

struct NetTensors {
  GruTensors psi_mean_w, psi_logvar_w, theta_mean_w, theta_logvar_w;
  Tensor psi_mean_h0, psi_logvar_h0, theta_mean_h0, theta_logvar_h0;
  std::vector<std::pair<std::string, Tensor>> named;
  int input_dim = InferenceNetwork::kInputDim;
};

struct PosteriorTensors {
  std::vector<Tensor> psi_mean, psi_logvar;      // per t: b x K
  std::vector<Tensor> theta_mean, theta_logvar;  // per t: K x d
};

struct SampleTensors {
  std::vector<Tensor> psi, theta;
};

struct ElboTensors {
  Tensor likelihood, psi_prior, theta_prior, entropy, total;
};

NetTensors stage_network(Tape& tape, const InferenceNetwork& net);

/// batch empty = all nodes; otherwise the psi unroll runs on the gathered
/// batch rows only.
PosteriorTensors unroll_posterior(Tape& tape, const NetTensors& net, int horizon,
                                  const std::vector<int>& batch);

/// noise vectors are indexed by timestep; slot 0 is unused (the first slice
/// uses the means directly). Pass nullptr for mean substitution everywhere.
SampleTensors draw_samples(Tape& tape, const PosteriorTensors& post,
                           const std::vector<Eigen::MatrixXd>* noise_psi,
                           const std::vector<Eigen::MatrixXd>* noise_theta);

ElboTensors assemble_elbo(Tape& tape, const PosteriorTensors& post, const SampleTensors& samples,
                          const SnapshotSequence& data, const Hyperparams& hp,
                          const std::vector<int>& batch);

}  // namespace vi

}  // namespace dlaim

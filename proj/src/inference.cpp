#include "dlaim/inference.hpp"

#include <cmath>
#include <stdexcept>

#include "dlaim/kernels.hpp"
#include "dlaim/rng.hpp"

namespace dlaim {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

std::vector<int> resolve_batch(const std::vector<int>& batch, int n_nodes) {
  if (batch.empty()) {
    std::vector<int> all(static_cast<std::size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) all[static_cast<std::size_t>(i)] = i;
    return all;
  }
  for (int i : batch)
    if (i < 0 || i >= n_nodes) throw std::invalid_argument("batch node index out of range");
  return batch;
}

Eigen::MatrixXd gather_matrix_rows(const Eigen::MatrixXd& m, const std::vector<int>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = m.row(rows[r]);
  return out;
}

Eigen::MatrixXd adjacency_block(const Eigen::MatrixXd& adj, const std::vector<int>& batch) {
  const auto b = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd block(b, b);
  for (Eigen::Index r = 0; r < b; ++r)
    for (Eigen::Index c = 0; c < b; ++c)
      block(r, c) = adj(batch[static_cast<std::size_t>(r)], batch[static_cast<std::size_t>(c)]);
  return block;
}

long ordered_pairs(long n, bool directed) { return directed ? n * (n - 1) : n * (n - 1) / 2; }

}  // namespace

InferenceNetwork InferenceNetwork::create(int n_nodes, int n_attrs, bool directed,
                                          std::uint64_t seed) {
  if (n_nodes < 1) throw std::invalid_argument("n_nodes must be positive");
  if (n_attrs < 1) throw std::invalid_argument("n_attrs must be positive");
  InferenceNetwork net;
  net.n_nodes = n_nodes;
  net.n_attrs = n_attrs;
  net.directed = directed;
  const int d = net.theta_dim();
  std::mt19937_64 rng(seed);
  register_gru(net.params, "psi_mean", GruParams::init(n_attrs, kInputDim, n_nodes, rng));
  register_gru(net.params, "psi_logvar", GruParams::init(n_attrs, kInputDim, n_nodes, rng));
  register_gru(net.params, "theta_mean", GruParams::init(d, kInputDim, n_attrs, rng));
  register_gru(net.params, "theta_logvar", GruParams::init(d, kInputDim, n_attrs, rng));
  return net;
}

namespace vi {

NetTensors stage_network(Tape& tape, const InferenceNetwork& net) {
  NetTensors staged;
  staged.psi_mean_w = stage_gru(tape, net.params, "psi_mean", staged.named);
  staged.psi_logvar_w = stage_gru(tape, net.params, "psi_logvar", staged.named);
  staged.theta_mean_w = stage_gru(tape, net.params, "theta_mean", staged.named);
  staged.theta_logvar_w = stage_gru(tape, net.params, "theta_logvar", staged.named);
  auto stage_h0 = [&](const std::string& name) {
    Tensor t = tape.leaf(net.params.at(name));
    staged.named.emplace_back(name, t);
    return t;
  };
  staged.psi_mean_h0 = stage_h0("psi_mean.h0");
  staged.psi_logvar_h0 = stage_h0("psi_logvar.h0");
  staged.theta_mean_h0 = stage_h0("theta_mean.h0");
  staged.theta_logvar_h0 = stage_h0("theta_logvar.h0");
  staged.input_dim = static_cast<int>(net.params.at("psi_mean.update_x").cols());
  return staged;
}

PosteriorTensors unroll_posterior(Tape& tape, const NetTensors& net, int horizon,
                                  const std::vector<int>& batch) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  auto unroll = [&](const GruTensors& w, Tensor h0, bool node_indexed) {
    Tensor first = h0;
    if (node_indexed && !batch.empty()) first = tape.gather_rows(h0, batch);
    std::vector<Tensor> slices;
    slices.reserve(static_cast<std::size_t>(horizon));
    slices.push_back(first);
    if (horizon > 1) {
      std::vector<Tensor> hidden =
          gru_unroll_zero_input(tape, w, first, horizon - 1, net.input_dim);
      slices.insert(slices.end(), hidden.begin(), hidden.end());
    }
    return slices;
  };
  PosteriorTensors post;
  post.psi_mean = unroll(net.psi_mean_w, net.psi_mean_h0, true);
  post.psi_logvar = unroll(net.psi_logvar_w, net.psi_logvar_h0, true);
  post.theta_mean = unroll(net.theta_mean_w, net.theta_mean_h0, false);
  post.theta_logvar = unroll(net.theta_logvar_w, net.theta_logvar_h0, false);
  return post;
}

SampleTensors draw_samples(Tape& tape, const PosteriorTensors& post,
                           const std::vector<Eigen::MatrixXd>* noise_psi,
                           const std::vector<Eigen::MatrixXd>* noise_theta) {
  const std::size_t horizon = post.psi_mean.size();
  auto draw = [&](const std::vector<Tensor>& mean, const std::vector<Tensor>& logvar,
                  const std::vector<Eigen::MatrixXd>* noise) {
    std::vector<Tensor> samples;
    samples.reserve(horizon);
    samples.push_back(mean[0]);  // first slice: mean substitution
    for (std::size_t t = 1; t < horizon; ++t) {
      if (noise == nullptr) {
        samples.push_back(mean[t]);
        continue;
      }
      if (noise->size() <= t) throw std::invalid_argument("missing noise slice");
      Tensor stddev = tape.exp(tape.scale(logvar[t], 0.5));
      samples.push_back(tape.add(mean[t], tape.mul(stddev, tape.leaf((*noise)[t]))));
    }
    return samples;
  };
  SampleTensors out;
  out.psi = draw(post.psi_mean, post.psi_logvar, noise_psi);
  out.theta = draw(post.theta_mean, post.theta_logvar, noise_theta);
  return out;
}

ElboTensors assemble_elbo(Tape& tape, const PosteriorTensors& post, const SampleTensors& samples,
                          const SnapshotSequence& data, const Hyperparams& hp,
                          const std::vector<int>& batch) {
  const int horizon = static_cast<int>(post.psi_mean.size());
  if (horizon != data.horizon()) throw std::invalid_argument("posterior horizon != data horizon");
  const std::vector<int> nodes = resolve_batch(batch, data.n_nodes);
  const auto b = static_cast<long>(nodes.size());
  if (b < 2) throw std::invalid_argument("need at least two batch nodes");
  const double like_scale = static_cast<double>(ordered_pairs(data.n_nodes, data.directed)) /
                            static_cast<double>(ordered_pairs(b, data.directed));
  const double psi_scale = static_cast<double>(data.n_nodes) / static_cast<double>(b);
  const int n_attrs = static_cast<int>(tape.value(post.psi_mean[0]).cols());
  const int theta_dim = static_cast<int>(tape.value(post.theta_mean[0]).cols());
  const double psi_count = static_cast<double>(b) * n_attrs;
  const double theta_count = static_cast<double>(n_attrs) * theta_dim;

  // Likelihood at the samples, rescaled to the full pair count.
  Tensor likelihood;
  for (int t = 0; t < horizon; ++t) {
    Tensor term = tape.edge_loglik(samples.psi[static_cast<std::size_t>(t)],
                                   samples.theta[static_cast<std::size_t>(t)],
                                   adjacency_block(data.snapshots[static_cast<std::size_t>(t)], nodes),
                                   data.directed, like_scale);
    likelihood = (t == 0) ? term : tape.add(likelihood, term);
  }

  // Closed-form Gaussian prior + transition expectations. For a diagonal
  // Gaussian q = N(m, diag(v)) and a zero-mean isotropic prior with variance
  // s, E_q[log p] = -0.5 * (sum(m^2) + sum(v)) / s - 0.5 * count * log(2 pi s);
  // transitions replace sum(m^2) with sum((m_t - m_{t-1})^2) and add both
  // slices' variances.
  auto prior_chain = [&](const std::vector<Tensor>& mean, const std::vector<Tensor>& logvar,
                         double prior_var, double step_var, double count) {
    std::vector<Tensor> var(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t)
      var[static_cast<std::size_t>(t)] = tape.exp(logvar[static_cast<std::size_t>(t)]);
    Tensor quad0 = tape.add(tape.sum(tape.mul(mean[0], mean[0])), tape.sum(var[0]));
    Tensor total = tape.add_const(tape.scale(quad0, -0.5 / prior_var),
                                  -0.5 * count * (kLogTwoPi + std::log(prior_var)));
    for (int t = 1; t < horizon; ++t) {
      const auto u = static_cast<std::size_t>(t);
      Tensor diff = tape.sub(mean[u], mean[u - 1]);
      Tensor quad = tape.add(tape.sum(tape.mul(diff, diff)),
                             tape.add(tape.sum(var[u]), tape.sum(var[u - 1])));
      Tensor term = tape.add_const(tape.scale(quad, -0.5 / step_var),
                                   -0.5 * count * (kLogTwoPi + std::log(step_var)));
      total = tape.add(total, term);
    }
    return total;
  };

  // Gaussian entropy: 0.5 * sum(1 + log(2 pi) + logvar) per slice.
  auto entropy_chain = [&](const std::vector<Tensor>& logvar, double count) {
    Tensor total;
    for (int t = 0; t < horizon; ++t) {
      Tensor term = tape.add_const(tape.scale(tape.sum(logvar[static_cast<std::size_t>(t)]), 0.5),
                                   0.5 * count * (1.0 + kLogTwoPi));
      total = (t == 0) ? term : tape.add(total, term);
    }
    return total;
  };

  ElboTensors elbo;
  elbo.likelihood = likelihood;
  elbo.psi_prior = tape.scale(
      prior_chain(post.psi_mean, post.psi_logvar, hp.psi_prior_var, hp.psi_step_var, psi_count),
      psi_scale);
  elbo.theta_prior = prior_chain(post.theta_mean, post.theta_logvar, hp.theta_prior_var,
                                 hp.theta_step_var, theta_count);
  elbo.entropy = tape.add(tape.scale(entropy_chain(post.psi_logvar, psi_count), psi_scale),
                          entropy_chain(post.theta_logvar, theta_count));
  elbo.total = tape.add(elbo.likelihood,
                        tape.add(elbo.psi_prior, tape.add(elbo.theta_prior, elbo.entropy)));
  return elbo;
}

}  // namespace vi

VariationalState unroll_variational(const InferenceNetwork& net, int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  Tape tape;
  vi::NetTensors staged = vi::stage_network(tape, net);
  vi::PosteriorTensors post = vi::unroll_posterior(tape, staged, horizon, {});
  VariationalState vs;
  auto copy = [&](const std::vector<Tensor>& src, std::vector<Eigen::MatrixXd>& dst) {
    dst.reserve(src.size());
    for (Tensor t : src) dst.push_back(tape.value(t));
  };
  copy(post.psi_mean, vs.psi_mean);
  copy(post.psi_logvar, vs.psi_logvar);
  copy(post.theta_mean, vs.theta_mean);
  copy(post.theta_logvar, vs.theta_logvar);
  return vs;
}

Eigen::MatrixXd reparameterized_sample(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& logvar,
                                       const Eigen::MatrixXd& noise) {
  if (mean.rows() != logvar.rows() || mean.cols() != logvar.cols() || mean.rows() != noise.rows() ||
      mean.cols() != noise.cols())
    throw std::invalid_argument("reparameterized_sample: shape mismatch");
  return mean.array() + (0.5 * logvar.array()).exp() * noise.array();
}

ElboTerms elbo_batch(const SnapshotSequence& data, const Hyperparams& hp,
                     const VariationalState& vs, const SampleSet& samples,
                     const std::vector<int>& batch_nodes) {
  const int horizon = data.horizon();
  if (vs.horizon() != horizon) throw std::invalid_argument("state horizon != data horizon");
  const std::vector<int> nodes = resolve_batch(batch_nodes, data.n_nodes);
  const auto b = static_cast<long>(nodes.size());
  if (b < 2) throw std::invalid_argument("need at least two batch nodes");
  const double like_scale = static_cast<double>(ordered_pairs(data.n_nodes, data.directed)) /
                            static_cast<double>(ordered_pairs(b, data.directed));
  const double psi_scale = static_cast<double>(data.n_nodes) / static_cast<double>(b);
  const int n_attrs = static_cast<int>(vs.psi_mean[0].cols());
  const int theta_dim = static_cast<int>(vs.theta_mean[0].cols());
  const double psi_count = static_cast<double>(b) * n_attrs;
  const double theta_count = static_cast<double>(n_attrs) * theta_dim;

  ElboTerms elbo;
  for (int t = 0; t < horizon; ++t) {
    const auto u = static_cast<std::size_t>(t);
    const Eigen::MatrixXd& psi_full = (t == 0) ? vs.psi_mean[u] : samples.psi[u];
    const Eigen::MatrixXd& theta = (t == 0) ? vs.theta_mean[u] : samples.theta[u];
    elbo.likelihood += kernels::pair_loglik(gather_matrix_rows(psi_full, nodes), theta,
                                            adjacency_block(data.snapshots[u], nodes),
                                            data.directed, like_scale);
  }

  auto prior_chain = [&](const std::vector<Eigen::MatrixXd>& mean_full,
                         const std::vector<Eigen::MatrixXd>& logvar_full, bool node_indexed,
                         double prior_var, double step_var, double count) {
    std::vector<Eigen::MatrixXd> mean(static_cast<std::size_t>(horizon));
    std::vector<Eigen::MatrixXd> var(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t) {
      const auto u = static_cast<std::size_t>(t);
      mean[u] = node_indexed ? gather_matrix_rows(mean_full[u], nodes) : mean_full[u];
      var[u] = (node_indexed ? gather_matrix_rows(logvar_full[u], nodes) : logvar_full[u])
                   .array()
                   .exp();
    }
    double total = -0.5 * (mean[0].squaredNorm() + var[0].sum()) / prior_var -
                   0.5 * count * (kLogTwoPi + std::log(prior_var));
    for (int t = 1; t < horizon; ++t) {
      const auto u = static_cast<std::size_t>(t);
      const double quad = (mean[u] - mean[u - 1]).squaredNorm() + var[u].sum() + var[u - 1].sum();
      total += -0.5 * quad / step_var - 0.5 * count * (kLogTwoPi + std::log(step_var));
    }
    return total;
  };

  auto entropy_chain = [&](const std::vector<Eigen::MatrixXd>& logvar_full, bool node_indexed,
                           double count) {
    double total = 0.0;
    for (int t = 0; t < horizon; ++t) {
      const auto u = static_cast<std::size_t>(t);
      const double lv_sum =
          node_indexed ? gather_matrix_rows(logvar_full[u], nodes).sum() : logvar_full[u].sum();
      total += 0.5 * lv_sum + 0.5 * count * (1.0 + kLogTwoPi);
    }
    return total;
  };

  elbo.psi_prior = psi_scale * prior_chain(vs.psi_mean, vs.psi_logvar, true, hp.psi_prior_var,
                                           hp.psi_step_var, psi_count);
  elbo.theta_prior = prior_chain(vs.theta_mean, vs.theta_logvar, false, hp.theta_prior_var,
                                 hp.theta_step_var, theta_count);
  elbo.entropy = psi_scale * entropy_chain(vs.psi_logvar, true, psi_count) +
                 entropy_chain(vs.theta_logvar, false, theta_count);
  return elbo;
}

ElboTerms full_elbo(const InferenceNetwork& net, const SnapshotSequence& data,
                    const Hyperparams& hp) {
  data.validate();
  VariationalState vs = unroll_variational(net, data.horizon());
  SampleSet means;
  means.psi = vs.psi_mean;
  means.theta = vs.theta_mean;
  return elbo_batch(data, hp, vs, means, {});
}

InferenceNetwork train(const SnapshotSequence& data, const Hyperparams& hp,
                       const TrainConfig& config) {
  data.validate();
  hp.validate();
  if (hp.directed != data.directed)
    throw std::invalid_argument("hyperparameter directedness != data directedness");
  if (data.horizon() < 1) throw std::invalid_argument("need at least one snapshot");
  if (data.n_nodes < 2) throw std::invalid_argument("need at least two nodes");
  if (config.lr <= 0.0) throw std::invalid_argument("lr must be positive");
  if (config.n_batches < 1) throw std::invalid_argument("n_batches must be positive");
  const int n = data.n_nodes;
  const int batch_size = config.batch_size == 0 ? std::min(n, 256) : config.batch_size;
  if (batch_size < 2 || batch_size > n)
    throw std::invalid_argument("batch_size must be in [2, n_nodes]");

  InferenceNetwork net;
  if (config.warm_start != nullptr) {
    const InferenceNetwork& prev = *config.warm_start;
    if (prev.n_nodes != n || prev.n_attrs != hp.n_attrs || prev.directed != hp.directed)
      throw std::invalid_argument("warm start network shape mismatch");
    net = prev;
  } else {
    net = InferenceNetwork::create(n, hp.n_attrs, hp.directed, mix_seed(config.seed, 0));
  }

  const int horizon = data.horizon();
  const int n_attrs = hp.n_attrs;
  const int theta_dim = hp.theta_dim();
  std::mt19937_64 batch_rng(mix_seed(config.seed, 1));
  std::mt19937_64 noise_rng(mix_seed(config.seed, 2));
  AdamOptimizer adam({config.lr, 0.9, 0.999, 1e-8});
  Tape tape;
  for (int iter = 0; iter < config.n_batches; ++iter) {
    tape.reset();
    std::vector<int> batch = sample_without_replacement(batch_rng, n, batch_size);
    std::vector<Eigen::MatrixXd> noise_psi(static_cast<std::size_t>(horizon));
    std::vector<Eigen::MatrixXd> noise_theta(static_cast<std::size_t>(horizon));
    for (int t = 1; t < horizon; ++t)
      noise_psi[static_cast<std::size_t>(t)] = random_normal_matrix(noise_rng, batch_size, n_attrs);
    for (int t = 1; t < horizon; ++t)
      noise_theta[static_cast<std::size_t>(t)] = random_normal_matrix(noise_rng, n_attrs, theta_dim);

    vi::NetTensors staged = vi::stage_network(tape, net);
    vi::PosteriorTensors post = vi::unroll_posterior(tape, staged, horizon, batch);
    vi::SampleTensors samples = vi::draw_samples(tape, post, &noise_psi, &noise_theta);
    vi::ElboTensors elbo = vi::assemble_elbo(tape, post, samples, data, hp, batch);
    tape.backward(tape.scale(elbo.total, -1.0));

    GradientMap grads;
    for (const auto& [name, tensor] : staged.named) grads[name] = tape.grad(tensor);
    adam.step(net.params, grads);
  }
  return net;
}

Eigen::MatrixXd forecast(const InferenceNetwork& net, int trained_horizon) {
  if (trained_horizon < 1) throw std::invalid_argument("trained_horizon must be >= 1");
  VariationalState vs = unroll_variational(net, trained_horizon + 1);
  const auto last = static_cast<std::size_t>(trained_horizon);
  const Eigen::MatrixXd z = vs.psi_mean[last].unaryExpr([](double v) {
    return attribute_activation(v);
  });
  return kernels::probability_matrix(z, vs.theta_mean[last], net.directed);
}

Embeddings extract_embeddings(const InferenceNetwork& net, int horizon) {
  VariationalState vs = unroll_variational(net, horizon);
  Embeddings out;
  out.z.reserve(static_cast<std::size_t>(horizon));
  out.theta.reserve(static_cast<std::size_t>(horizon));
  for (int t = 0; t < horizon; ++t) {
    const auto u = static_cast<std::size_t>(t);
    out.z.push_back(
        vs.psi_mean[u].unaryExpr([](double v) { return attribute_activation(v); }));
    std::vector<Eigen::Matrix2d> mats;
    mats.reserve(static_cast<std::size_t>(net.n_attrs));
    for (int k = 0; k < net.n_attrs; ++k)
      mats.push_back(expand_interaction_matrix(vs.theta_mean[u].row(k), net.directed));
    out.theta.push_back(std::move(mats));
  }
  return out;
}

}  // namespace dlaim

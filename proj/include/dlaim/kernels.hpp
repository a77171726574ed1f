#pragma once

#include <Eigen/Dense>

namespace dlaim::kernels {

/// Execution policy for the pairwise kernels. The serial path is the
/// reference implementation; both paths use identical per-row partials and a
/// fixed pairwise-tree reduction in index order, so results are bit-identical
/// regardless of policy or thread count.
enum class Exec { kSerial, kParallel };

/// Bernoulli log-likelihood of the observed adjacency block under the edge
/// model, summed over ordered pairs i != j (directed) or unordered pairs
/// i < j (undirected), times `weight`. `psi` holds pre-sigmoid attributes
/// (rows = nodes of the block); `theta_bar` is the flattened K x d
/// interaction stack.
double pair_loglik(const Eigen::MatrixXd& psi, const Eigen::MatrixXd& theta_bar,
                   const Eigen::MatrixXd& adj, bool directed, double weight,
                   Exec exec = Exec::kParallel);

/// Accumulates upstream * weight * d(loglik)/d(psi, theta_bar) into the
/// gradient buffers (which must be pre-sized and may hold prior content).
void pair_loglik_grad(const Eigen::MatrixXd& psi, const Eigen::MatrixXd& theta_bar,
                      const Eigen::MatrixXd& adj, bool directed, double weight,
                      double upstream, Eigen::MatrixXd& grad_psi,
                      Eigen::MatrixXd& grad_theta, Exec exec = Exec::kParallel);

/// Full edge-probability matrix from activated attributes z (N x K) and the
/// flattened interaction stack. Zero diagonal; exactly symmetric when
/// undirected (upper triangle mirrored).
Eigen::MatrixXd probability_matrix(const Eigen::MatrixXd& z, const Eigen::MatrixXd& theta_bar,
                                   bool directed, Exec exec = Exec::kParallel);

/// Pairwise-logit matrix (the sum inside the sigmoid); zero diagonal,
/// mirrored when undirected.
Eigen::MatrixXd logit_matrix(const Eigen::MatrixXd& z, const Eigen::MatrixXd& theta_bar,
                             bool directed, Exec exec = Exec::kParallel);

/// Fixed-order pairwise tree reduction; the summation order every kernel
/// reduction uses.
double tree_reduce(const double* values, int count);

}  // namespace dlaim::kernels

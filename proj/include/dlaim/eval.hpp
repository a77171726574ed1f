#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dlaim/model.hpp"

namespace dlaim {

/// Area under the ROC curve by the rank statistic (Mann-Whitney), with ties
/// getting half credit. Throws if either class is empty.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

/// Smoothed per-pair edge frequency over the observed snapshots:
/// (occurrence count + 1) / (horizon + 2). Zero diagonal.
Eigen::MatrixXd bas_baseline(const SnapshotSequence& data);

/// AUC of a probability (or any monotone score) matrix against a held-out
/// adjacency snapshot, over ordered pairs i != j (directed) or unordered
/// pairs i < j (undirected).
double evaluate_forecast(const Eigen::MatrixXd& prob, const Eigen::MatrixXd& adj, bool directed);

/// Pairwise-logit score matrix for community detection, with the diagonal
/// filled with the off-diagonal mean so it carries no information.
Eigen::MatrixXd score_matrix(const Eigen::MatrixXd& z, const Eigen::MatrixXd& theta_bar,
                             bool directed);

struct CommunityResult {
  std::vector<int> assignments;   // per node, in [0, n_clusters)
  Eigen::MatrixXd embedding;      // row-normalized spectral embedding (N x C)
  double inertia = 0.0;           // k-means objective of the returned labeling
};

/// Spectral clustering of a score matrix: shift by the off-diagonal mean,
/// exponentiate into an affinity, symmetrize, take the C eigenvectors of the
/// normalized Laplacian with the smallest eigenvalues, row-normalize, and run
/// seeded k-means++ (20 restarts, best inertia kept). Deterministic given the
/// seed.
CommunityResult community_detect(const Eigen::MatrixXd& scores, int n_clusters,
                                 std::uint64_t seed);

}  // namespace dlaim

#include "dlaim/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dlaim/kernels.hpp"
#include "dlaim/rng.hpp"

namespace dlaim {

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auc: size mismatch");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int label : labels) {
    if (label != 0 && label != 1) throw std::invalid_argument("auc: labels must be 0/1");
    n_pos += static_cast<std::size_t>(label);
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("auc: need both positive and negative examples");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Fractional ranks: tied scores share the average of their rank range.
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k)
      if (labels[order[k]] == 1) pos_rank_sum += rank;
    i = j + 1;
  }
  const double n_pos_d = static_cast<double>(n_pos);
  return (pos_rank_sum - n_pos_d * (n_pos_d + 1.0) / 2.0) /
         (n_pos_d * static_cast<double>(n_neg));
}

Eigen::MatrixXd bas_baseline(const SnapshotSequence& data) {
  if (data.horizon() < 1) throw std::invalid_argument("bas_baseline: no snapshots");
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(data.n_nodes, data.n_nodes);
  for (const Eigen::MatrixXd& snap : data.snapshots) counts += snap;
  Eigen::MatrixXd prob =
      (counts.array() + 1.0) / (static_cast<double>(data.horizon()) + 2.0);
  prob.diagonal().setZero();
  return prob;
}

double evaluate_forecast(const Eigen::MatrixXd& prob, const Eigen::MatrixXd& adj, bool directed) {
  const Eigen::Index n = prob.rows();
  if (prob.cols() != n || adj.rows() != n || adj.cols() != n)
    throw std::invalid_argument("evaluate_forecast: shape mismatch");
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(static_cast<std::size_t>(n * (n - 1)));
  labels.reserve(scores.capacity());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = directed ? 0 : i + 1; j < n; ++j) {
      if (i == j) continue;
      scores.push_back(prob(i, j));
      labels.push_back(adj(i, j) != 0.0 ? 1 : 0);
    }
  }
  return auc(scores, labels);
}

Eigen::MatrixXd score_matrix(const Eigen::MatrixXd& z, const Eigen::MatrixXd& theta_bar,
                             bool directed) {
  Eigen::MatrixXd s = kernels::logit_matrix(z, theta_bar, directed);
  const Eigen::Index n = s.rows();
  if (n > 1) {
    const double off_mean = s.sum() / static_cast<double>(n * (n - 1));
    s.diagonal().setConstant(off_mean);
  }
  return s;
}

namespace {

double off_diagonal_mean(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  if (n < 2) return 0.0;
  return (m.sum() - m.diagonal().sum()) / static_cast<double>(n * (n - 1));
}

struct KmeansRun {
  std::vector<int> labels;
  double inertia = std::numeric_limits<double>::infinity();
};

KmeansRun kmeans_once(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centers(k, points.cols());
  std::uniform_int_distribution<Eigen::Index> pick_first(0, n - 1);
  centers.row(0) = points.row(pick_first(rng));

  // k-means++ seeding: each next center drawn with probability proportional
  // to squared distance from the nearest existing center.
  Eigen::VectorXd dist2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      double target = unit(rng) * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= dist2(i);
        if (target <= 0.0) {
          chosen = i;
          break;
        }
        chosen = i;
      }
    } else {
      chosen = pick_first(rng);
    }
    centers.row(c) = points.row(chosen);
    dist2 = dist2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  KmeansRun run;
  run.labels.assign(static_cast<std::size_t>(n), 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (run.labels[static_cast<std::size_t>(i)] != best) {
        run.labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(run.labels[static_cast<std::size_t>(i)]) += points.row(i);
      counts(run.labels[static_cast<std::size_t>(i)]) += 1.0;
    }
    for (int c = 0; c < k; ++c) {
      if (counts(c) > 0.0) {
        centers.row(c) = sums.row(c) / counts(c);
      } else {
        // Empty cluster: restart it at the point farthest from its center.
        Eigen::Index far = 0;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double d =
              (points.row(i) - centers.row(run.labels[static_cast<std::size_t>(i)])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centers.row(c) = points.row(far);
      }
    }
  }

  run.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    run.inertia += (points.row(i) - centers.row(run.labels[static_cast<std::size_t>(i)])).squaredNorm();
  return run;
}

}  // namespace

CommunityResult community_detect(const Eigen::MatrixXd& scores, int n_clusters,
                                 std::uint64_t seed) {
  const Eigen::Index n = scores.rows();
  if (scores.cols() != n) throw std::invalid_argument("community_detect: scores must be square");
  if (n_clusters < 1 || n_clusters > n)
    throw std::invalid_argument("community_detect: bad cluster count");

  // Affinity: exponentiated mean-shifted scores, symmetrized.
  Eigen::MatrixXd w = ((scores.array() - off_diagonal_mean(scores)).exp()).matrix();
  w = 0.5 * (w + w.transpose());

  Eigen::VectorXd degree = w.rowwise().sum();
  Eigen::VectorXd inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i)
    inv_sqrt(i) = degree(i) > 0.0 ? 1.0 / std::sqrt(degree(i)) : 0.0;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n) -
                        (inv_sqrt.asDiagonal() * w * inv_sqrt.asDiagonal());
  lap = 0.5 * (lap + lap.transpose());  // keep the solver's input exactly symmetric

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("community_detect: eigensolver failed to converge");
  // Eigenvalues come back ascending, so the first C columns span the bottom
  // of the spectrum.
  Eigen::MatrixXd embedding = solver.eigenvectors().leftCols(n_clusters);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }

  CommunityResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < 20; ++restart) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(restart)));
    KmeansRun run = kmeans_once(embedding, n_clusters, rng);
    if (run.inertia < best.inertia) {
      best.inertia = run.inertia;
      best.assignments = std::move(run.labels);
    }
  }
  best.embedding = std::move(embedding);
  return best;
}

}  // namespace dlaim

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "dlaim/model.hpp"

// Independent oracles and helpers shared by the test suites. These
// deliberately use different code shapes from the library (naive loops,
// direct formulas) so agreement is evidence, not tautology.
namespace testutil {

inline double ref_sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Expected interaction weight by explicit enumeration of the four Bernoulli
// outcomes per attribute.
inline double enumerated_logit(const Eigen::VectorXd& zi, const Eigen::VectorXd& zj,
                               const std::vector<Eigen::Matrix2d>& theta) {
  double acc = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        const double px = x == 1 ? zi(static_cast<int>(k)) : 1.0 - zi(static_cast<int>(k));
        const double py = y == 1 ? zj(static_cast<int>(k)) : 1.0 - zj(static_cast<int>(k));
        acc += px * py * theta[k](x, y);
      }
    }
  }
  return acc;
}

// O(P^2) AUC: fraction of (positive, negative) pairs ranked correctly, ties
// worth half.
inline double brute_force_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double credit = 0.0;
  long pairs = 0;
  for (std::size_t p = 0; p < scores.size(); ++p) {
    if (labels[p] != 1) continue;
    for (std::size_t q = 0; q < scores.size(); ++q) {
      if (labels[q] != 0) continue;
      ++pairs;
      if (scores[p] > scores[q])
        credit += 1.0;
      else if (scores[p] == scores[q])
        credit += 0.5;
    }
  }
  return credit / static_cast<double>(pairs);
}

inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  const auto n = a.size();
  std::map<std::pair<int, int>, long> cell;
  std::map<int, long> row, col;
  for (std::size_t i = 0; i < n; ++i) {
    ++cell[{a[i], b[i]}];
    ++row[a[i]];
    ++col[b[i]];
  }
  auto choose2 = [](long m) { return 0.5 * static_cast<double>(m) * static_cast<double>(m - 1); };
  double sum_cell = 0.0, sum_row = 0.0, sum_col = 0.0;
  for (const auto& [key, count] : cell) sum_cell += choose2(count);
  for (const auto& [key, count] : row) sum_row += choose2(count);
  for (const auto& [key, count] : col) sum_col += choose2(count);
  const double total = choose2(static_cast<long>(n));
  const double expected = sum_row * sum_col / total;
  const double max_index = 0.5 * (sum_row + sum_col);
  if (max_index == expected) return 1.0;  // both partitions trivial
  return (sum_cell - expected) / (max_index - expected);
}

// Random binary snapshot sequence with roughly the given density.
inline dlaim::SnapshotSequence random_snapshots(int n_nodes, int horizon, bool directed,
                                                std::uint64_t seed, double density = 0.3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  dlaim::SnapshotSequence seq;
  seq.n_nodes = n_nodes;
  seq.directed = directed;
  for (int t = 0; t < horizon; ++t) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      for (int j = directed ? 0 : i + 1; j < n_nodes; ++j) {
        if (i == j) continue;
        const double e = unit(rng) < density ? 1.0 : 0.0;
        a(i, j) = e;
        if (!directed) a(j, i) = e;
      }
    }
    seq.snapshots.push_back(std::move(a));
  }
  return seq;
}

}  // namespace testutil

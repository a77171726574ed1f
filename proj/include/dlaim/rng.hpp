#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace dlaim {

// splitmix64 step; used to derive independent sub-seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Fills row-major so the draw order is independent of Eigen's storage order.
inline Eigen::MatrixXd random_normal_matrix(std::mt19937_64& rng, int rows, int cols,
                                            double stddev = 1.0) {
  std::normal_distribution<double> normal(0.0, stddev);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = normal(rng);
  return m;
}

inline Eigen::MatrixXd random_uniform_matrix(std::mt19937_64& rng, int rows, int cols,
                                             double lo, double hi) {
  std::uniform_real_distribution<double> uniform(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = uniform(rng);
  return m;
}

// k distinct indices from {0..n-1}, ascending. Partial Fisher-Yates, then sort.
std::vector<int> sample_without_replacement(std::mt19937_64& rng, int n, int k);

}  // namespace dlaim

#include "dlaim/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dlaim/model.hpp"

namespace dlaim::kernels {

namespace {

template <class F>
void for_each_index(int n, Exec exec, F&& body) {
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) body(i);
  } else {
    for (int i = 0; i < n; ++i) body(i);
  }
}

// theta_bar row k expanded on the fly: directed rows are [t00,t01,t10,t11],
// undirected rows are [t00,t01,t11] with t10 == t01.
inline double pair_logit_flat(const Eigen::MatrixXd& z, const Eigen::MatrixXd& theta_bar,
                              bool directed, int i, int j) {
  const int k_attrs = static_cast<int>(z.cols());
  double logit = 0.0;
  for (int k = 0; k < k_attrs; ++k) {
    const double zi = z(i, k);
    const double zj = z(j, k);
    const double t00 = theta_bar(k, 0);
    const double t01 = theta_bar(k, 1);
    const double t10 = directed ? theta_bar(k, 2) : theta_bar(k, 1);
    const double t11 = directed ? theta_bar(k, 3) : theta_bar(k, 2);
    logit += (1.0 - zi) * (1.0 - zj) * t00 + (1.0 - zi) * zj * t01 + zi * (1.0 - zj) * t10 +
             zi * zj * t11;
  }
  return logit;
}

inline double bernoulli_loglik(double a, double logit) {
  // a*log(p) + (1-a)*log(1-p) with p = sigmoid(logit)
  return a * logit - softplus(logit);
}

Eigen::MatrixXd activate(const Eigen::MatrixXd& psi, Exec exec) {
  Eigen::MatrixXd z(psi.rows(), psi.cols());
  const int cols = static_cast<int>(psi.cols());
  for_each_index(static_cast<int>(psi.rows()), exec, [&](int r) {
    for (int c = 0; c < cols; ++c) z(r, c) = attribute_activation(psi(r, c));
  });
  return z;
}

Eigen::MatrixXd tree_reduce_mats(const std::vector<Eigen::MatrixXd>& mats, int lo, int hi) {
  if (hi - lo == 1) return mats[lo];
  const int mid = lo + (hi - lo) / 2;
  return tree_reduce_mats(mats, lo, mid) + tree_reduce_mats(mats, mid, hi);
}

void check_pair_args(const Eigen::MatrixXd& psi, const Eigen::MatrixXd& theta_bar,
                     const Eigen::MatrixXd& adj, bool directed) {
  if (adj.rows() != psi.rows() || adj.cols() != psi.rows())
    throw std::invalid_argument("pair kernel: adjacency block does not match node count");
  if (theta_bar.rows() != psi.cols())
    throw std::invalid_argument("pair kernel: theta row count must equal attribute count");
  if (theta_bar.cols() != (directed ? 4 : 3))
    throw std::invalid_argument("pair kernel: theta width does not match directedness");
}

}  // namespace

double tree_reduce(const double* values, int count) {
  if (count <= 0) return 0.0;
  if (count == 1) return values[0];
  const int mid = count / 2;
  return tree_reduce(values, mid) + tree_reduce(values + mid, count - mid);
}

double pair_loglik(const Eigen::MatrixXd& psi, const Eigen::MatrixXd& theta_bar,
                   const Eigen::MatrixXd& adj, bool directed, double weight, Exec exec) {
  check_pair_args(psi, theta_bar, adj, directed);
  const int n = static_cast<int>(psi.rows());
  const Eigen::MatrixXd z = activate(psi, exec);

  std::vector<double> partials(static_cast<std::size_t>(n), 0.0);
  for_each_index(n, exec, [&](int i) {
    double acc = 0.0;
    const int j_begin = directed ? 0 : i + 1;
    for (int j = j_begin; j < n; ++j) {
      if (j == i) continue;
      acc += bernoulli_loglik(adj(i, j), pair_logit_flat(z, theta_bar, directed, i, j));
    }
    partials[static_cast<std::size_t>(i)] = acc;
  });
  return weight * tree_reduce(partials.data(), n);
}

void pair_loglik_grad(const Eigen::MatrixXd& psi, const Eigen::MatrixXd& theta_bar,
                      const Eigen::MatrixXd& adj, bool directed, double weight, double upstream,
                      Eigen::MatrixXd& grad_psi, Eigen::MatrixXd& grad_theta, Exec exec) {
  check_pair_args(psi, theta_bar, adj, directed);
  if (grad_psi.rows() != psi.rows() || grad_psi.cols() != psi.cols() ||
      grad_theta.rows() != theta_bar.rows() || grad_theta.cols() != theta_bar.cols())
    throw std::invalid_argument("pair_loglik_grad: gradient buffer shape mismatch");

  const int n = static_cast<int>(psi.rows());
  const int k_attrs = static_cast<int>(psi.cols());
  const double coeff = weight * upstream;
  const Eigen::MatrixXd z = activate(psi, exec);

  // Each node's psi-gradient is owned by one loop index, so accumulation
  // order is independent of the thread count.
  for_each_index(n, exec, [&](int i) {
    for (int m = 0; m < n; ++m) {
      if (m == i) continue;
      if (!directed) {
        // unordered pair {i,m}; symmetric theta makes both roles identical
        const double res =
            adj(i, m) - attribute_activation(pair_logit_flat(z, theta_bar, directed, i, m));
        for (int k = 0; k < k_attrs; ++k) {
          const double zm = z(m, k);
          const double t00 = theta_bar(k, 0), t01 = theta_bar(k, 1), t11 = theta_bar(k, 2);
          const double dlogit_dz = (1.0 - zm) * (t01 - t00) + zm * (t11 - t01);
          const double zi = z(i, k);
          grad_psi(i, k) += coeff * res * dlogit_dz * zi * (1.0 - zi);
        }
      } else {
        // ordered pair (i,m): node i is the source
        const double res_out =
            adj(i, m) - attribute_activation(pair_logit_flat(z, theta_bar, directed, i, m));
        // ordered pair (m,i): node i is the target
        const double res_in =
            adj(m, i) - attribute_activation(pair_logit_flat(z, theta_bar, directed, m, i));
        for (int k = 0; k < k_attrs; ++k) {
          const double zm = z(m, k);
          const double t00 = theta_bar(k, 0), t01 = theta_bar(k, 1);
          const double t10 = theta_bar(k, 2), t11 = theta_bar(k, 3);
          const double d_source = (1.0 - zm) * (t10 - t00) + zm * (t11 - t01);
          const double d_target = (1.0 - zm) * (t01 - t00) + zm * (t11 - t10);
          const double zi = z(i, k);
          grad_psi(i, k) += coeff * (res_out * d_source + res_in * d_target) * zi * (1.0 - zi);
        }
      }
    }
  });

  // Theta gradients: per-row buffers reduced by a fixed pairwise tree.
  std::vector<Eigen::MatrixXd> row_grads(
      static_cast<std::size_t>(n),
      Eigen::MatrixXd::Zero(theta_bar.rows(), theta_bar.cols()));
  for_each_index(n, exec, [&](int i) {
    Eigen::MatrixXd& g = row_grads[static_cast<std::size_t>(i)];
    const int j_begin = directed ? 0 : i + 1;
    for (int j = j_begin; j < n; ++j) {
      if (j == i) continue;
      const double res =
          adj(i, j) - attribute_activation(pair_logit_flat(z, theta_bar, directed, i, j));
      for (int k = 0; k < k_attrs; ++k) {
        const double zi = z(i, k);
        const double zj = z(j, k);
        if (directed) {
          g(k, 0) += res * (1.0 - zi) * (1.0 - zj);
          g(k, 1) += res * (1.0 - zi) * zj;
          g(k, 2) += res * zi * (1.0 - zj);
          g(k, 3) += res * zi * zj;
        } else {
          g(k, 0) += res * (1.0 - zi) * (1.0 - zj);
          g(k, 1) += res * ((1.0 - zi) * zj + zi * (1.0 - zj));
          g(k, 2) += res * zi * zj;
        }
      }
    }
  });
  grad_theta += coeff * tree_reduce_mats(row_grads, 0, n);
}

Eigen::MatrixXd logit_matrix(const Eigen::MatrixXd& z, const Eigen::MatrixXd& theta_bar,
                             bool directed, Exec exec) {
  if (theta_bar.rows() != z.cols())
    throw std::invalid_argument("logit_matrix: theta row count must equal attribute count");
  if (theta_bar.cols() != (directed ? 4 : 3))
    throw std::invalid_argument("logit_matrix: theta width does not match directedness");
  const int n = static_cast<int>(z.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for_each_index(n, exec, [&](int i) {
    if (directed) {
      for (int j = 0; j < n; ++j)
        if (j != i) out(i, j) = pair_logit_flat(z, theta_bar, directed, i, j);
    } else {
      for (int j = i + 1; j < n; ++j) {
        const double v = pair_logit_flat(z, theta_bar, directed, i, j);
        out(i, j) = v;
        out(j, i) = v;
      }
    }
  });
  return out;
}

Eigen::MatrixXd probability_matrix(const Eigen::MatrixXd& z, const Eigen::MatrixXd& theta_bar,
                                   bool directed, Exec exec) {
  Eigen::MatrixXd out = logit_matrix(z, theta_bar, directed, exec);
  const int n = static_cast<int>(out.rows());
  for_each_index(n, exec, [&](int i) {
    for (int j = 0; j < n; ++j) out(i, j) = (i == j) ? 0.0 : attribute_activation(out(i, j));
  });
  return out;
}

}  // namespace dlaim::kernels

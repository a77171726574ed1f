#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

namespace dlaim {

enum class Op : std::uint8_t {
  kLeaf,
  kAdd,
  kSub,
  kMul,        // elementwise product
  kScale,      // x * c
  kAddConst,   // x + c
  kLinear,     // x (r x d) times W^T (d x k) -> r x k
  kSigmoid,
  kTanh,
  kExp,
  kLog,
  kSum,        // all entries -> 1x1
  kGatherRows, // row subset
  kEdgeLoglik, // fused pairwise Bernoulli log-likelihood
};

/// Opaque handle to a tape node.
struct Tensor {
  std::int32_t id = -1;
  bool valid() const { return id >= 0; }
};

/// Reverse-mode differentiation tape over dense matrix values. Nodes are
/// recorded in topological order by construction; backward() runs a single
/// reverse sweep from a scalar root, accumulating adjoints by addition on
/// fan-out. Single-threaded during construction and backward; independent
/// tapes may run on different threads.
class Tape {
 public:
  Tensor leaf(Eigen::MatrixXd value);
  Tensor zeros(int rows, int cols);

  Tensor add(Tensor a, Tensor b);
  Tensor sub(Tensor a, Tensor b);
  Tensor mul(Tensor a, Tensor b);
  Tensor scale(Tensor a, double c);
  Tensor add_const(Tensor a, double c);
  /// y = x * W^T, with x (r x d) and W (k x d); rows stay independent.
  Tensor linear(Tensor x, Tensor w);
  Tensor sigmoid(Tensor a);
  Tensor tanh(Tensor a);
  Tensor exp(Tensor a);
  Tensor log(Tensor a);
  Tensor sum(Tensor a);
  Tensor gather_rows(Tensor a, std::vector<int> rows);

  /// Fused op: weight * sum over node pairs of the Bernoulli log-likelihood
  /// of `adj` under the edge model, with z = sigmoid(psi) computed inside.
  /// psi is (b x K) pre-sigmoid samples, theta is the flattened (K x d)
  /// interaction stack. Forward and backward run the OpenMP kernels.
  Tensor edge_loglik(Tensor psi, Tensor theta, Eigen::MatrixXd adj, bool directed,
                     double weight);

  const Eigen::MatrixXd& value(Tensor t) const;
  double scalar(Tensor t) const;  // value of a 1x1 node

  /// Reverse sweep from a scalar root. Throws if root is not 1x1.
  void backward(Tensor root);
  /// Adjoint of `t` after backward(); zero for nodes the root does not reach.
  const Eigen::MatrixXd& grad(Tensor t) const;

  std::size_t size() const { return nodes_.size(); }
  std::size_t count(Op op) const;
  void reset();

 private:
  struct EdgePayload {
    Eigen::MatrixXd adj;
    bool directed = false;
    double weight = 1.0;
  };
  struct Node {
    Op op = Op::kLeaf;
    std::int32_t a = -1;
    std::int32_t b = -1;
    double c = 0.0;
    Eigen::MatrixXd val;
    std::vector<int> rows;                // kGatherRows
    std::shared_ptr<EdgePayload> edge;    // kEdgeLoglik
  };

  Tensor push(Node node);
  const Node& node(Tensor t) const;

  std::vector<Node> nodes_;
  std::vector<Eigen::MatrixXd> adjoints_;
};

}  // namespace dlaim

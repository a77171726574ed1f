#include "dlaim/autodiff.hpp"

#include <cmath>
#include <stdexcept>

#include "dlaim/kernels.hpp"
#include "dlaim/model.hpp"

namespace dlaim {

namespace {

void require_same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

}  // namespace

Tensor Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Tensor{static_cast<std::int32_t>(nodes_.size() - 1)};
}

const Tape::Node& Tape::node(Tensor t) const {
  if (!t.valid() || static_cast<std::size_t>(t.id) >= nodes_.size())
    throw std::invalid_argument("Tape: invalid tensor handle");
  return nodes_[static_cast<std::size_t>(t.id)];
}

Tensor Tape::leaf(Eigen::MatrixXd value) {
  Node n;
  n.op = Op::kLeaf;
  n.val = std::move(value);
  return push(std::move(n));
}

Tensor Tape::zeros(int rows, int cols) { return leaf(Eigen::MatrixXd::Zero(rows, cols)); }

Tensor Tape::add(Tensor a, Tensor b) {
  const auto& na = node(a);
  const auto& nb = node(b);
  require_same_shape(na.val, nb.val, "Tape::add");
  Node n;
  n.op = Op::kAdd;
  n.a = a.id;
  n.b = b.id;
  n.val = na.val + nb.val;
  return push(std::move(n));
}

Tensor Tape::sub(Tensor a, Tensor b) {
  const auto& na = node(a);
  const auto& nb = node(b);
  require_same_shape(na.val, nb.val, "Tape::sub");
  Node n;
  n.op = Op::kSub;
  n.a = a.id;
  n.b = b.id;
  n.val = na.val - nb.val;
  return push(std::move(n));
}

Tensor Tape::mul(Tensor a, Tensor b) {
  const auto& na = node(a);
  const auto& nb = node(b);
  require_same_shape(na.val, nb.val, "Tape::mul");
  Node n;
  n.op = Op::kMul;
  n.a = a.id;
  n.b = b.id;
  n.val = na.val.cwiseProduct(nb.val);
  return push(std::move(n));
}

Tensor Tape::scale(Tensor a, double c) {
  Node n;
  n.op = Op::kScale;
  n.a = a.id;
  n.c = c;
  n.val = node(a).val * c;
  return push(std::move(n));
}

Tensor Tape::add_const(Tensor a, double c) {
  Node n;
  n.op = Op::kAddConst;
  n.a = a.id;
  n.c = c;
  n.val = node(a).val.array() + c;
  return push(std::move(n));
}

Tensor Tape::linear(Tensor x, Tensor w) {
  const auto& nx = node(x);
  const auto& nw = node(w);
  if (nx.val.cols() != nw.val.cols())
    throw std::invalid_argument("Tape::linear: input width must match weight width");
  Node n;
  n.op = Op::kLinear;
  n.a = x.id;
  n.b = w.id;
  n.val = nx.val * nw.val.transpose();
  return push(std::move(n));
}

Tensor Tape::sigmoid(Tensor a) {
  Node n;
  n.op = Op::kSigmoid;
  n.a = a.id;
  n.val = node(a).val.unaryExpr(&attribute_activation);
  return push(std::move(n));
}

Tensor Tape::tanh(Tensor a) {
  Node n;
  n.op = Op::kTanh;
  n.a = a.id;
  n.val = node(a).val.array().tanh();
  return push(std::move(n));
}

Tensor Tape::exp(Tensor a) {
  Node n;
  n.op = Op::kExp;
  n.a = a.id;
  n.val = node(a).val.array().exp();
  return push(std::move(n));
}

Tensor Tape::log(Tensor a) {
  Node n;
  n.op = Op::kLog;
  n.a = a.id;
  n.val = node(a).val.array().log();
  return push(std::move(n));
}

Tensor Tape::sum(Tensor a) {
  Node n;
  n.op = Op::kSum;
  n.a = a.id;
  n.val = Eigen::MatrixXd::Constant(1, 1, node(a).val.sum());
  return push(std::move(n));
}

Tensor Tape::gather_rows(Tensor a, std::vector<int> rows) {
  const auto& na = node(a);
  for (int r : rows)
    if (r < 0 || r >= na.val.rows())
      throw std::invalid_argument("Tape::gather_rows: row index out of range");
  Node n;
  n.op = Op::kGatherRows;
  n.a = a.id;
  n.val.resize(static_cast<int>(rows.size()), na.val.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    n.val.row(static_cast<int>(i)) = na.val.row(rows[i]);
  n.rows = std::move(rows);
  return push(std::move(n));
}

Tensor Tape::edge_loglik(Tensor psi, Tensor theta, Eigen::MatrixXd adj, bool directed,
                         double weight) {
  const auto& np = node(psi);
  const auto& nt = node(theta);
  Node n;
  n.op = Op::kEdgeLoglik;
  n.a = psi.id;
  n.b = theta.id;
  n.edge = std::make_shared<EdgePayload>();
  n.edge->directed = directed;
  n.edge->weight = weight;
  n.edge->adj = std::move(adj);
  n.val = Eigen::MatrixXd::Constant(
      1, 1, kernels::pair_loglik(np.val, nt.val, n.edge->adj, directed, weight));
  return push(std::move(n));
}

const Eigen::MatrixXd& Tape::value(Tensor t) const { return node(t).val; }

double Tape::scalar(Tensor t) const {
  const auto& v = node(t).val;
  if (v.rows() != 1 || v.cols() != 1)
    throw std::invalid_argument("Tape::scalar: node is not 1x1");
  return v(0, 0);
}

std::size_t Tape::count(Op op) const {
  std::size_t c = 0;
  for (const auto& n : nodes_) c += (n.op == op) ? 1 : 0;
  return c;
}

void Tape::reset() {
  nodes_.clear();
  adjoints_.clear();
}

void Tape::backward(Tensor root) {
  const auto& r = node(root);
  if (r.val.rows() != 1 || r.val.cols() != 1)
    throw std::invalid_argument("Tape::backward: root must be a scalar (1x1)");

  adjoints_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    adjoints_[i] = Eigen::MatrixXd::Zero(nodes_[i].val.rows(), nodes_[i].val.cols());
  adjoints_[static_cast<std::size_t>(root.id)](0, 0) = 1.0;

  for (std::int32_t id = root.id; id >= 0; --id) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    const Eigen::MatrixXd& g = adjoints_[static_cast<std::size_t>(id)];
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kAdd:
        adjoints_[n.a] += g;
        adjoints_[n.b] += g;
        break;
      case Op::kSub:
        adjoints_[n.a] += g;
        adjoints_[n.b] -= g;
        break;
      case Op::kMul:
        adjoints_[n.a] += g.cwiseProduct(nodes_[n.b].val);
        adjoints_[n.b] += g.cwiseProduct(nodes_[n.a].val);
        break;
      case Op::kScale:
        adjoints_[n.a] += n.c * g;
        break;
      case Op::kAddConst:
        adjoints_[n.a] += g;
        break;
      case Op::kLinear:
        // y = x W^T  =>  dx = g W, dW = g^T x
        adjoints_[n.a] += g * nodes_[n.b].val;
        adjoints_[n.b] += g.transpose() * nodes_[n.a].val;
        break;
      case Op::kSigmoid:
        adjoints_[n.a] += g.cwiseProduct(
            n.val.cwiseProduct((1.0 - n.val.array()).matrix()));
        break;
      case Op::kTanh:
        adjoints_[n.a] += g.cwiseProduct((1.0 - n.val.array().square()).matrix());
        break;
      case Op::kExp:
        adjoints_[n.a] += g.cwiseProduct(n.val);
        break;
      case Op::kLog:
        adjoints_[n.a] += g.cwiseQuotient(nodes_[n.a].val);
        break;
      case Op::kSum:
        adjoints_[n.a].array() += g(0, 0);
        break;
      case Op::kGatherRows:
        for (std::size_t i = 0; i < n.rows.size(); ++i)
          adjoints_[n.a].row(n.rows[i]) += g.row(static_cast<int>(i));
        break;
      case Op::kEdgeLoglik:
        kernels::pair_loglik_grad(nodes_[n.a].val, nodes_[n.b].val, n.edge->adj,
                                  n.edge->directed, n.edge->weight, g(0, 0),
                                  adjoints_[n.a], adjoints_[n.b]);
        break;
    }
  }
}

const Eigen::MatrixXd& Tape::grad(Tensor t) const {
  if (adjoints_.size() != nodes_.size())
    throw std::logic_error("Tape::grad: backward() has not been run");
  node(t);  // bounds check
  return adjoints_[static_cast<std::size_t>(t.id)];
}

}  // namespace dlaim

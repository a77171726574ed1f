#include "dlaim/optimizer.hpp"

#include <cmath>
#include <stdexcept>

#include "dlaim/rng.hpp"

namespace dlaim {

Eigen::MatrixXd& ParameterStore::add(const std::string& name, int rows, int cols) {
  return add(name, Eigen::MatrixXd::Zero(rows, cols));
}

Eigen::MatrixXd& ParameterStore::add(const std::string& name, Eigen::MatrixXd value) {
  auto [it, inserted] = arrays_.emplace(name, std::move(value));
  if (!inserted) throw std::invalid_argument("ParameterStore: duplicate name '" + name + "'");
  order_.push_back(name);
  return it->second;
}

Eigen::MatrixXd& ParameterStore::at(const std::string& name) {
  auto it = arrays_.find(name);
  if (it == arrays_.end())
    throw std::invalid_argument("ParameterStore: unknown name '" + name + "'");
  return it->second;
}

const Eigen::MatrixXd& ParameterStore::at(const std::string& name) const {
  auto it = arrays_.find(name);
  if (it == arrays_.end())
    throw std::invalid_argument("ParameterStore: unknown name '" + name + "'");
  return it->second;
}

bool ParameterStore::has(const std::string& name) const { return arrays_.count(name) > 0; }

std::size_t ParameterStore::size() const {
  std::size_t total = 0;
  for (const auto& name : order_) total += arrays_.at(name).size();
  return total;
}

double ParameterStore::get_flat(std::size_t index) const {
  for (const auto& name : order_) {
    const auto& m = arrays_.at(name);
    const auto n = static_cast<std::size_t>(m.size());
    if (index < n) return m.data()[index];
    index -= n;
  }
  throw std::out_of_range("ParameterStore::get_flat: index out of range");
}

void ParameterStore::set_flat(std::size_t index, double value) {
  for (const auto& name : order_) {
    auto& m = arrays_.at(name);
    const auto n = static_cast<std::size_t>(m.size());
    if (index < n) {
      m.data()[index] = value;
      return;
    }
    index -= n;
  }
  throw std::out_of_range("ParameterStore::set_flat: index out of range");
}

void AdamOptimizer::step(ParameterStore& params, const GradientMap& grads) {
  ++step_count_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_count_));
  for (const auto& name : params.names()) {
    auto git = grads.find(name);
    if (git == grads.end())
      throw std::invalid_argument("AdamOptimizer: missing gradient for '" + name + "'");
    Eigen::MatrixXd& p = params.at(name);
    const Eigen::MatrixXd& g = git->second;
    if (g.rows() != p.rows() || g.cols() != p.cols())
      throw std::invalid_argument("AdamOptimizer: gradient shape mismatch for '" + name + "'");

    Eigen::MatrixXd& m =
        first_moment_.try_emplace(name, Eigen::MatrixXd::Zero(p.rows(), p.cols())).first->second;
    Eigen::MatrixXd& v =
        second_moment_.try_emplace(name, Eigen::MatrixXd::Zero(p.rows(), p.cols())).first->second;
    m = config_.beta1 * m + (1.0 - config_.beta1) * g;
    v = config_.beta2 * v + (1.0 - config_.beta2) * g.cwiseProduct(g);
    const Eigen::ArrayXXd m_hat = m.array() / bc1;
    const Eigen::ArrayXXd v_hat = v.array() / bc2;
    p.array() -= config_.lr * m_hat / (v_hat.sqrt() + config_.eps);
  }
}

double finite_diff_check(const std::function<double(const ParameterStore&)>& loss,
                         const ParameterStore& params, const GradientMap& analytic,
                         const FiniteDiffOptions& options) {
  if (options.step <= 0.0) throw std::invalid_argument("finite_diff_check: step must be positive");
  const double base1 = loss(params);
  const double base2 = loss(params);
  if (base1 != base2)
    throw std::runtime_error("finite_diff_check: loss is not deterministic");

  const std::size_t total = params.size();
  std::vector<std::size_t> coords;
  if (options.max_coords == 0 || options.max_coords >= total) {
    coords.resize(total);
    for (std::size_t i = 0; i < total; ++i) coords[i] = i;
  } else {
    const std::size_t want = std::max<std::size_t>(options.max_coords, 50);
    std::mt19937_64 rng(options.seed);
    auto picks = sample_without_replacement(rng, static_cast<int>(total),
                                            static_cast<int>(std::min(want, total)));
    coords.assign(picks.begin(), picks.end());
  }

  // Flat layout of the analytic gradient must mirror the store.
  ParameterStore grad_flat;
  for (const auto& name : params.names()) {
    auto it = analytic.find(name);
    if (it == analytic.end())
      throw std::invalid_argument("finite_diff_check: missing gradient for '" + name + "'");
    grad_flat.add(name, it->second);
  }

  ParameterStore work = params;
  double max_rel = 0.0;
  for (std::size_t c : coords) {
    const double original = work.get_flat(c);
    work.set_flat(c, original + options.step);
    const double up = loss(work);
    work.set_flat(c, original - options.step);
    const double down = loss(work);
    work.set_flat(c, original);
    const double numeric = (up - down) / (2.0 * options.step);
    const double exact = grad_flat.get_flat(c);
    const double denom = std::max({std::abs(numeric), std::abs(exact), 1e-8});
    max_rel = std::max(max_rel, std::abs(numeric - exact) / denom);
  }
  return max_rel;
}

}  // namespace dlaim

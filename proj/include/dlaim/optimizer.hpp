#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace dlaim {

/// Named dense parameter arrays with a flat-index view across all entries.
/// Names are unique; shapes are fixed at creation. Flat indices run over
/// arrays in insertion order, column-major within each array.
class ParameterStore {
 public:
  Eigen::MatrixXd& add(const std::string& name, int rows, int cols);
  Eigen::MatrixXd& add(const std::string& name, Eigen::MatrixXd value);

  Eigen::MatrixXd& at(const std::string& name);
  const Eigen::MatrixXd& at(const std::string& name) const;
  bool has(const std::string& name) const;

  const std::vector<std::string>& names() const { return order_; }
  std::size_t array_count() const { return order_.size(); }

  std::size_t size() const;  // total scalar count
  double get_flat(std::size_t index) const;
  void set_flat(std::size_t index, double value);

 private:
  std::map<std::string, Eigen::MatrixXd> arrays_;
  std::vector<std::string> order_;
};

using GradientMap = std::map<std::string, Eigen::MatrixXd>;

/// Adam with standard bias correction. Moment buffers mirror the store;
/// the step counter strictly increases. Gradient ascent is obtained by
/// minimizing the negated objective.
class AdamOptimizer {
 public:
  struct Config {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
  };

  explicit AdamOptimizer(Config config) : config_(config) {}

  void step(ParameterStore& params, const GradientMap& grads);
  std::int64_t step_count() const { return step_count_; }

 private:
  Config config_;
  std::int64_t step_count_ = 0;
  std::map<std::string, Eigen::MatrixXd> first_moment_;
  std::map<std::string, Eigen::MatrixXd> second_moment_;
};

struct FiniteDiffOptions {
  double step = 1e-5;
  // 0 checks every coordinate; otherwise a seeded random subset of at least
  // this many coordinates (useful for large stores).
  std::size_t max_coords = 0;
  std::uint64_t seed = 0;
};

/// Central-difference check of an analytic gradient. `loss` must be
/// deterministic (verified by evaluating the base point twice) and is called
/// with perturbed copies of `params`. Returns the max relative error with
/// denominator max(|analytic|, |numeric|, 1e-8).
double finite_diff_check(const std::function<double(const ParameterStore&)>& loss,
                         const ParameterStore& params, const GradientMap& analytic,
                         const FiniteDiffOptions& options = {});

}  // namespace dlaim

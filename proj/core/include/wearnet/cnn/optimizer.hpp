#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace wearnet::cnn {

struct OptimizerConfig {
  enum class Kind { kSgd, kAdam };
  Kind kind = Kind::kAdam;
  double learning_rate = 1e-3;
  double momentum = 0.9;  // SGD only
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

OptimizerConfig::Kind parse_optimizer_kind(std::string_view name);

/// SGD with momentum or Adam over a flat parameter vector.
class Optimizer {
 public:
  Optimizer(OptimizerConfig config, std::size_t parameter_count);

  void step(std::span<double> params, std::span<const double> grads);
  const OptimizerConfig& config() const { return config_; }
  std::size_t steps() const { return t_; }

 private:
  OptimizerConfig config_;
  std::vector<double> m_;  // momentum / first moment
  std::vector<double> v_;  // Adam second moment
  std::size_t t_ = 0;
};

}  // namespace wearnet::cnn

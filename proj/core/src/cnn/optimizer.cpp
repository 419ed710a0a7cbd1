#include "wearnet/cnn/optimizer.hpp"

#include <cmath>
#include <string>

#include "wearnet/error.hpp"

namespace wearnet::cnn {

OptimizerConfig::Kind parse_optimizer_kind(std::string_view name) {
  if (name == "adam") return OptimizerConfig::Kind::kAdam;
  if (name == "sgd") return OptimizerConfig::Kind::kSgd;
  raise(ErrorKind::kConfig, "unknown optimizer '" + std::string(name) + "'");
}

Optimizer::Optimizer(OptimizerConfig config, std::size_t parameter_count)
    : config_(config), m_(parameter_count, 0.0) {
  if (config_.kind == OptimizerConfig::Kind::kAdam) v_.assign(parameter_count, 0.0);
}

void Optimizer::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    raise(ErrorKind::kShape, "optimizer state does not match parameter count");
  }
  ++t_;
  const double lr = config_.learning_rate;
  if (config_.kind == OptimizerConfig::Kind::kSgd) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = config_.momentum * m_[i] - lr * grads[i];
      params[i] += m_[i];
    }
    return;
  }
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1 * m_[i] + (1.0 - b1) * grads[i];
    v_[i] = b2 * v_[i] + (1.0 - b2) * grads[i] * grads[i];
    const double mhat = m_[i] / c1;
    const double vhat = v_[i] / c2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + config_.epsilon);
  }
}

}  // namespace wearnet::cnn

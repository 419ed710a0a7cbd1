#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wearnet/cnn/layers.hpp"
#include "wearnet/cnn/model_spec.hpp"
#include "wearnet/cnn/tensor.hpp"

namespace wearnet::cnn {

/// Where one layer's parameters live in the flat parameter vector. Weights
/// come first, then biases; layers are laid out in order.
struct ParamSlot {
  std::size_t layer = 0;
  std::size_t weight_offset = 0, weight_count = 0;
  std::size_t bias_offset = 0, bias_count = 0;
  std::size_t fan_in = 0;
};

std::vector<ParamSlot> parameter_layout(const ModelSpec& spec);
std::size_t parameter_count(const ModelSpec& spec);

/// He-uniform weights, U(-sqrt(6/fan_in), sqrt(6/fan_in)); zero biases.
std::vector<double> init_params(const ModelSpec& spec, std::uint64_t seed);

/// Executes a ModelSpec over a flat parameter vector. Holds the activations
/// of the last forward pass for backward; not safe to share across threads.
class Network {
 public:
  explicit Network(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  const std::vector<ParamSlot>& layout() const { return slots_; }
  std::size_t parameter_count() const { return param_count_; }
  std::size_t classes() const { return classes_; }

  /// Returns logits as (batch, classes, 1, 1).
  Tensor4 forward(const Tensor4& input, std::span<const double> params);

  /// Backpropagates d(loss)/d(logits) through the last forward pass and
  /// writes d(loss)/d(params) into `grads` (overwritten, same layout).
  void backward(const Tensor4& grad_logits, std::span<const double> params, std::span<double> grads);

  std::vector<std::size_t> predict(const Tensor4& input, std::span<const double> params);

 private:
  ConvGeometry conv_geometry(std::size_t layer) const;

  ModelSpec spec_;
  std::vector<ActivationShape> trace_;
  std::vector<ParamSlot> slots_;         // one per layer (zero counts if none)
  std::size_t param_count_ = 0;
  std::size_t classes_ = 0;

  std::vector<Tensor4> inputs_;          // input to each layer, last forward
  std::vector<std::vector<std::size_t>> argmax_;
};

}  // namespace wearnet::cnn

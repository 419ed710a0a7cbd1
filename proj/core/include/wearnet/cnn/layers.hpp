#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wearnet/cnn/tensor.hpp"

namespace wearnet::cnn {

// Forward/backward kernels for the five layer kinds. Backward functions take
// the forward input (or the pooling argmax) and return exact gradients.

struct ConvGeometry {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_h = 1;
  std::size_t kernel_w = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;

  std::size_t weight_count() const { return out_channels * in_channels * kernel_h * kernel_w; }
  /// Output extent along one axis; throws kShape when the kernel does not
  /// tile the padded input exactly.
  std::size_t out_extent(std::size_t in, std::size_t kernel) const;
};

/// Cross-correlation plus bias. Weights are (out_c, in_c, k_h, k_w).
Tensor4 conv2d_forward(const Tensor4& input, std::span<const double> weights,
                       std::span<const double> bias, const ConvGeometry& geometry);

struct ConvGradients {
  Tensor4 input;
  std::vector<double> weights;
  std::vector<double> bias;
};

ConvGradients conv2d_backward(const Tensor4& grad_output, const Tensor4& input,
                              std::span<const double> weights, const ConvGeometry& geometry);

struct PoolResult {
  Tensor4 output;
  std::vector<std::size_t> argmax;  // flat input index per output element
};

/// Non-overlapping max pooling (stride = pool size). Spatial dims must divide
/// evenly. Ties resolve to the first element in row-major window order.
PoolResult maxpool_forward(const Tensor4& input, std::size_t pool_h, std::size_t pool_w);
Tensor4 maxpool_backward(const Tensor4& grad_output, std::span<const std::size_t> argmax,
                         const Shape4& input_shape);

Tensor4 avgpool_forward(const Tensor4& input, std::size_t pool_h, std::size_t pool_w);
Tensor4 avgpool_backward(const Tensor4& grad_output, std::size_t pool_h, std::size_t pool_w,
                         const Shape4& input_shape);

/// Affine map on the (c, h, w)-flattened input; weights are (out, in).
/// Output shape is (n, out, 1, 1).
Tensor4 fc_forward(const Tensor4& input, std::span<const double> weights,
                   std::span<const double> bias, std::size_t out_features);

struct FcGradients {
  Tensor4 input;  // same shape as the forward input
  std::vector<double> weights;
  std::vector<double> bias;
};

FcGradients fc_backward(const Tensor4& grad_output, const Tensor4& input,
                        std::span<const double> weights, std::size_t out_features);

Tensor4 relu_forward(const Tensor4& input);
Tensor4 relu_backward(const Tensor4& grad_output, const Tensor4& input);

/// Row-wise softmax of a batch x classes matrix.
std::vector<double> softmax(std::span<const double> logits, std::size_t classes);

struct LossResult {
  double loss = 0.0;                // mean cross-entropy over the batch
  std::vector<double> grad_logits;  // (softmax - onehot) / batch
};

LossResult softmax_cross_entropy(std::span<const double> logits, std::size_t classes,
                                 std::span<const std::size_t> labels);

}  // namespace wearnet::cnn

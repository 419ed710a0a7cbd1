#include "wearnet/cnn/network.hpp"

#include <algorithm>
#include <cmath>

#include "wearnet/error.hpp"
#include "wearnet/rng.hpp"

namespace wearnet::cnn {
namespace {

std::vector<ParamSlot> all_slots(const ModelSpec& spec, const std::vector<ActivationShape>& trace) {
  std::vector<ParamSlot> slots(spec.layers.size());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    const ActivationShape& in = trace[i];
    ParamSlot& s = slots[i];
    s.layer = i;
    if (l.kind == LayerKind::kConv) {
      s.fan_in = in.c * l.kernel_h * l.kernel_w;
      s.weight_count = l.units * s.fan_in;
      s.bias_count = l.units;
    } else if (l.kind == LayerKind::kFc || l.kind == LayerKind::kSoftmaxOutput) {
      s.fan_in = in.c * in.h * in.w;
      s.weight_count = l.units * s.fan_in;
      s.bias_count = l.units;
    }
    s.weight_offset = offset;
    offset += s.weight_count;
    s.bias_offset = offset;
    offset += s.bias_count;
  }
  return slots;
}

}  // namespace

std::vector<ParamSlot> parameter_layout(const ModelSpec& spec) {
  std::vector<ParamSlot> out;
  for (const auto& s : all_slots(spec, spec.shape_trace())) {
    if (s.weight_count > 0) out.push_back(s);
  }
  return out;
}

std::size_t parameter_count(const ModelSpec& spec) {
  std::size_t n = 0;
  for (const auto& s : parameter_layout(spec)) n += s.weight_count + s.bias_count;
  return n;
}

std::vector<double> init_params(const ModelSpec& spec, std::uint64_t seed) {
  std::vector<double> params(parameter_count(spec), 0.0);
  for (const auto& s : parameter_layout(spec)) {
    Rng rng(mix_seed(seed, s.layer));
    const double bound = std::sqrt(6.0 / static_cast<double>(s.fan_in));
    for (std::size_t i = 0; i < s.weight_count; ++i) {
      params[s.weight_offset + i] = rng.uniform(-bound, bound);
    }
  }
  return params;
}

Network::Network(ModelSpec spec) : spec_(std::move(spec)) {
  trace_ = spec_.shape_trace();
  slots_ = all_slots(spec_, trace_);
  for (const auto& s : slots_) param_count_ = std::max(param_count_, s.bias_offset + s.bias_count);
  classes_ = spec_.classes();
  inputs_.resize(spec_.layers.size());
  argmax_.resize(spec_.layers.size());
}

ConvGeometry Network::conv_geometry(std::size_t i) const {
  const LayerSpec& l = spec_.layers[i];
  return {trace_[i].c, l.units, l.kernel_h, l.kernel_w, 1, l.padding};
}

Tensor4 Network::forward(const Tensor4& input, std::span<const double> params) {
  if (params.size() != param_count_) {
    raise(ErrorKind::kShape, "expected " + std::to_string(param_count_) + " parameters, got " +
                                 std::to_string(params.size()));
  }
  const ActivationShape& in0 = trace_.front();
  const Shape4& s = input.shape();
  if (s.c != in0.c || s.h != in0.h || s.w != in0.w) {
    raise(ErrorKind::kShape, "input " + s.str() + " does not match model input");
  }
  Tensor4 x = input;
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    const LayerSpec& l = spec_.layers[i];
    const ParamSlot& slot = slots_[i];
    const auto w = params.subspan(slot.weight_offset, slot.weight_count);
    const auto b = params.subspan(slot.bias_offset, slot.bias_count);
    Tensor4 y;
    switch (l.kind) {
      case LayerKind::kConv:
        y = conv2d_forward(x, w, b, conv_geometry(i));
        break;
      case LayerKind::kMaxPool: {
        PoolResult r = maxpool_forward(x, l.kernel_h, l.kernel_w);
        y = std::move(r.output);
        argmax_[i] = std::move(r.argmax);
        break;
      }
      case LayerKind::kAvgPool:
        y = avgpool_forward(x, l.kernel_h, l.kernel_w);
        break;
      case LayerKind::kRelu:
        y = relu_forward(x);
        break;
      case LayerKind::kFc:
      case LayerKind::kSoftmaxOutput:
        y = fc_forward(x, w, b, l.units);
        break;
    }
    inputs_[i] = std::move(x);
    x = std::move(y);
  }
  return x;
}

void Network::backward(const Tensor4& grad_logits, std::span<const double> params,
                       std::span<double> grads) {
  if (grads.size() != param_count_ || params.size() != param_count_) {
    raise(ErrorKind::kShape, "gradient buffer does not match parameter count");
  }
  Tensor4 g = grad_logits;
  for (std::size_t i = spec_.layers.size(); i-- > 0;) {
    const LayerSpec& l = spec_.layers[i];
    const ParamSlot& slot = slots_[i];
    const Tensor4& x = inputs_[i];
    const auto w = params.subspan(slot.weight_offset, slot.weight_count);
    switch (l.kind) {
      case LayerKind::kConv: {
        ConvGradients cg = conv2d_backward(g, x, w, conv_geometry(i));
        std::copy(cg.weights.begin(), cg.weights.end(), grads.begin() + static_cast<std::ptrdiff_t>(slot.weight_offset));
        std::copy(cg.bias.begin(), cg.bias.end(), grads.begin() + static_cast<std::ptrdiff_t>(slot.bias_offset));
        g = std::move(cg.input);
        break;
      }
      case LayerKind::kMaxPool:
        g = maxpool_backward(g, argmax_[i], x.shape());
        break;
      case LayerKind::kAvgPool:
        g = avgpool_backward(g, l.kernel_h, l.kernel_w, x.shape());
        break;
      case LayerKind::kRelu:
        g = relu_backward(g, x);
        break;
      case LayerKind::kFc:
      case LayerKind::kSoftmaxOutput: {
        FcGradients fg = fc_backward(g, x, w, l.units);
        std::copy(fg.weights.begin(), fg.weights.end(), grads.begin() + static_cast<std::ptrdiff_t>(slot.weight_offset));
        std::copy(fg.bias.begin(), fg.bias.end(), grads.begin() + static_cast<std::ptrdiff_t>(slot.bias_offset));
        g = std::move(fg.input);
        break;
      }
    }
  }
}

std::vector<std::size_t> Network::predict(const Tensor4& input, std::span<const double> params) {
  const Tensor4 logits = forward(input, params);
  std::vector<std::size_t> out(input.shape().n);
  for (std::size_t n = 0; n < out.size(); ++n) {
    const auto row = logits.sample(n);
    out[n] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

}  // namespace wearnet::cnn

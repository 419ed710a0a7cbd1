#include "wearnet/cnn/layers.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

#include "wearnet/error.hpp"

namespace wearnet::cnn {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMapRow = Eigen::Map<const RowMat>;

// Products run on Eigen-owned (max-aligned) copies. Eigen picks vector peeling
// from operand addresses, so products on arbitrary spans could round
// differently from one allocation to the next.
RowMat owned(const double* data, std::size_t rows, std::size_t cols) {
  return ConstMapRow(data, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void store(const RowMat& m, double* dst) { std::copy_n(m.data(), m.size(), dst); }

struct ConvPlan {
  std::size_t h, w, out_h, out_w, patch;
};

ConvPlan plan_conv(const Shape4& in, std::span<const double> weights, std::span<const double> bias,
                   const ConvGeometry& g) {
  if (in.c != g.in_channels) {
    raise(ErrorKind::kShape, "conv expects " + std::to_string(g.in_channels) +
                                 " input channels, got " + std::to_string(in.c));
  }
  if (weights.size() != g.weight_count() || bias.size() != g.out_channels) {
    raise(ErrorKind::kShape, "conv parameter sizes do not match geometry");
  }
  return {in.h, in.w, g.out_extent(in.h, g.kernel_h), g.out_extent(in.w, g.kernel_w),
          g.in_channels * g.kernel_h * g.kernel_w};
}

// col is (C*kh*kw) x (out_h*out_w), row-major.
void im2col(std::span<const double> x, const ConvPlan& p, const ConvGeometry& g, double* col) {
  const std::size_t cols = p.out_h * p.out_w;
  for (std::size_t c = 0; c < g.in_channels; ++c) {
    for (std::size_t ki = 0; ki < g.kernel_h; ++ki) {
      for (std::size_t kj = 0; kj < g.kernel_w; ++kj) {
        double* row = col + ((c * g.kernel_h + ki) * g.kernel_w + kj) * cols;
        for (std::size_t oi = 0; oi < p.out_h; ++oi) {
          const std::ptrdiff_t ii = static_cast<std::ptrdiff_t>(oi * g.stride + ki) -
                                    static_cast<std::ptrdiff_t>(g.padding);
          double* dst = row + oi * p.out_w;
          if (ii < 0 || ii >= static_cast<std::ptrdiff_t>(p.h)) {
            std::fill_n(dst, p.out_w, 0.0);
            continue;
          }
          const double* src = x.data() + (c * p.h + static_cast<std::size_t>(ii)) * p.w;
          for (std::size_t oj = 0; oj < p.out_w; ++oj) {
            const std::ptrdiff_t jj = static_cast<std::ptrdiff_t>(oj * g.stride + kj) -
                                      static_cast<std::ptrdiff_t>(g.padding);
            dst[oj] = (jj < 0 || jj >= static_cast<std::ptrdiff_t>(p.w)) ? 0.0 : src[jj];
          }
        }
      }
    }
  }
}

void col2im_add(const double* col, const ConvPlan& p, const ConvGeometry& g, std::span<double> dx) {
  const std::size_t cols = p.out_h * p.out_w;
  for (std::size_t c = 0; c < g.in_channels; ++c) {
    for (std::size_t ki = 0; ki < g.kernel_h; ++ki) {
      for (std::size_t kj = 0; kj < g.kernel_w; ++kj) {
        const double* row = col + ((c * g.kernel_h + ki) * g.kernel_w + kj) * cols;
        for (std::size_t oi = 0; oi < p.out_h; ++oi) {
          const std::ptrdiff_t ii = static_cast<std::ptrdiff_t>(oi * g.stride + ki) -
                                    static_cast<std::ptrdiff_t>(g.padding);
          if (ii < 0 || ii >= static_cast<std::ptrdiff_t>(p.h)) continue;
          double* dst = dx.data() + (c * p.h + static_cast<std::size_t>(ii)) * p.w;
          for (std::size_t oj = 0; oj < p.out_w; ++oj) {
            const std::ptrdiff_t jj = static_cast<std::ptrdiff_t>(oj * g.stride + kj) -
                                      static_cast<std::ptrdiff_t>(g.padding);
            if (jj >= 0 && jj < static_cast<std::ptrdiff_t>(p.w)) dst[jj] += row[oi * p.out_w + oj];
          }
        }
      }
    }
  }
}

void check_pool(const Shape4& s, std::size_t ph, std::size_t pw) {
  if (ph == 0 || pw == 0 || s.h % ph != 0 || s.w % pw != 0) {
    raise(ErrorKind::kShape, "pool " + std::to_string(ph) + "x" + std::to_string(pw) +
                                 " does not divide input " + s.str());
  }
}

}  // namespace

std::size_t ConvGeometry::out_extent(std::size_t in, std::size_t kernel) const {
  const std::size_t padded = in + 2 * padding;
  if (stride == 0 || kernel == 0 || padded < kernel || (padded - kernel) % stride != 0) {
    raise(ErrorKind::kShape, "kernel " + std::to_string(kernel) + " does not fit input extent " +
                                 std::to_string(in) + " (padding " + std::to_string(padding) +
                                 ", stride " + std::to_string(stride) + ")");
  }
  return (padded - kernel) / stride + 1;
}

Tensor4 conv2d_forward(const Tensor4& input, std::span<const double> weights,
                       std::span<const double> bias, const ConvGeometry& g) {
  const Shape4& s = input.shape();
  const ConvPlan p = plan_conv(s, weights, bias, g);
  const std::size_t cols = p.out_h * p.out_w;
  Tensor4 out({s.n, g.out_channels, p.out_h, p.out_w});
  RowMat col(p.patch, cols);
  RowMat y(g.out_channels, cols);
  const RowMat w = owned(weights.data(), g.out_channels, p.patch);
  for (std::size_t n = 0; n < s.n; ++n) {
    im2col(input.sample(n), p, g, col.data());
    y.noalias() = w * col;
    double* dst = out.sample(n).data();
    for (std::size_t o = 0; o < g.out_channels; ++o)
      for (std::size_t j = 0; j < cols; ++j) dst[o * cols + j] = y(o, j) + bias[o];
  }
  return out;
}

ConvGradients conv2d_backward(const Tensor4& grad_output, const Tensor4& input,
                              std::span<const double> weights, const ConvGeometry& g) {
  const Shape4& s = input.shape();
  std::vector<double> zero_bias(g.out_channels, 0.0);
  const ConvPlan p = plan_conv(s, weights, zero_bias, g);
  const std::size_t cols = p.out_h * p.out_w;
  if (grad_output.shape() != Shape4{s.n, g.out_channels, p.out_h, p.out_w}) {
    raise(ErrorKind::kShape, "conv grad_output " + grad_output.shape().str() + " does not match forward");
  }
  ConvGradients gr{Tensor4(s), std::vector<double>(weights.size(), 0.0),
                   std::vector<double>(g.out_channels, 0.0)};
  RowMat col(p.patch, cols);
  RowMat dcol(p.patch, cols);
  RowMat dw = RowMat::Zero(g.out_channels, p.patch);
  const RowMat w = owned(weights.data(), g.out_channels, p.patch);
  for (std::size_t n = 0; n < s.n; ++n) {
    const RowMat dy = owned(grad_output.sample(n).data(), g.out_channels, cols);
    im2col(input.sample(n), p, g, col.data());
    dw.noalias() += dy * col.transpose();
    for (std::size_t o = 0; o < g.out_channels; ++o) {
      double acc = 0.0;
      for (std::size_t j = 0; j < cols; ++j) acc += dy(o, j);
      gr.bias[o] += acc;
    }
    dcol.noalias() = w.transpose() * dy;
    col2im_add(dcol.data(), p, g, gr.input.sample(n));
  }
  store(dw, gr.weights.data());
  return gr;
}

PoolResult maxpool_forward(const Tensor4& input, std::size_t ph, std::size_t pw) {
  const Shape4& s = input.shape();
  check_pool(s, ph, pw);
  PoolResult r{Tensor4({s.n, s.c, s.h / ph, s.w / pw}), {}};
  r.argmax.resize(r.output.size());
  const auto x = input.data();
  std::size_t o = 0;
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      for (std::size_t i = 0; i < s.h / ph; ++i) {
        for (std::size_t j = 0; j < s.w / pw; ++j, ++o) {
          std::size_t best = input.index(n, c, i * ph, j * pw);
          for (std::size_t a = 0; a < ph; ++a) {
            for (std::size_t b = 0; b < pw; ++b) {
              const std::size_t idx = input.index(n, c, i * ph + a, j * pw + b);
              if (x[idx] > x[best]) best = idx;
            }
          }
          r.output.data()[o] = x[best];
          r.argmax[o] = best;
        }
      }
    }
  }
  return r;
}

Tensor4 maxpool_backward(const Tensor4& grad_output, std::span<const std::size_t> argmax,
                         const Shape4& input_shape) {
  if (argmax.size() != grad_output.size()) raise(ErrorKind::kShape, "argmax/grad size mismatch");
  Tensor4 dx(input_shape);
  for (std::size_t o = 0; o < argmax.size(); ++o) dx.data()[argmax[o]] += grad_output.data()[o];
  return dx;
}

Tensor4 avgpool_forward(const Tensor4& input, std::size_t ph, std::size_t pw) {
  const Shape4& s = input.shape();
  check_pool(s, ph, pw);
  Tensor4 out({s.n, s.c, s.h / ph, s.w / pw});
  const double scale = 1.0 / static_cast<double>(ph * pw);
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c)
      for (std::size_t i = 0; i < s.h / ph; ++i)
        for (std::size_t j = 0; j < s.w / pw; ++j) {
          double acc = 0.0;
          for (std::size_t a = 0; a < ph; ++a)
            for (std::size_t b = 0; b < pw; ++b) acc += input.at(n, c, i * ph + a, j * pw + b);
          out.at(n, c, i, j) = acc * scale;
        }
  return out;
}

Tensor4 avgpool_backward(const Tensor4& grad_output, std::size_t ph, std::size_t pw,
                         const Shape4& input_shape) {
  check_pool(input_shape, ph, pw);
  if (grad_output.shape() != Shape4{input_shape.n, input_shape.c, input_shape.h / ph, input_shape.w / pw}) {
    raise(ErrorKind::kShape, "avgpool grad_output does not match forward");
  }
  Tensor4 dx(input_shape);
  const double scale = 1.0 / static_cast<double>(ph * pw);
  for (std::size_t n = 0; n < input_shape.n; ++n)
    for (std::size_t c = 0; c < input_shape.c; ++c)
      for (std::size_t i = 0; i < input_shape.h; ++i)
        for (std::size_t j = 0; j < input_shape.w; ++j)
          dx.at(n, c, i, j) = grad_output.at(n, c, i / ph, j / pw) * scale;
  return dx;
}

Tensor4 fc_forward(const Tensor4& input, std::span<const double> weights,
                   std::span<const double> bias, std::size_t out_features) {
  const std::size_t n = input.shape().n;
  const std::size_t in_features = input.shape().sample_size();
  if (weights.size() != out_features * in_features || bias.size() != out_features) {
    raise(ErrorKind::kShape, "fc parameters do not match " + std::to_string(in_features) + " -> " +
                                 std::to_string(out_features));
  }
  Tensor4 out({n, out_features, 1, 1});
  const RowMat x = owned(input.data().data(), n, in_features);
  const RowMat w = owned(weights.data(), out_features, in_features);
  RowMat y(n, out_features);
  y.noalias() = x * w.transpose();
  auto dst = out.data();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t o = 0; o < out_features; ++o) dst[r * out_features + o] = y(r, o) + bias[o];
  return out;
}

FcGradients fc_backward(const Tensor4& grad_output, const Tensor4& input,
                        std::span<const double> weights, std::size_t out_features) {
  const std::size_t n = input.shape().n;
  const std::size_t in_features = input.shape().sample_size();
  if (grad_output.shape() != Shape4{n, out_features, 1, 1} ||
      weights.size() != out_features * in_features) {
    raise(ErrorKind::kShape, "fc backward shapes inconsistent");
  }
  FcGradients gr{Tensor4(input.shape()), std::vector<double>(weights.size()),
                 std::vector<double>(out_features)};
  const RowMat x = owned(input.data().data(), n, in_features);
  const RowMat w = owned(weights.data(), out_features, in_features);
  const RowMat dy = owned(grad_output.data().data(), n, out_features);
  RowMat dw(out_features, in_features);
  dw.noalias() = dy.transpose() * x;
  store(dw, gr.weights.data());
  for (std::size_t o = 0; o < out_features; ++o) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) acc += dy(r, o);
    gr.bias[o] = acc;
  }
  RowMat dx(n, in_features);
  dx.noalias() = dy * w;
  store(dx, gr.input.data().data());
  return gr;
}

Tensor4 relu_forward(const Tensor4& input) {
  Tensor4 out(input.shape());
  const auto x = input.data();
  auto y = out.data();
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] < 0.0 ? 0.0 : x[i];
  return out;
}

Tensor4 relu_backward(const Tensor4& grad_output, const Tensor4& input) {
  if (grad_output.shape() != input.shape()) raise(ErrorKind::kShape, "relu backward shape mismatch");
  Tensor4 dx(input.shape());
  const auto x = input.data();
  const auto dy = grad_output.data();
  auto d = dx.data();
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] > 0.0 ? dy[i] : 0.0;
  return dx;
}

std::vector<double> softmax(std::span<const double> logits, std::size_t classes) {
  if (classes == 0 || logits.size() % classes != 0) raise(ErrorKind::kShape, "logits not batch x classes");
  std::vector<double> p(logits.size());
  for (std::size_t r = 0; r < logits.size() / classes; ++r) {
    const auto row = logits.subspan(r * classes, classes);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (std::size_t j = 0; j < classes; ++j) {
      p[r * classes + j] = std::exp(row[j] - mx);
      z += p[r * classes + j];
    }
    for (std::size_t j = 0; j < classes; ++j) p[r * classes + j] /= z;
  }
  return p;
}

LossResult softmax_cross_entropy(std::span<const double> logits, std::size_t classes,
                                 std::span<const std::size_t> labels) {
  if (classes == 0 || logits.size() != labels.size() * classes || labels.empty()) {
    raise(ErrorKind::kShape, "logits do not match labels x classes");
  }
  const std::size_t batch = labels.size();
  LossResult r;
  r.grad_logits.resize(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    if (labels[i] >= classes) {
      raise(ErrorKind::kRange, "label " + std::to_string(labels[i]) + " out of range for " +
                                   std::to_string(classes) + " classes");
    }
    const auto row = logits.subspan(i * classes, classes);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double v : row) z += std::exp(v - mx);
    const double log_z = mx + std::log(z);
    total += log_z - row[labels[i]];
    for (std::size_t j = 0; j < classes; ++j) {
      const double pj = std::exp(row[j] - log_z);
      r.grad_logits[i * classes + j] = (pj - (j == labels[i] ? 1.0 : 0.0)) / static_cast<double>(batch);
    }
  }
  r.loss = total / static_cast<double>(batch);
  return r;
}

}  // namespace wearnet::cnn

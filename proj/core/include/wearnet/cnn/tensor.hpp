#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wearnet::cnn {

struct Shape4 {
  std::size_t n = 0, c = 0, h = 0, w = 0;

  std::size_t size() const { return n * c * h * w; }
  std::size_t sample_size() const { return c * h * w; }
  bool operator==(const Shape4&) const = default;
  std::string str() const;
};

/// Dense (batch, channels, height, width) tensor of doubles, row-major.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(Shape4 shape, double fill = 0.0) : shape_(shape), data_(shape.size(), fill) {}
  Tensor4(Shape4 shape, std::vector<double> data);

  const Shape4& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& storage() { return data_; }

  std::span<double> sample(std::size_t n) {
    return std::span<double>(data_).subspan(n * shape_.sample_size(), shape_.sample_size());
  }
  std::span<const double> sample(std::size_t n) const {
    return std::span<const double>(data_).subspan(n * shape_.sample_size(), shape_.sample_size());
  }

  double& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
    return data_[index(n, c, h, w)];
  }
  double at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return data_[index(n, c, h, w)];
  }
  std::size_t index(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return ((n * shape_.c + c) * shape_.h + h) * shape_.w + w;
  }

  /// Same data viewed as (n, c*h*w, 1, 1).
  Tensor4 flattened() const;
  Tensor4 reshaped(Shape4 shape) const;

 private:
  Shape4 shape_;
  std::vector<double> data_;
};

}  // namespace wearnet::cnn

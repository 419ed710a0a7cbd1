#include "wearnet/cnn/tensor.hpp"

#include "wearnet/error.hpp"

namespace wearnet::cnn {

std::string Shape4::str() const {
  return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
         std::to_string(w) + ")";
}

Tensor4::Tensor4(Shape4 shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.size()) {
    raise(ErrorKind::kShape, "data length " + std::to_string(data_.size()) +
                                 " does not match shape " + shape_.str());
  }
}

Tensor4 Tensor4::flattened() const {
  return reshaped({shape_.n, shape_.sample_size(), 1, 1});
}

Tensor4 Tensor4::reshaped(Shape4 shape) const {
  if (shape.size() != shape_.size()) {
    raise(ErrorKind::kShape, "cannot reshape " + shape_.str() + " to " + shape.str());
  }
  return Tensor4(shape, data_);
}

}  // namespace wearnet::cnn

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wearnet/cnn/tensor.hpp"
#include "wearnet/imaging.hpp"

namespace wearnet {

/// Contiguous labeled image set ready for training.
struct ImageDataset {
  std::size_t image_size = 0;  // M
  std::size_t num_classes = 0;
  std::vector<std::uint8_t> pixels;  // size() * M * M
  std::vector<std::size_t> labels;
  std::vector<std::string> groups;   // source snapshot id per image

  std::size_t size() const { return labels.size(); }

  /// Batch of the given images as (n, 1, M, M), pixels scaled to [0, 1].
  cnn::Tensor4 batch(std::span<const std::size_t> indices) const;
  std::vector<std::size_t> batch_labels(std::span<const std::size_t> indices) const;
};

/// Throws kRange if any label >= num_classes.
ImageDataset make_dataset(const std::vector<SignalImage>& images, std::size_t num_classes);

}  // namespace wearnet

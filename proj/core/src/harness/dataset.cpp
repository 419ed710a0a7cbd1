#include "wearnet/dataset.hpp"

#include <algorithm>

#include "wearnet/error.hpp"

namespace wearnet {

cnn::Tensor4 ImageDataset::batch(std::span<const std::size_t> indices) const {
  const std::size_t area = image_size * image_size;
  cnn::Tensor4 t({indices.size(), 1, image_size, image_size});
  auto out = t.data();
  for (std::size_t b = 0; b < indices.size(); ++b) {
    if (indices[b] >= size()) raise(ErrorKind::kRange, "image index out of range");
    const std::uint8_t* src = pixels.data() + indices[b] * area;
    for (std::size_t p = 0; p < area; ++p) out[b * area + p] = static_cast<double>(src[p]) / 255.0;
  }
  return t;
}

std::vector<std::size_t> ImageDataset::batch_labels(std::span<const std::size_t> indices) const {
  std::vector<std::size_t> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(labels.at(i));
  return out;
}

ImageDataset make_dataset(const std::vector<SignalImage>& images, std::size_t num_classes) {
  ImageDataset ds;
  ds.num_classes = num_classes;
  if (images.empty()) return ds;
  ds.image_size = images.front().size;
  const std::size_t area = ds.image_size * ds.image_size;
  ds.pixels.reserve(images.size() * area);
  for (const auto& img : images) {
    if (img.size != ds.image_size || img.pixels.size() != area) {
      raise(ErrorKind::kShape, "images differ in size");
    }
    if (img.label >= num_classes) {
      raise(ErrorKind::kRange, "label " + std::to_string(img.label) + " >= " + std::to_string(num_classes));
    }
    ds.pixels.insert(ds.pixels.end(), img.pixels.begin(), img.pixels.end());
    ds.labels.push_back(img.label);
    ds.groups.push_back(img.snapshot_id);
  }
  return ds;
}

}  // namespace wearnet

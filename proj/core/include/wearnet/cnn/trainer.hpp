#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wearnet/cnn/network.hpp"
#include "wearnet/cnn/optimizer.hpp"
#include "wearnet/dataset.hpp"

namespace wearnet::cnn {

struct TrainConfig {
  OptimizerConfig optimizer;
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
};

/// One forward/backward pass and one optimizer update. `step_index` is only
/// used to report divergence (kDivergence) when the loss is not finite.
double train_step(Network& net, std::span<double> params, const Tensor4& batch,
                  std::span<const std::size_t> labels, Optimizer& optimizer,
                  std::size_t step_index = 0);

struct TrainResult {
  std::vector<double> params;
  std::vector<double> loss_trace;   // one entry per step
  std::vector<double> epoch_loss;   // mean step loss per epoch
};

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss)>;

/// Mini-batch training over `train_indices`, reshuffled each epoch from
/// `seed`. Pure function of (dataset, indices, spec, config, seed).
TrainResult train(const ModelSpec& spec, const ImageDataset& data,
                  std::span<const std::size_t> train_indices, const TrainConfig& config,
                  std::uint64_t seed, const EpochCallback& on_epoch = {});

/// Predicted class per image, evaluated in chunks of `batch_size`.
std::vector<std::size_t> predict(const ModelSpec& spec, std::span<const double> params,
                                 const ImageDataset& data, std::span<const std::size_t> indices,
                                 std::size_t batch_size = 128);

}  // namespace wearnet::cnn

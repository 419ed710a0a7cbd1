#include "wearnet/cnn/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "wearnet/cnn/layers.hpp"
#include "wearnet/error.hpp"
#include "wearnet/rng.hpp"

namespace wearnet::cnn {

double train_step(Network& net, std::span<double> params, const Tensor4& batch,
                  std::span<const std::size_t> labels, Optimizer& optimizer,
                  std::size_t step_index) {
  const Tensor4 logits = net.forward(batch, params);
  LossResult lr = softmax_cross_entropy(logits.data(), net.classes(), labels);
  if (!std::isfinite(lr.loss)) {
    raise(ErrorKind::kDivergence, "non-finite loss at step " + std::to_string(step_index));
  }
  std::vector<double> grads(params.size());
  net.backward(Tensor4(logits.shape(), std::move(lr.grad_logits)), params, grads);
  optimizer.step(params, grads);
  return lr.loss;
}

TrainResult train(const ModelSpec& spec, const ImageDataset& data,
                  std::span<const std::size_t> train_indices, const TrainConfig& config,
                  std::uint64_t seed, const EpochCallback& on_epoch) {
  if (config.batch_size == 0) raise(ErrorKind::kConfig, "batch size must be >= 1");
  if (train_indices.empty()) raise(ErrorKind::kSplit, "no training images");
  if (spec.input_size != data.image_size) {
    raise(ErrorKind::kShape, "model input " + std::to_string(spec.input_size) +
                                 " does not match image size " + std::to_string(data.image_size));
  }
  Network net(spec);
  TrainResult result;
  result.params = init_params(spec, mix_seed(seed, 1));
  Optimizer opt(config.optimizer, result.params.size());
  Rng shuffle_rng(mix_seed(seed, 2));

  std::vector<std::size_t> order(train_indices.begin(), train_indices.end());
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      const double loss = train_step(net, result.params, data.batch(idx), data.batch_labels(idx),
                                     opt, step++);
      result.loss_trace.push_back(loss);
      sum += loss;
      ++batches;
    }
    result.epoch_loss.push_back(sum / static_cast<double>(batches));
    if (on_epoch) on_epoch(epoch, result.epoch_loss.back());
  }
  return result;
}

std::vector<std::size_t> predict(const ModelSpec& spec, std::span<const double> params,
                                 const ImageDataset& data, std::span<const std::size_t> indices,
                                 std::size_t batch_size) {
  Network net(spec);
  std::vector<std::size_t> out;
  out.reserve(indices.size());
  for (std::size_t start = 0; start < indices.size(); start += std::max<std::size_t>(batch_size, 1)) {
    const std::size_t end = std::min(indices.size(), start + std::max<std::size_t>(batch_size, 1));
    const auto idx = indices.subspan(start, end - start);
    const auto p = net.predict(data.batch(idx), params);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

}  // namespace wearnet::cnn

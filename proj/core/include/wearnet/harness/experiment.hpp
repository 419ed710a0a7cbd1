#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wearnet/cnn/model_spec.hpp"
#include "wearnet/cnn/trainer.hpp"
#include "wearnet/dataset.hpp"
#include "wearnet/harness/metrics.hpp"

namespace wearnet {

struct Split {
  std::vector<std::size_t> train;  // ascending image indices
  std::vector<std::size_t> test;
};

/// Stratified split: each class is shuffled and cut independently, with
/// max(1, floor(n_c * train_fraction)) images (at most n_c - 1) going to train.
/// Throws kSplit for a class with fewer than 2 images.
Split split_dataset(std::span<const std::size_t> labels, std::size_t k, double train_fraction,
                    std::uint64_t seed);

/// Same rule applied to whole source snapshots, so no snapshot contributes
/// images to both sides. Throws kSplit for a class with fewer than 2 snapshots.
Split split_by_group(std::span<const std::size_t> labels, std::span<const std::string> groups,
                     std::size_t k, double train_fraction, std::uint64_t seed);

struct RunOptions {
  cnn::TrainConfig training;
  double train_fraction = 0.7;
  bool split_by_snapshot = false;
};

using RunCallback = std::function<void(std::size_t run, const RunMetrics&)>;

/// One split/train/evaluate cycle; `seed` drives the split, init and shuffling.
RunMetrics run_once(const cnn::ModelSpec& spec, const ImageDataset& data, const RunOptions& options,
                    std::uint64_t seed);

/// Run r uses seed base_seed + r. Divergence errors are re-raised tagged with
/// the run index.
ReportBundle repeated_runs(const cnn::ModelSpec& spec, const ImageDataset& data,
                           const RunOptions& options, std::size_t runs, std::uint64_t base_seed,
                           const RunCallback& on_run = {});

/// One bundle per (i, j) in row-major order over widths_i x widths_j; j = 0
/// means a single hidden FC layer.
std::vector<ReportBundle> fc_sweep(const cnn::PresetOptions& base,
                                   std::span<const std::size_t> widths_i,
                                   std::span<const std::size_t> widths_j, const ImageDataset& data,
                                   const RunOptions& options, std::size_t runs,
                                   std::uint64_t base_seed,
                                   const std::function<void(const ReportBundle&)>& on_model = {});

}  // namespace wearnet

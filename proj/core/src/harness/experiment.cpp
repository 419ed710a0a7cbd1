#include "wearnet/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "wearnet/error.hpp"
#include "wearnet/rng.hpp"

namespace wearnet {
namespace {

void check_fraction(double f) {
  if (!(f > 0.0 && f < 1.0)) raise(ErrorKind::kSplit, "train fraction must be in (0, 1)");
}

std::size_t train_share(std::size_t n, double fraction) {
  // Small epsilon so that e.g. 100 * 0.7 lands on 70 rather than 69.
  auto t = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9));
  return std::clamp<std::size_t>(t, 1, n - 1);
}

}  // namespace

Split split_dataset(std::span<const std::size_t> labels, std::size_t k, double train_fraction,
                    std::uint64_t seed) {
  check_fraction(train_fraction);
  std::vector<std::vector<std::size_t>> by_class(k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= k) raise(ErrorKind::kRange, "label >= k");
    by_class[labels[i]].push_back(i);
  }
  Split s;
  Rng rng(seed);
  for (std::size_t c = 0; c < k; ++c) {
    auto& members = by_class[c];
    if (members.empty()) continue;
    if (members.size() < 2) {
      raise(ErrorKind::kSplit, "class " + std::to_string(c) + " has fewer than 2 images");
    }
    rng.shuffle(std::span<std::size_t>(members));
    const std::size_t t = train_share(members.size(), train_fraction);
    s.train.insert(s.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(t));
    s.test.insert(s.test.end(), members.begin() + static_cast<std::ptrdiff_t>(t), members.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

Split split_by_group(std::span<const std::size_t> labels, std::span<const std::string> groups,
                     std::size_t k, double train_fraction, std::uint64_t seed) {
  check_fraction(train_fraction);
  if (groups.size() != labels.size()) raise(ErrorKind::kShape, "groups and labels differ in length");
  std::map<std::string, std::vector<std::size_t>> members;
  std::vector<std::vector<std::string>> by_class(k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= k) raise(ErrorKind::kRange, "label >= k");
    auto& m = members[groups[i]];
    if (m.empty()) by_class[labels[i]].push_back(groups[i]);
    else if (labels[m.front()] != labels[i]) {
      raise(ErrorKind::kSplit, "snapshot " + groups[i] + " carries more than one label");
    }
    m.push_back(i);
  }
  Split s;
  Rng rng(seed);
  for (std::size_t c = 0; c < k; ++c) {
    auto& g = by_class[c];
    if (g.empty()) continue;
    if (g.size() < 2) {
      raise(ErrorKind::kSplit, "class " + std::to_string(c) + " has fewer than 2 snapshots");
    }
    rng.shuffle(std::span<std::string>(g));
    const std::size_t t = train_share(g.size(), train_fraction);
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto& dst = i < t ? s.train : s.test;
      const auto& m = members[g[i]];
      dst.insert(dst.end(), m.begin(), m.end());
    }
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

RunMetrics run_once(const cnn::ModelSpec& spec, const ImageDataset& data, const RunOptions& options,
                    std::uint64_t seed) {
  const Split split =
      options.split_by_snapshot
          ? split_by_group(data.labels, data.groups, data.num_classes, options.train_fraction, seed)
          : split_dataset(data.labels, data.num_classes, options.train_fraction, seed);
  const cnn::TrainResult tr = cnn::train(spec, data, split.train, options.training, seed);
  const auto pred = cnn::predict(spec, tr.params, data, split.test);
  return compute_metrics(pred, data.batch_labels(split.test), data.num_classes);
}

ReportBundle repeated_runs(const cnn::ModelSpec& spec, const ImageDataset& data,
                           const RunOptions& options, std::size_t runs, std::uint64_t base_seed,
                           const RunCallback& on_run) {
  if (runs == 0) raise(ErrorKind::kConfig, "number of runs must be >= 1");
  std::vector<RunMetrics> results;
  for (std::size_t r = 0; r < runs; ++r) {
    try {
      results.push_back(run_once(spec, data, options, base_seed + r));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kDivergence) {
        raise(ErrorKind::kDivergence, "run " + std::to_string(r) + ": " + e.what());
      }
      throw;
    }
    if (on_run) on_run(r, results.back());
  }
  return make_bundle(spec.name, std::move(results));
}

std::vector<ReportBundle> fc_sweep(const cnn::PresetOptions& base,
                                   std::span<const std::size_t> widths_i,
                                   std::span<const std::size_t> widths_j, const ImageDataset& data,
                                   const RunOptions& options, std::size_t runs,
                                   std::uint64_t base_seed,
                                   const std::function<void(const ReportBundle&)>& on_model) {
  if (widths_i.empty() || widths_j.empty()) raise(ErrorKind::kConfig, "sweep width lists must be non-empty");
  std::vector<ReportBundle> out;
  for (std::size_t i : widths_i) {
    for (std::size_t j : widths_j) {
      cnn::PresetOptions o = base;
      o.fc1 = i;
      o.fc2 = j;
      out.push_back(repeated_runs(cnn::make_preset(o), data, options, runs, base_seed));
      if (on_model) on_model(out.back());
    }
  }
  return out;
}

}  // namespace wearnet

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wearnet {

struct RunMetrics {
  double accuracy = 0.0;
  double precision = 0.0;  // macro average over classes
  double recall = 0.0;     // macro average over classes
  double f1 = 0.0;         // macro average of per-class F1
  double mse = 0.0;        // mean squared level-index error
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::size_t undefined = 0;  // per-class precision/recall terms with a zero denominator (taken as 0)
};

/// Throws kShape on length mismatch and kRange on entries >= k.
RunMetrics compute_metrics(std::span<const std::size_t> predictions,
                           std::span<const std::size_t> labels, std::size_t k);

enum class Metric { kAccuracy, kPrecision, kRecall, kF1, kMse };
inline constexpr std::array<Metric, 5> kAllMetrics = {Metric::kAccuracy, Metric::kPrecision,
                                                      Metric::kRecall, Metric::kF1, Metric::kMse};
std::string_view metric_name(Metric m);  // "Accuracy", "Precision", ...
double metric_value(const RunMetrics& r, Metric m);

struct MetricStats {
  double max = 0.0, min = 0.0, mean = 0.0, std = 0.0;  // population std
};

MetricStats summarize(std::span<const double> values);

/// Max/min/mean/std of every metric over repeated runs of one model.
struct ReportBundle {
  std::string model;
  std::vector<RunMetrics> runs;
  std::array<MetricStats, 5> stats{};

  const MetricStats& operator[](Metric m) const { return stats[static_cast<std::size_t>(m)]; }
};

ReportBundle make_bundle(std::string model, std::vector<RunMetrics> runs);

}  // namespace wearnet

#include "wearnet/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "wearnet/error.hpp"

namespace wearnet {

RunMetrics compute_metrics(std::span<const std::size_t> predictions,
                           std::span<const std::size_t> labels, std::size_t k) {
  if (predictions.size() != labels.size()) {
    raise(ErrorKind::kShape, "predictions and labels differ in length");
  }
  if (labels.empty()) raise(ErrorKind::kShape, "no samples to score");
  RunMetrics r;
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  double sq = 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= k || predictions[i] >= k) raise(ErrorKind::kRange, "class index >= k");
    ++r.confusion[labels[i]][predictions[i]];
    if (labels[i] == predictions[i]) ++correct;
    const double d = static_cast<double>(predictions[i]) - static_cast<double>(labels[i]);
    sq += d * d;
  }
  const double total = static_cast<double>(labels.size());
  r.accuracy = static_cast<double>(correct) / total;
  r.mse = sq / total;

  double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t predicted = 0, actual = 0;
    for (std::size_t j = 0; j < k; ++j) {
      predicted += r.confusion[j][c];
      actual += r.confusion[c][j];
    }
    const double tp = static_cast<double>(r.confusion[c][c]);
    double p = 0.0, rc = 0.0;
    if (predicted > 0) p = tp / static_cast<double>(predicted); else ++r.undefined;
    if (actual > 0) rc = tp / static_cast<double>(actual); else ++r.undefined;
    p_sum += p;
    r_sum += rc;
    f_sum += (p + rc) > 0.0 ? 2.0 * p * rc / (p + rc) : 0.0;
  }
  r.precision = p_sum / static_cast<double>(k);
  r.recall = r_sum / static_cast<double>(k);
  r.f1 = f_sum / static_cast<double>(k);
  return r;
}

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kAccuracy: return "Accuracy";
    case Metric::kPrecision: return "Precision";
    case Metric::kRecall: return "Recall";
    case Metric::kF1: return "F1";
    case Metric::kMse: return "MSE";
  }
  return "?";
}

double metric_value(const RunMetrics& r, Metric m) {
  switch (m) {
    case Metric::kAccuracy: return r.accuracy;
    case Metric::kPrecision: return r.precision;
    case Metric::kRecall: return r.recall;
    case Metric::kF1: return r.f1;
    case Metric::kMse: return r.mse;
  }
  return 0.0;
}

MetricStats summarize(std::span<const double> values) {
  if (values.empty()) raise(ErrorKind::kRange, "no values to summarize");
  MetricStats s;
  s.max = *std::max_element(values.begin(), values.end());
  s.min = *std::min_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  // Clamp so rounding in the sum cannot push the mean outside [min, max].
  s.mean = std::clamp(sum / static_cast<double>(values.size()), s.min, s.max);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

ReportBundle make_bundle(std::string model, std::vector<RunMetrics> runs) {
  ReportBundle b;
  b.model = std::move(model);
  b.runs = std::move(runs);
  for (Metric m : kAllMetrics) {
    std::vector<double> v;
    for (const auto& r : b.runs) v.push_back(metric_value(r, m));
    b.stats[static_cast<std::size_t>(m)] = summarize(v);
  }
  return b;
}

}  // namespace wearnet

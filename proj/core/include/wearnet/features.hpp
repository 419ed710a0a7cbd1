#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "wearnet/ingest.hpp"

namespace wearnet {

/// Time-domain statistical features of one sample window.
enum class TsfKind {
  kRms,
  kKurtosis,
  kSkewness,
  kPeakToPeak,
  kCrestFactor,
  kShapeFactor,
  kImpulseFactor,
  kMarginFactor,
};

inline constexpr std::array<TsfKind, 8> kAllTsfKinds = {
    TsfKind::kRms,         TsfKind::kKurtosis,    TsfKind::kSkewness,
    TsfKind::kPeakToPeak,  TsfKind::kCrestFactor, TsfKind::kShapeFactor,
    TsfKind::kImpulseFactor, TsfKind::kMarginFactor};

/// Lower-case hyphenated name, e.g. "peak-to-peak".
std::string_view to_string(TsfKind kind);
/// Inverse of to_string; throws kConfig on unknown names.
TsfKind parse_tsf_kind(std::string_view name);

/// Value of one feature over `window`. Moments use the population standard
/// deviation. Peak-to-peak is max - min.
///
/// Throws kDegenerateStatistics when the window has zero variance (kurtosis,
/// skewness) or the feature's denominator is zero (crest/shape/impulse/margin).
double compute_tsf(std::span<const double> window, TsfKind kind);

/// compute_tsf of every snapshot, in series order.
std::vector<double> tsf_series(const SignalSeries& series, TsfKind kind);

/// Sliding-window (hop 1) mean of -v*log2(v) over consecutive TSF values.
/// Output j covers values[j, j + window_len). A zero value contributes 0.
/// Returns an empty vector when window_len > values.size().
std::vector<double> shannon_entropy(std::span<const double> values, std::size_t window_len);

struct FeatureSeries {
  TsfKind kind = TsfKind::kRms;
  std::vector<double> values;
  std::size_t window_len = 16;
  std::vector<double> entropy;  // length max(0, values.size() - window_len + 1)
};

FeatureSeries make_feature_series(const SignalSeries& series, TsfKind kind,
                                  std::size_t window_len);

}  // namespace wearnet

#include "wearnet/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wearnet/error.hpp"

namespace wearnet {
namespace {

struct Moments {
  double mean = 0.0;
  double sigma = 0.0;
};

Moments moments(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

double rms(std::span<const double> x) {
  double ss = 0.0;
  for (double v : x) ss += v * v;
  return std::sqrt(ss / static_cast<double>(x.size()));
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double mean_abs(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s / static_cast<double>(x.size());
}

double standardized_moment(std::span<const double> x, int order, TsfKind kind) {
  const Moments m = moments(x);
  // Treat round-off-level spread of a constant window as zero variance.
  if (!(m.sigma > 1e-14 * std::max(1.0, max_abs(x)))) {
    raise(ErrorKind::kDegenerateStatistics,
          std::string(to_string(kind)) + " of a zero-variance window");
  }
  double acc = 0.0;
  for (double v : x) {
    const double z = (v - m.mean) / m.sigma;
    acc += order == 4 ? z * z * z * z : z * z * z;
  }
  return acc / static_cast<double>(x.size());
}

double ratio(double num, double den, TsfKind kind) {
  if (!(den > 0.0)) {
    raise(ErrorKind::kDegenerateStatistics,
          std::string(to_string(kind)) + " with zero denominator");
  }
  return num / den;
}

constexpr std::array<std::string_view, 8> kNames = {
    "rms",          "kurtosis",     "skewness",       "peak-to-peak",
    "crest-factor", "shape-factor", "impulse-factor", "margin-factor"};

}  // namespace

std::string_view to_string(TsfKind kind) { return kNames[static_cast<std::size_t>(kind)]; }

TsfKind parse_tsf_kind(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<TsfKind>(i);
  }
  raise(ErrorKind::kConfig, "unknown TSF kind '" + std::string(name) + "'");
}

double compute_tsf(std::span<const double> window, TsfKind kind) {
  if (window.empty()) raise(ErrorKind::kRange, "empty window");
  switch (kind) {
    case TsfKind::kRms:
      return rms(window);
    case TsfKind::kKurtosis:
      return standardized_moment(window, 4, kind);
    case TsfKind::kSkewness:
      return standardized_moment(window, 3, kind);
    case TsfKind::kPeakToPeak: {
      const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
      return *hi - *lo;
    }
    case TsfKind::kCrestFactor:
      return ratio(max_abs(window), rms(window), kind);
    case TsfKind::kShapeFactor:
      return ratio(rms(window), mean_abs(window), kind);
    case TsfKind::kImpulseFactor:
      return ratio(max_abs(window), mean_abs(window), kind);
    case TsfKind::kMarginFactor: {
      double s = 0.0;
      for (double v : window) s += std::sqrt(std::abs(v));
      const double m = s / static_cast<double>(window.size());
      return ratio(max_abs(window), m * m, kind);
    }
  }
  raise(ErrorKind::kDomain, "unknown TSF kind");
}

std::vector<double> tsf_series(const SignalSeries& series, TsfKind kind) {
  if (series.empty()) raise(ErrorKind::kStructural, "empty series");
  std::vector<double> out;
  out.reserve(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    try {
      out.push_back(compute_tsf(series[k].samples, kind));
    } catch (const Error& e) {
      raise(e.kind(), "snapshot " + std::to_string(k) + " (" + series[k].id + "): " + e.what());
    }
  }
  return out;
}

std::vector<double> shannon_entropy(std::span<const double> values, std::size_t window_len) {
  if (window_len == 0) raise(ErrorKind::kRange, "entropy window length must be >= 1");
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!(v >= 0.0)) {
      raise(ErrorKind::kDomain, "entropy input " + std::to_string(i) + " is negative or NaN");
    }
    terms[i] = v == 0.0 ? 0.0 : -v * std::log2(v);
  }
  if (window_len > values.size()) return {};

  std::vector<double> out(values.size() - window_len + 1);
  std::vector<double> scratch(window_len);
  for (std::size_t j = 0; j < out.size(); ++j) {
    // Summed in sorted order so a window's value does not depend on the
    // order of its members.
    std::copy_n(terms.begin() + static_cast<std::ptrdiff_t>(j), window_len, scratch.begin());
    std::sort(scratch.begin(), scratch.end());
    double sum = 0.0;
    for (double t : scratch) sum += t;
    out[j] = sum / static_cast<double>(window_len);
  }
  return out;
}

FeatureSeries make_feature_series(const SignalSeries& series, TsfKind kind,
                                  std::size_t window_len) {
  FeatureSeries fs;
  fs.kind = kind;
  fs.window_len = window_len;
  fs.values = tsf_series(series, kind);
  fs.entropy = shannon_entropy(fs.values, window_len);
  return fs;
}

}  // namespace wearnet

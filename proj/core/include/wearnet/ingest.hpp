#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wearnet {

using Timestamp = std::chrono::sys_seconds;

/// "YYYY-MM-DDTHH:MM:SS"
std::string format_timestamp(Timestamp t);

/// One recorded file: all accelerometer channels sampled at the same instants.
struct VibrationSnapshot {
  Timestamp timestamp{};
  std::vector<std::vector<double>> channels;

  std::size_t samples_per_channel() const {
    return channels.empty() ? 0 : channels.front().size();
  }
};

/// One channel of one snapshot, tagged with the file it came from.
struct SeriesEntry {
  std::string id;  // snapshot file name, e.g. "2004.02.12.10.32.39"
  Timestamp timestamp{};
  std::vector<double> samples;
};

/// Time-ordered single-channel view of a run.
///
/// Construction validates that timestamps strictly increase and that all
/// snapshots have the same length.
class SignalSeries {
 public:
  SignalSeries() = default;
  SignalSeries(std::vector<SeriesEntry> snapshots, std::size_t channel_index);

  const std::vector<SeriesEntry>& snapshots() const { return snapshots_; }
  std::size_t size() const { return snapshots_.size(); }
  bool empty() const { return snapshots_.empty(); }
  const SeriesEntry& operator[](std::size_t i) const { return snapshots_[i]; }
  std::size_t channel_index() const { return channel_index_; }
  std::size_t samples_per_snapshot() const {
    return snapshots_.empty() ? 0 : snapshots_.front().samples.size();
  }

 private:
  std::vector<SeriesEntry> snapshots_;
  std::size_t channel_index_ = 0;
};

/// Parses one IMS ASCII file: one row per sampling instant, whitespace
/// (tab) separated columns, one column per channel. Blank lines are skipped.
/// expected_channels == 0 takes the column count of the first row.
VibrationSnapshot parse_snapshot_file(std::string_view text, std::size_t expected_channels);

/// Inverse of parse_snapshot_file; shortest round-trip decimal formatting.
std::string write_snapshot_file(const VibrationSnapshot& snapshot);

/// "2003.10.22.12.06.24" -> 2003-10-22T12:06:24. Accepts a path; only the
/// file name is inspected.
Timestamp parse_filename_timestamp(std::string_view name);

/// Inverse of parse_filename_timestamp.
std::string format_filename_timestamp(Timestamp t);

/// Loads every file in `directory` whose name is an IMS timestamp, keeps only
/// `channel_index`, and orders by timestamp. Other files are ignored.
SignalSeries load_run(const std::filesystem::path& directory, std::size_t channel_index);

struct DegradationProfile {
  double base_amplitude = 0.1;   // amplitude of the stationary shaft tone
  double noise_level = 0.01;     // std of the wear noise at the start of the run
  double wear_growth = 2.0;      // log-growth of the noise envelope over the run
  std::size_t snapshots = 100;
  std::size_t samples_per_snapshot = 4096;
  /// 0: smooth exponential envelope. L > 0: envelope quantized to L plateaus
  /// (a staircase of discrete wear levels).
  std::size_t levels = 0;
  double tone_period = 50.0;     // samples per cycle of the stationary tone
  std::int64_t start_epoch_seconds = 1076581959;  // 2004-02-12 10:32:39
  std::int64_t interval_seconds = 600;
};

/// Noise multiplier for snapshot k; non-decreasing in k, identically 1 when
/// wear_growth is 0.
double degradation_envelope(const DegradationProfile& profile, std::size_t k);

/// Synthetic run-to-failure series: a fixed-amplitude tone plus zero-mean
/// Gaussian noise scaled by degradation_envelope. Pure function of
/// (profile, seed).
SignalSeries synth_run(const DegradationProfile& profile, std::uint64_t seed);

/// Writes a series as single-channel IMS files named by timestamp.
void write_run(const SignalSeries& series, const std::filesystem::path& directory);

}  // namespace wearnet

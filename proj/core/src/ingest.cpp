#include "wearnet/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wearnet/error.hpp"
#include "wearnet/rng.hpp"

namespace wearnet {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

double parse_double(std::string_view field, std::size_t line_no) {
  std::string_view digits = field;
  if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
    raise(ErrorKind::kParse,
          "line " + std::to_string(line_no) + ": not a number: '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    raise(ErrorKind::kParse, "line " + std::to_string(line_no) + ": non-finite value");
  }
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int to_int(std::string_view s, bool& ok) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  ok = ok && ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
  return v;
}

}  // namespace

std::string format_timestamp(Timestamp t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{t - day};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

SignalSeries::SignalSeries(std::vector<SeriesEntry> snapshots, std::size_t channel_index)
    : snapshots_(std::move(snapshots)), channel_index_(channel_index) {
  for (std::size_t k = 0; k < snapshots_.size(); ++k) {
    if (snapshots_[k].samples.empty()) {
      raise(ErrorKind::kStructural, "snapshot " + snapshots_[k].id + " has no samples");
    }
    if (snapshots_[k].samples.size() != snapshots_.front().samples.size()) {
      raise(ErrorKind::kStructural, "snapshot " + snapshots_[k].id + " has " +
                                        std::to_string(snapshots_[k].samples.size()) +
                                        " samples, expected " +
                                        std::to_string(snapshots_.front().samples.size()));
    }
    if (k > 0 && snapshots_[k].timestamp <= snapshots_[k - 1].timestamp) {
      raise(ErrorKind::kStructural, "timestamps not strictly increasing at snapshot " +
                                        snapshots_[k].id);
    }
  }
}

VibrationSnapshot parse_snapshot_file(std::string_view text, std::size_t expected_channels) {
  VibrationSnapshot snap;
  std::vector<double> row;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    row.clear();
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_space(line[i])) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && !is_space(line[j])) ++j;
      row.push_back(parse_double(line.substr(i, j - i), line_no));
      i = j;
    }
    if (row.empty()) continue;

    if (expected_channels == 0) expected_channels = row.size();
    if (row.size() != expected_channels) {
      raise(ErrorKind::kStructural, "line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(expected_channels) + " columns, found " +
                                        std::to_string(row.size()));
    }
    if (snap.channels.empty()) snap.channels.resize(expected_channels);
    for (std::size_t c = 0; c < row.size(); ++c) snap.channels[c].push_back(row[c]);
  }
  if (snap.channels.empty()) raise(ErrorKind::kStructural, "snapshot file has no data rows");
  return snap;
}

std::string write_snapshot_file(const VibrationSnapshot& snapshot) {
  std::string out;
  char buf[64];
  for (std::size_t r = 0; r < snapshot.samples_per_channel(); ++r) {
    for (std::size_t c = 0; c < snapshot.channels.size(); ++c) {
      if (c > 0) out.push_back('\t');
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, snapshot.channels[c][r]);
      out.append(buf, ptr);
    }
    out.push_back('\n');
  }
  return out;
}

Timestamp parse_filename_timestamp(std::string_view name) {
  const std::size_t slash = name.find_last_of("/\\");
  if (slash != std::string_view::npos) name.remove_prefix(slash + 1);

  int fields[6];
  bool ok = true;
  std::size_t start = 0;
  for (int f = 0; f < 6 && ok; ++f) {
    std::size_t dot = name.find('.', start);
    if (f == 5) {
      if (dot != std::string_view::npos) ok = false;
      dot = name.size();
    } else if (dot == std::string_view::npos) {
      ok = false;
      break;
    }
    fields[f] = to_int(name.substr(start, dot - start), ok);
    start = dot + 1;
  }
  if (ok) {
    using namespace std::chrono;
    const year_month_day ymd{year{fields[0]}, month{static_cast<unsigned>(fields[1])},
                             day{static_cast<unsigned>(fields[2])}};
    ok = ymd.ok() && fields[3] >= 0 && fields[3] < 24 && fields[4] >= 0 && fields[4] < 60 &&
         fields[5] >= 0 && fields[5] < 60;
    if (ok) {
      return sys_days{ymd} + hours{fields[3]} + minutes{fields[4]} + seconds{fields[5]};
    }
  }
  raise(ErrorKind::kFormat, "not an IMS snapshot name (YYYY.MM.DD.HH.MM.SS): '" +
                                std::string(name) + "'");
}

std::string format_filename_timestamp(Timestamp t) {
  std::string iso = format_timestamp(t);
  std::replace(iso.begin(), iso.end(), '-', '.');
  std::replace(iso.begin(), iso.end(), 'T', '.');
  std::replace(iso.begin(), iso.end(), ':', '.');
  return iso;
}

SignalSeries load_run(const std::filesystem::path& directory, std::size_t channel_index) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) {
    raise(ErrorKind::kIo, "not a directory: " + directory.string());
  }

  struct Candidate {
    fs::path path;
    Timestamp timestamp;
  };
  std::vector<Candidate> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    try {
      files.push_back({entry.path(), parse_filename_timestamp(entry.path().filename().string())});
    } catch (const Error&) {
      // not a snapshot file
    }
  }
  if (files.empty()) {
    raise(ErrorKind::kStructural, "no snapshot files in " + directory.string());
  }
  std::sort(files.begin(), files.end(),
            [](const Candidate& a, const Candidate& b) { return a.timestamp < b.timestamp; });

  std::vector<SeriesEntry> entries;
  entries.reserve(files.size());
  std::size_t channel_count = 0;
  for (const auto& file : files) {
    const std::string name = file.path.filename().string();
    VibrationSnapshot snap;
    try {
      snap = parse_snapshot_file(read_file(file.path), channel_count);
    } catch (const Error& e) {
      raise(e.kind(), name + ": " + e.what());
    }
    channel_count = snap.channels.size();
    if (channel_index >= channel_count) {
      raise(ErrorKind::kRange, "channel " + std::to_string(channel_index) + " out of range; " +
                                   name + " has " + std::to_string(channel_count) + " channels");
    }
    entries.push_back({name, file.timestamp, std::move(snap.channels[channel_index])});
  }
  return SignalSeries(std::move(entries), channel_index);
}

double degradation_envelope(const DegradationProfile& profile, std::size_t k) {
  double progress = 0.0;
  if (profile.levels > 0) {
    const std::size_t level =
        std::min(profile.levels - 1, k * profile.levels / std::max<std::size_t>(profile.snapshots, 1));
    progress = profile.levels > 1 ? static_cast<double>(level) / (profile.levels - 1) : 0.0;
  } else if (profile.snapshots > 1) {
    progress = static_cast<double>(k) / static_cast<double>(profile.snapshots - 1);
  }
  return std::exp(profile.wear_growth * progress);
}

SignalSeries synth_run(const DegradationProfile& profile, std::uint64_t seed) {
  if (!(profile.base_amplitude > 0) || !(profile.noise_level > 0) || !(profile.wear_growth >= 0) ||
      profile.snapshots == 0 || profile.samples_per_snapshot == 0 || !(profile.tone_period > 0)) {
    raise(ErrorKind::kConfig, "degradation profile quantities must be positive");
  }
  Rng rng(seed);
  std::vector<SeriesEntry> entries;
  entries.reserve(profile.snapshots);
  const double omega = 2.0 * std::numbers::pi / profile.tone_period;
  for (std::size_t k = 0; k < profile.snapshots; ++k) {
    SeriesEntry e;
    e.timestamp = Timestamp{std::chrono::seconds{profile.start_epoch_seconds +
                                                 static_cast<std::int64_t>(k) *
                                                     profile.interval_seconds}};
    e.id = format_filename_timestamp(e.timestamp);
    const double sigma = profile.noise_level * degradation_envelope(profile, k);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    e.samples.resize(profile.samples_per_snapshot);
    for (std::size_t t = 0; t < e.samples.size(); ++t) {
      e.samples[t] = profile.base_amplitude * std::sin(omega * static_cast<double>(t) + phase) +
                     sigma * rng.normal();
    }
    entries.push_back(std::move(e));
  }
  return SignalSeries(std::move(entries), 0);
}

void write_run(const SignalSeries& series, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  for (const auto& e : series.snapshots()) {
    VibrationSnapshot snap{e.timestamp, {e.samples}};
    const auto path = directory / format_filename_timestamp(e.timestamp);
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::kIo, "cannot write " + path.string());
    out << write_snapshot_file(snap);
  }
}

}  // namespace wearnet

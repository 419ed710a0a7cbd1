#include "wearnet/imaging.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wearnet/error.hpp"
#include "wearnet/pgm.hpp"
#include "wearnet/rng.hpp"

namespace wearnet {

void ImagingConfig::validate(std::size_t samples_per_channel) const {
  if (size == 0) raise(ErrorKind::kConfig, "image size M must be >= 1");
  if (step == 0) raise(ErrorKind::kConfig, "image step s must be >= 1");
  if (size * size > samples_per_channel) {
    raise(ErrorKind::kConfig, "M^2 = " + std::to_string(size * size) + " exceeds " +
                                  std::to_string(samples_per_channel) + " samples per snapshot");
  }
}

std::size_t image_count(std::size_t n, std::size_t m, std::size_t s) {
  if (m == 0 || s == 0) raise(ErrorKind::kRange, "M and s must be positive");
  const std::size_t area = m * m;
  if (n < area) return 0;
  return (n - area) / s + 1;
}

std::vector<std::uint8_t> signal_to_image(std::span<const double> window, std::size_t m) {
  if (window.size() != m * m) {
    raise(ErrorKind::kShape, "window has " + std::to_string(window.size()) +
                                 " samples, expected " + std::to_string(m * m));
  }
  std::vector<std::uint8_t> px(window.size(), 0);
  if (window.empty()) return px;
  const auto [lo_it, hi_it] = std::minmax_element(window.begin(), window.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  if (!(range > 0.0)) return px;
  for (std::size_t i = 0; i < window.size(); ++i) {
    px[i] = static_cast<std::uint8_t>(std::round((window[i] - lo) / range * 255.0));
  }
  return px;
}

void for_each_image(const SignalSeries& series, const WearLabeling& labeling,
                    const ImagingConfig& cfg, const std::function<void(SignalImage&&)>& sink) {
  if (labeling.assignment.size() != series.size()) {
    raise(ErrorKind::kShape, "labeling covers " + std::to_string(labeling.assignment.size()) +
                                 " snapshots, series has " + std::to_string(series.size()));
  }
  cfg.validate(series.samples_per_snapshot());
  const std::size_t area = cfg.size * cfg.size;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& samples = series[k].samples;
    const std::size_t count = image_count(samples.size(), cfg.size, cfg.step);
    for (std::size_t i = 0; i < count; ++i) {
      SignalImage img;
      img.size = cfg.size;
      try {
        img.pixels = signal_to_image(
            std::span<const double>(samples).subspan(i * cfg.step, area), cfg.size);
      } catch (const Error& e) {
        raise(e.kind(), "snapshot " + series[k].id + " window " + std::to_string(i) + ": " +
                            e.what());
      }
      img.label = labeling.assignment[k];
      img.snapshot_id = series[k].id;
      img.sub_index = i;
      sink(std::move(img));
    }
  }
}

std::vector<SignalImage> imagify_run(const SignalSeries& series, const WearLabeling& labeling,
                                     const ImagingConfig& cfg) {
  std::vector<SignalImage> out;
  for_each_image(series, labeling, cfg, [&](SignalImage&& img) { out.push_back(std::move(img)); });
  return out;
}

std::vector<std::size_t> balance_indices(std::span<const std::size_t> labels, std::size_t k,
                                         std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= k) raise(ErrorKind::kRange, "label " + std::to_string(labels[i]) + " >= k");
    by_class[labels[i]].push_back(i);
  }
  std::size_t smallest = labels.size();
  for (std::size_t c = 0; c < k; ++c) {
    if (by_class[c].empty()) raise(ErrorKind::kBalance, "class " + std::to_string(c) + " is empty");
    smallest = std::min(smallest, by_class[c].size());
  }
  Rng rng(seed);
  std::vector<std::size_t> keep;
  keep.reserve(smallest * k);
  for (auto& members : by_class) {
    if (members.size() > smallest) {
      // Partial Fisher-Yates: the first `smallest` slots become the sample.
      for (std::size_t i = 0; i < smallest; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(members.size() - i));
        std::swap(members[i], members[j]);
      }
      members.resize(smallest);
    }
    keep.insert(keep.end(), members.begin(), members.end());
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

std::vector<SignalImage> balance_classes(const std::vector<SignalImage>& images, std::size_t k,
                                         std::uint64_t seed) {
  std::vector<std::size_t> labels;
  labels.reserve(images.size());
  for (const auto& img : images) labels.push_back(img.label);
  std::vector<SignalImage> out;
  for (std::size_t idx : balance_indices(labels, k, seed)) out.push_back(images[idx]);
  return out;
}

std::string image_file_name(const SignalImage& image) {
  return image.snapshot_id + "_" + std::to_string(image.sub_index) + ".pgm";
}

std::string write_manifest(const std::vector<ManifestRow>& rows) {
  std::string out = std::string(kManifestHeader) + "\n";
  for (const auto& r : rows) {
    out += r.path + "," + std::to_string(r.label) + "," + r.snapshot_id + "," +
           std::to_string(r.sub_index) + "\n";
  }
  return out;
}

std::vector<ManifestRow> parse_manifest(std::string_view text) {
  std::vector<ManifestRow> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto to_size = [&](std::string_view s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      raise(ErrorKind::kParse, "manifest line " + std::to_string(line_no) + ": bad integer");
    }
    return v;
  };
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kManifestHeader) raise(ErrorKind::kFormat, "manifest header mismatch");
      continue;
    }
    std::vector<std::string_view> f;
    std::size_t s = 0;
    for (std::size_t c = line.find(','); c != std::string_view::npos; c = line.find(',', s)) {
      f.push_back(line.substr(s, c - s));
      s = c + 1;
    }
    f.push_back(line.substr(s));
    if (f.size() != 4) {
      raise(ErrorKind::kStructural, "manifest line " + std::to_string(line_no) + ": expected 4 fields");
    }
    rows.push_back({std::string(f[0]), to_size(f[1]), std::string(f[2]), to_size(f[3])});
  }
  if (line_no == 0) raise(ErrorKind::kFormat, "empty manifest");
  return rows;
}

void save_image_set(const std::vector<SignalImage>& images, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  std::vector<ManifestRow> rows;
  rows.reserve(images.size());
  for (const auto& img : images) {
    const std::string name = image_file_name(img);
    write_pgm(directory / name, GrayImage{img.size, img.size, img.pixels});
    rows.push_back({name, img.label, img.snapshot_id, img.sub_index});
  }
  std::ofstream out(directory / "manifest.csv", std::ios::binary);
  if (!out) raise(ErrorKind::kIo, "cannot write manifest in " + directory.string());
  out << write_manifest(rows);
}

std::vector<SignalImage> load_image_set(const std::filesystem::path& directory) {
  std::ifstream in(directory / "manifest.csv", std::ios::binary);
  if (!in) raise(ErrorKind::kIo, "no manifest.csv in " + directory.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::vector<SignalImage> images;
  for (const auto& row : parse_manifest(buf.str())) {
    GrayImage g = read_pgm(directory / row.path);
    if (g.width != g.height) raise(ErrorKind::kShape, row.path + " is not square");
    if (!images.empty() && g.width != images.front().size) {
      raise(ErrorKind::kShape, row.path + " differs in size from the first image");
    }
    images.push_back({g.width, std::move(g.pixels), row.label, row.snapshot_id, row.sub_index});
  }
  return images;
}

}  // namespace wearnet

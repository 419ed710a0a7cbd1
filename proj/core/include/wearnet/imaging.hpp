#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wearnet/ingest.hpp"
#include "wearnet/labeling.hpp"

namespace wearnet {

/// M x M 8-bit grayscale image cut from one snapshot.
struct SignalImage {
  std::size_t size = 0;              // M
  std::vector<std::uint8_t> pixels;  // row-major, size * size
  std::size_t label = 0;             // wear level of the source snapshot
  std::string snapshot_id;
  std::size_t sub_index = 0;         // window i starts at sample i * step

  std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * size + col]; }
};

struct ImagingConfig {
  std::size_t size = 64;  // M
  std::size_t step = 64;  // s
  std::uint64_t balance_seed = 0;

  /// Throws kConfig unless step >= 1 and size^2 <= samples_per_channel.
  void validate(std::size_t samples_per_channel) const;
};

/// Number of complete M^2 windows at stride s in N samples:
/// 0 if N < M^2, else floor((N - M^2) / s) + 1.
std::size_t image_count(std::size_t n, std::size_t m, std::size_t s);

/// Min-max normalizes `window` (length M^2) to 0..255, rounding half away
/// from zero, filling rows left to right, top to bottom. A constant window
/// maps to all zeros.
std::vector<std::uint8_t> signal_to_image(std::span<const double> window, std::size_t m);

/// Calls `sink` for every image of every snapshot in (snapshot, i) order.
void for_each_image(const SignalSeries& series, const WearLabeling& labeling,
                    const ImagingConfig& cfg, const std::function<void(SignalImage&&)>& sink);

std::vector<SignalImage> imagify_run(const SignalSeries& series, const WearLabeling& labeling,
                                     const ImagingConfig& cfg);

/// Indices (ascending) of a class-balanced subset: every class in [0, k) is
/// downsampled without replacement to the smallest class size. Throws
/// kBalance naming the first empty class.
std::vector<std::size_t> balance_indices(std::span<const std::size_t> labels, std::size_t k,
                                         std::uint64_t seed);

std::vector<SignalImage> balance_classes(const std::vector<SignalImage>& images, std::size_t k,
                                         std::uint64_t seed);

/// File name used on disk: "<snapshot_id>_<sub_index>.pgm".
std::string image_file_name(const SignalImage& image);

struct ManifestRow {
  std::string path;  // relative to the manifest's directory
  std::size_t label = 0;
  std::string snapshot_id;
  std::size_t sub_index = 0;
};

inline constexpr const char* kManifestHeader = "path,label,snapshot,sub_index";

std::string write_manifest(const std::vector<ManifestRow>& rows);
std::vector<ManifestRow> parse_manifest(std::string_view text);

/// Writes PGM files plus manifest.csv into `directory`.
void save_image_set(const std::vector<SignalImage>& images, const std::filesystem::path& directory);
/// Reads manifest.csv and every PGM it names.
std::vector<SignalImage> load_image_set(const std::filesystem::path& directory);

}  // namespace wearnet

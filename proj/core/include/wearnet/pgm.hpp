#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wearnet {

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

/// Binary PGM (P5), maxval 255, header "P5\n<w> <h>\n255\n".
std::string encode_pgm(const GrayImage& image);
/// Accepts any whitespace and '#' comments in the header; maxval must be 255.
GrayImage decode_pgm(std::string_view bytes);

void write_pgm(const std::filesystem::path& path, const GrayImage& image);
GrayImage read_pgm(const std::filesystem::path& path);

}  // namespace wearnet

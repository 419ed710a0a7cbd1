#include "wearnet/pgm.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "wearnet/error.hpp"

namespace wearnet {
namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t number(const char* what) {
    skip_space_and_comments();
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(bytes_.data() + pos_, bytes_.data() + bytes_.size(), v);
    if (ec != std::errc()) raise(ErrorKind::kFormat, std::string("PGM header: bad ") + what);
    pos_ = static_cast<std::size_t>(ptr - bytes_.data());
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_pgm(const GrayImage& image) {
  if (image.pixels.size() != image.width * image.height) {
    raise(ErrorKind::kShape, "pixel count does not match width x height");
  }
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                    "\n255\n";
  out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
  return out;
}

GrayImage decode_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    raise(ErrorKind::kFormat, "not a binary PGM (missing P5 magic)");
  }
  HeaderReader reader(bytes);
  reader.advance(2);
  GrayImage img;
  img.width = reader.number("width");
  img.height = reader.number("height");
  const std::size_t maxval = reader.number("maxval");
  if (maxval != 255) raise(ErrorKind::kFormat, "PGM maxval must be 255");
  if (reader.pos() >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[reader.pos()]))) {
    raise(ErrorKind::kFormat, "PGM header not terminated by whitespace");
  }
  reader.advance(1);
  const std::size_t n = img.width * img.height;
  if (bytes.size() - reader.pos() != n) {
    raise(ErrorKind::kFormat, "PGM raster has " + std::to_string(bytes.size() - reader.pos()) +
                                  " bytes, expected " + std::to_string(n));
  }
  const auto* p = reinterpret_cast<const std::uint8_t*>(bytes.data() + reader.pos());
  img.pixels.assign(p, p + n);
  return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::kIo, "cannot write " + path.string());
  out << encode_pgm(image);
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return decode_pgm(buf.str());
  } catch (const Error& e) {
    raise(e.kind(), path.filename().string() + ": " + e.what());
  }
}

}  // namespace wearnet

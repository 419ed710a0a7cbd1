#include "wearnet/cnn/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "wearnet/cnn/network.hpp"
#include "wearnet/error.hpp"

namespace wearnet::cnn {
namespace {

template <typename U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <typename U>
U get_le(std::string_view bytes, std::size_t& pos) {
  if (bytes.size() - pos < sizeof(U)) raise(ErrorKind::kFormat, "checkpoint truncated");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    v |= static_cast<U>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  }
  pos += sizeof(U);
  return v;
}

}  // namespace

std::string encode_checkpoint(const ModelSpec& spec, const std::vector<double>& params) {
  if (params.size() != parameter_count(spec)) {
    raise(ErrorKind::kShape, "parameter count does not match model spec");
  }
  const std::string text = serialize_model_spec(spec);
  std::string out = "WNCK";
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  put_le<std::uint64_t>(out, params.size());
  out.reserve(out.size() + params.size() * 8);
  for (double p : params) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(p));
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  if (bytes.substr(0, 4) != "WNCK") raise(ErrorKind::kFormat, "not a wearnet checkpoint");
  std::size_t pos = 4;
  const auto version = get_le<std::uint32_t>(bytes, pos);
  if (version != kCheckpointVersion) {
    raise(ErrorKind::kFormat, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto len = get_le<std::uint32_t>(bytes, pos);
  if (bytes.size() - pos < len) raise(ErrorKind::kFormat, "checkpoint truncated");
  Checkpoint ck;
  ck.spec = parse_model_spec(bytes.substr(pos, len));
  pos += len;
  const auto count = get_le<std::uint64_t>(bytes, pos);
  if (count != parameter_count(ck.spec)) {
    raise(ErrorKind::kFormat, "checkpoint parameter count does not match its model spec");
  }
  if ((bytes.size() - pos) != count * 8) raise(ErrorKind::kFormat, "checkpoint size mismatch");
  ck.params.resize(count);
  for (auto& p : ck.params) p = std::bit_cast<double>(get_le<std::uint64_t>(bytes, pos));
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const ModelSpec& spec,
                     const std::vector<double>& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::kIo, "cannot write " + path.string());
  out << encode_checkpoint(spec, params);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_checkpoint(buf.str());
}

}  // namespace wearnet::cnn

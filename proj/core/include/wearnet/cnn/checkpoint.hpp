#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wearnet/cnn/model_spec.hpp"

namespace wearnet::cnn {

// Layout (all integers little-endian):
//   "WNCK"  magic, 4 bytes
//   u32     format version (1)
//   u32     byte length L of the model spec text
//   L bytes serialize_model_spec() output
//   u64     parameter count P
//   P x f64 parameters in layer order (weights then bias per layer)
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelSpec spec;
  std::vector<double> params;
};

std::string encode_checkpoint(const ModelSpec& spec, const std::vector<double>& params);
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const ModelSpec& spec,
                     const std::vector<double>& params);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace wearnet::cnn

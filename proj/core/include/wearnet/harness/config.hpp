#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wearnet/cnn/model_spec.hpp"
#include "wearnet/cnn/trainer.hpp"
#include "wearnet/features.hpp"
#include "wearnet/harness/experiment.hpp"
#include "wearnet/imaging.hpp"
#include "wearnet/ingest.hpp"
#include "wearnet/labeling.hpp"

namespace wearnet {

/// Everything the CLI needs, loaded from one JSON file. Every field has a
/// default; unknown keys are rejected.
struct Config {
  struct Data {
    std::string dir;           // IMS run directory; empty with synthetic = true
    std::size_t channel = 0;
    bool synthetic = false;
    DegradationProfile profile;
    std::uint64_t synthetic_seed = 0;
  } data;

  struct Features {
    TsfKind tsf = TsfKind::kRms;
    std::size_t entropy_window = 16;
  } features;

  struct Labeling {
    KMeansOptions kmeans;      // k defaults to 7
    bool two_d = false;        // cluster (entropy, TSF) pairs instead of entropy alone
  } labeling;

  struct Imaging {
    ImagingConfig image;
    bool balance = true;
    std::string out_dir = "images";
  } imaging;

  cnn::PresetOptions model{"alexnet-mod", 64, 7, 2560, 256, 1};

  RunOptions run;

  struct Experiment {
    std::size_t runs = 10;
    std::uint64_t base_seed = 0;
    std::vector<std::size_t> sweep_i{512, 1024, 1536, 2048, 2560, 3072, 3584};
    std::vector<std::size_t> sweep_j{0};
  } experiment;
};

Config parse_config(std::string_view json_text);
Config load_config(const std::filesystem::path& path);
/// Full config, defaults included, as JSON.
std::string dump_config(const Config& config);

}  // namespace wearnet

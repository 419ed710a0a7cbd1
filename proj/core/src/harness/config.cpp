#include "wearnet/harness/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "wearnet/error.hpp"

namespace wearnet {
namespace {

using nlohmann::json;

// Reads known keys from one JSON object and rejects anything else.
class Section {
 public:
  Section(const json& root, std::string name) : name_(std::move(name)) {
    if (root.contains(name_)) {
      obj_ = root.at(name_);
      if (!obj_.is_object()) raise(ErrorKind::kConfig, "'" + name_ + "' must be an object");
    } else {
      obj_ = json::object();
    }
  }
  Section(const json& obj, std::string name, bool) : obj_(obj), name_(std::move(name)) {}

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception& e) {
      raise(ErrorKind::kConfig, name_ + "." + key + ": " + e.what());
    }
  }

  Section sub(const char* key) {
    seen_.insert(key);
    Section s(obj_, name_ + "." + key, true);
    if (obj_.contains(key)) {
      if (!obj_.at(key).is_object()) raise(ErrorKind::kConfig, name_ + "." + key + " must be an object");
      s.obj_ = obj_.at(key);
    } else {
      s.obj_ = json::object();
    }
    return s;
  }

  void finish() const {
    for (const auto& [k, v] : obj_.items()) {
      if (!seen_.count(k)) raise(ErrorKind::kConfig, "unknown key '" + name_ + "." + k + "'");
    }
  }

 private:
  json obj_;
  std::string name_;
  std::set<std::string> seen_;
};

json profile_json(const DegradationProfile& p) {
  return {{"base_amplitude", p.base_amplitude}, {"noise_level", p.noise_level},
          {"wear_growth", p.wear_growth},       {"snapshots", p.snapshots},
          {"samples_per_snapshot", p.samples_per_snapshot},
          {"levels", p.levels},                 {"tone_period", p.tone_period}};
}

}  // namespace

Config parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    raise(ErrorKind::kConfig, std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) raise(ErrorKind::kConfig, "config root must be an object");
  for (const auto& [k, v] : root.items()) {
    static const std::set<std::string> known = {"data",  "features", "labeling",  "imaging",
                                                "model", "training", "experiment"};
    if (!known.count(k)) raise(ErrorKind::kConfig, "unknown section '" + k + "'");
  }

  Config c;
  {
    Section s(root, "data");
    s.get("dir", c.data.dir);
    s.get("channel", c.data.channel);
    s.get("synthetic", c.data.synthetic);
    s.get("synthetic_seed", c.data.synthetic_seed);
    Section p = s.sub("profile");
    p.get("base_amplitude", c.data.profile.base_amplitude);
    p.get("noise_level", c.data.profile.noise_level);
    p.get("wear_growth", c.data.profile.wear_growth);
    p.get("snapshots", c.data.profile.snapshots);
    p.get("samples_per_snapshot", c.data.profile.samples_per_snapshot);
    p.get("levels", c.data.profile.levels);
    p.get("tone_period", c.data.profile.tone_period);
    p.finish();
    s.finish();
  }
  {
    Section s(root, "features");
    std::string tsf(to_string(c.features.tsf));
    s.get("tsf", tsf);
    c.features.tsf = parse_tsf_kind(tsf);
    s.get("entropy_window", c.features.entropy_window);
    s.finish();
  }
  {
    Section s(root, "labeling");
    s.get("k", c.labeling.kmeans.k);
    s.get("seed", c.labeling.kmeans.seed);
    s.get("max_iter", c.labeling.kmeans.max_iter);
    s.get("tol", c.labeling.kmeans.tol);
    s.get("restarts", c.labeling.kmeans.restarts);
    std::string mode = c.labeling.two_d ? "2d" : "1d";
    s.get("mode", mode);
    if (mode != "1d" && mode != "2d") raise(ErrorKind::kConfig, "labeling.mode must be 1d or 2d");
    c.labeling.two_d = mode == "2d";
    s.finish();
  }
  {
    Section s(root, "imaging");
    s.get("m", c.imaging.image.size);
    s.get("step", c.imaging.image.step);
    s.get("seed", c.imaging.image.balance_seed);
    s.get("balance", c.imaging.balance);
    s.get("out_dir", c.imaging.out_dir);
    s.finish();
  }
  {
    Section s(root, "model");
    s.get("preset", c.model.preset);
    std::vector<std::size_t> fc{c.model.fc1, c.model.fc2};
    s.get("fc", fc);
    if (fc.empty() || fc.size() > 2) raise(ErrorKind::kConfig, "model.fc must list 1 or 2 widths");
    c.model.fc1 = fc[0];
    c.model.fc2 = fc.size() > 1 ? fc[1] : 0;
    s.get("width_divisor", c.model.width_divisor);
    s.finish();
  }
  {
    Section s(root, "training");
    std::string opt = "adam";
    s.get("optimizer", opt);
    c.run.training.optimizer.kind = cnn::parse_optimizer_kind(opt);
    s.get("learning_rate", c.run.training.optimizer.learning_rate);
    s.get("momentum", c.run.training.optimizer.momentum);
    s.get("epochs", c.run.training.epochs);
    s.get("batch", c.run.training.batch_size);
    s.get("train_fraction", c.run.train_fraction);
    s.get("split_by_snapshot", c.run.split_by_snapshot);
    s.finish();
  }
  {
    Section s(root, "experiment");
    s.get("runs", c.experiment.runs);
    s.get("base_seed", c.experiment.base_seed);
    s.get("sweep_i", c.experiment.sweep_i);
    s.get("sweep_j", c.experiment.sweep_j);
    s.finish();
  }
  c.model.input_size = c.imaging.image.size;
  c.model.classes = c.labeling.kmeans.k;
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::kConfig, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const Config& c) {
  json fc = json::array({c.model.fc1});
  if (c.model.fc2 > 0) fc.push_back(c.model.fc2);
  json root = {
      {"data",
       {{"dir", c.data.dir},
        {"channel", c.data.channel},
        {"synthetic", c.data.synthetic},
        {"synthetic_seed", c.data.synthetic_seed},
        {"profile", profile_json(c.data.profile)}}},
      {"features",
       {{"tsf", std::string(to_string(c.features.tsf))}, {"entropy_window", c.features.entropy_window}}},
      {"labeling",
       {{"k", c.labeling.kmeans.k},
        {"seed", c.labeling.kmeans.seed},
        {"max_iter", c.labeling.kmeans.max_iter},
        {"tol", c.labeling.kmeans.tol},
        {"restarts", c.labeling.kmeans.restarts},
        {"mode", c.labeling.two_d ? "2d" : "1d"}}},
      {"imaging",
       {{"m", c.imaging.image.size},
        {"step", c.imaging.image.step},
        {"seed", c.imaging.image.balance_seed},
        {"balance", c.imaging.balance},
        {"out_dir", c.imaging.out_dir}}},
      {"model", {{"preset", c.model.preset}, {"fc", fc}, {"width_divisor", c.model.width_divisor}}},
      {"training",
       {{"optimizer", c.run.training.optimizer.kind == cnn::OptimizerConfig::Kind::kAdam ? "adam" : "sgd"},
        {"learning_rate", c.run.training.optimizer.learning_rate},
        {"momentum", c.run.training.optimizer.momentum},
        {"epochs", c.run.training.epochs},
        {"batch", c.run.training.batch_size},
        {"train_fraction", c.run.train_fraction},
        {"split_by_snapshot", c.run.split_by_snapshot}}},
      {"experiment",
       {{"runs", c.experiment.runs},
        {"base_seed", c.experiment.base_seed},
        {"sweep_i", c.experiment.sweep_i},
        {"sweep_j", c.experiment.sweep_j}}},
  };
  return root.dump(2) + "\n";
}

}  // namespace wearnet

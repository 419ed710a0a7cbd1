// wearnet: bearing wear-level classification from vibration snapshots.
//
//   wearnet [--config FILE] <ingest|features|label|imagify|train|eval|sweep|report> [options]

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wearnet/cnn/checkpoint.hpp"
#include "wearnet/cnn/trainer.hpp"
#include "wearnet/dataset.hpp"
#include "wearnet/error.hpp"
#include "wearnet/features.hpp"
#include "wearnet/harness/config.hpp"
#include "wearnet/harness/experiment.hpp"
#include "wearnet/harness/metrics.hpp"
#include "wearnet/harness/report.hpp"
#include "wearnet/imaging.hpp"
#include "wearnet/ingest.hpp"
#include "wearnet/labeling.hpp"
#include "wearnet/pgm.hpp"

namespace fs = std::filesystem;
using namespace wearnet;

namespace {

struct Overrides {
  std::optional<std::string> dir;
  std::optional<std::size_t> channel;
  bool synthetic = false;
  std::optional<std::uint64_t> synthetic_seed;
  std::optional<std::string> tsf;
  std::optional<std::size_t> entropy_window;
  std::optional<std::size_t> k;
  std::optional<std::size_t> m;
  std::optional<std::size_t> step;
  std::optional<std::string> images;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch;
  std::optional<double> learning_rate;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed;
  bool no_balance = false;
  bool split_by_snapshot = false;
};

void apply(const Overrides& o, Config& c) {
  if (o.dir) c.data.dir = *o.dir;
  if (o.channel) c.data.channel = *o.channel;
  if (o.synthetic) c.data.synthetic = true;
  if (o.synthetic_seed) c.data.synthetic_seed = *o.synthetic_seed;
  if (o.tsf) c.features.tsf = parse_tsf_kind(*o.tsf);
  if (o.entropy_window) c.features.entropy_window = *o.entropy_window;
  if (o.k) c.labeling.kmeans.k = *o.k;
  if (o.m) c.imaging.image.size = *o.m;
  if (o.step) c.imaging.image.step = *o.step;
  if (o.images) c.imaging.out_dir = *o.images;
  if (o.no_balance) c.imaging.balance = false;
  if (o.epochs) c.run.training.epochs = *o.epochs;
  if (o.batch) c.run.training.batch_size = *o.batch;
  if (o.learning_rate) c.run.training.optimizer.learning_rate = *o.learning_rate;
  if (o.split_by_snapshot) c.run.split_by_snapshot = true;
  if (o.runs) c.experiment.runs = *o.runs;
  if (o.seed) c.experiment.base_seed = *o.seed;
  c.model.input_size = c.imaging.image.size;
  c.model.classes = c.labeling.kmeans.k;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
    file_.open(path, std::ios::binary);
    if (!file_) raise(ErrorKind::kIo, "cannot write " + path);
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SignalSeries load_series(const Config& c) {
  if (c.data.synthetic) return synth_run(c.data.profile, c.data.synthetic_seed);
  if (c.data.dir.empty()) raise(ErrorKind::kConfig, "no data directory (set data.dir or --dir, or --synthetic)");
  return load_run(c.data.dir, c.data.channel);
}

WearLabeling label_series(const Config& c, const SignalSeries& series, FeatureSeries& fs_out) {
  fs_out = make_feature_series(series, c.features.tsf, c.features.entropy_window);
  if (c.labeling.two_d) {
    return label_run_2d(fs_out.entropy, fs_out.values, c.features.entropy_window, c.labeling.kmeans);
  }
  return label_run(fs_out.entropy, c.features.entropy_window, c.labeling.kmeans);
}

ImageDataset load_dataset(const Config& c) {
  const auto images = load_image_set(c.imaging.out_dir);
  if (images.empty()) raise(ErrorKind::kStructural, "image set " + c.imaging.out_dir + " is empty");
  if (images.front().size != c.imaging.image.size) {
    raise(ErrorKind::kConfig, "images are " + std::to_string(images.front().size) + "x" +
                                  std::to_string(images.front().size) + " but imaging.m is " +
                                  std::to_string(c.imaging.image.size));
  }
  return make_dataset(images, c.labeling.kmeans.k);
}

void print_metrics(const RunMetrics& m) {
  std::printf("accuracy  %.4f\nprecision %.4f\nrecall    %.4f\nf1        %.4f\nmse       %.5f\n",
              m.accuracy, m.precision, m.recall, m.f1, m.mse);
  if (m.undefined > 0) std::printf("(%zu undefined precision/recall terms counted as 0)\n", m.undefined);
  std::printf("confusion (rows = true level):\n");
  for (const auto& row : m.confusion) {
    for (std::size_t j = 0; j < row.size(); ++j) std::printf("%s%zu", j ? " " : "  ", row[j]);
    std::printf("\n");
  }
}

Split make_split(const Config& c, const ImageDataset& data, std::uint64_t seed) {
  return c.run.split_by_snapshot
             ? split_by_group(data.labels, data.groups, data.num_classes, c.run.train_fraction, seed)
             : split_dataset(data.labels, data.num_classes, c.run.train_fraction, seed);
}

int cmd_ingest(const Config& c, const std::string& write_synthetic) {
  const SignalSeries series = load_series(c);
  if (!write_synthetic.empty()) {
    write_run(series, write_synthetic);
    std::fprintf(stderr, "wrote %zu snapshot files to %s\n", series.size(), write_synthetic.c_str());
  }
  std::printf("snapshots %zu\nsamples_per_snapshot %zu\nchannel %zu\n", series.size(),
              series.samples_per_snapshot(), series.channel_index());
  if (!series.empty()) {
    std::printf("first %s\nlast %s\n", format_timestamp(series[0].timestamp).c_str(),
                format_timestamp(series[series.size() - 1].timestamp).c_str());
  }
  return 0;
}

int cmd_features(const Config& c, const std::string& out_path) {
  const SignalSeries series = load_series(c);
  const FeatureSeries f = make_feature_series(series, c.features.tsf, c.features.entropy_window);
  Output out(out_path);
  auto& os = out.stream();
  os << "snapshot,timestamp," << to_string(c.features.tsf) << ",entropy\n";
  const std::size_t lead = f.window_len - 1;
  for (std::size_t i = 0; i < series.size(); ++i) {
    os << series[i].id << ',' << format_timestamp(series[i].timestamp) << ',' << fmt(f.values[i]) << ',';
    if (i >= lead && i - lead < f.entropy.size()) os << fmt(f.entropy[i - lead]);
    os << '\n';
  }
  return 0;
}

int cmd_label(const Config& c, const std::string& out_path) {
  const SignalSeries series = load_series(c);
  FeatureSeries f;
  const WearLabeling wl = label_series(c, series, f);
  Output out(out_path);
  auto& os = out.stream();
  os << "snapshot,timestamp,entropy,level,level_name\n";
  const std::size_t lead = f.window_len - 1;
  std::vector<std::size_t> counts(wl.k, 0);
  for (std::size_t i = 0; i < series.size(); ++i) {
    os << series[i].id << ',' << format_timestamp(series[i].timestamp) << ',';
    if (i >= lead) os << fmt(f.entropy[i - lead]);
    os << ',' << wl.assignment[i] << ',' << wl.level_names[wl.assignment[i]] << '\n';
    ++counts[wl.assignment[i]];
  }
  for (std::size_t l = 0; l < wl.k; ++l) {
    std::fprintf(stderr, "level %zu (%s): %zu snapshots, centroid %.6g\n", l,
                 wl.level_names[l].c_str(), counts[l], wl.centroids[l]);
  }
  return 0;
}

int cmd_imagify(const Config& c) {
  const SignalSeries series = load_series(c);
  FeatureSeries f;
  const WearLabeling wl = label_series(c, series, f);
  const ImagingConfig& ic = c.imaging.image;
  ic.validate(series.samples_per_snapshot());

  // Balance on the per-image label vector first, then stream kept images to disk.
  const std::size_t per = image_count(series.samples_per_snapshot(), ic.size, ic.step);
  std::vector<std::size_t> labels;
  labels.reserve(per * series.size());
  for (std::size_t k = 0; k < series.size(); ++k) labels.insert(labels.end(), per, wl.assignment[k]);
  std::vector<bool> keep(labels.size(), !c.imaging.balance);
  if (c.imaging.balance) {
    for (std::size_t i : balance_indices(labels, wl.k, ic.balance_seed)) keep[i] = true;
  }

  const fs::path dir = c.imaging.out_dir;
  fs::create_directories(dir);
  std::vector<ManifestRow> rows;
  std::vector<std::size_t> before(wl.k, 0), after(wl.k, 0);
  std::size_t idx = 0;
  for_each_image(series, wl, ic, [&](SignalImage&& img) {
    ++before[img.label];
    if (keep[idx++]) {
      ++after[img.label];
      const std::string name = image_file_name(img);
      write_pgm(dir / name, GrayImage{img.size, img.size, std::move(img.pixels)});
      rows.push_back({name, img.label, img.snapshot_id, img.sub_index});
    }
  });
  std::ofstream manifest(dir / "manifest.csv", std::ios::binary);
  manifest << write_manifest(rows);
  if (!manifest) raise(ErrorKind::kIo, "cannot write " + (dir / "manifest.csv").string());

  std::printf("level,name,images,kept\n");
  for (std::size_t l = 0; l < wl.k; ++l) {
    std::printf("%zu,%s,%zu,%zu\n", l, wl.level_names[l].c_str(), before[l], after[l]);
  }
  std::fprintf(stderr, "wrote %zu images to %s\n", rows.size(), dir.string().c_str());
  return 0;
}

int cmd_train(const Config& c, const std::string& checkpoint) {
  const ImageDataset data = load_dataset(c);
  const auto spec = cnn::make_preset(c.model);
  const std::uint64_t seed = c.experiment.base_seed;
  const Split split = make_split(c, data, seed);
  std::fprintf(stderr, "%s: %zu parameters, %zu train / %zu test images\n", spec.name.c_str(),
               cnn::parameter_count(spec), split.train.size(), split.test.size());
  const auto result = cnn::train(spec, data, split.train, c.run.training, seed,
                                 [](std::size_t epoch, double loss) {
                                   std::fprintf(stderr, "epoch %zu loss %.6f\n", epoch + 1, loss);
                                 });
  cnn::save_checkpoint(checkpoint, spec, result.params);
  std::fprintf(stderr, "saved %s\n", checkpoint.c_str());
  const auto pred = cnn::predict(spec, result.params, data, split.test);
  print_metrics(compute_metrics(pred, data.batch_labels(split.test), data.num_classes));
  return 0;
}

int cmd_eval(const Config& c, const std::string& checkpoint, bool all) {
  const ImageDataset data = load_dataset(c);
  const auto ck = cnn::load_checkpoint(checkpoint);
  if (ck.spec.classes() != data.num_classes || ck.spec.input_size != data.image_size) {
    raise(ErrorKind::kShape, "checkpoint " + ck.spec.name + " does not match the image set");
  }
  std::vector<std::size_t> idx;
  if (all) {
    idx.resize(data.size());
    std::iota(idx.begin(), idx.end(), 0);
  } else {
    idx = make_split(c, data, c.experiment.base_seed).test;
  }
  const auto pred = cnn::predict(ck.spec, ck.params, data, idx);
  std::printf("model %s, %zu images\n", ck.spec.name.c_str(), idx.size());
  print_metrics(compute_metrics(pred, data.batch_labels(idx), data.num_classes));
  return 0;
}

int cmd_sweep(const Config& c, const std::string& out_path, const std::string& csv_path) {
  const ImageDataset data = load_dataset(c);
  const auto bundles = fc_sweep(
      c.model, c.experiment.sweep_i, c.experiment.sweep_j, data, c.run, c.experiment.runs,
      c.experiment.base_seed, [](const ReportBundle& b) {
        std::fprintf(stderr, "%s: mean accuracy %.4f over %zu runs\n", b.model.c_str(),
                     b[Metric::kAccuracy].mean, b.runs.size());
      });
  if (!out_path.empty()) {
    Output out(out_path);
    out.stream() << bundles_to_json(bundles);
  }
  if (!csv_path.empty()) {
    Output out(csv_path);
    out.stream() << render_table_csv(bundles);
  }
  std::cout << render_table_text(bundles);
  return 0;
}

int cmd_report(const std::string& in_path, const std::string& format, const std::string& out_path) {
  std::ifstream in(in_path, std::ios::binary);
  if (!in) raise(ErrorKind::kIo, "cannot open " + in_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto bundles = bundles_from_json(buf.str());
  Output out(out_path);
  out.stream() << (format == "csv" ? render_table_csv(bundles) : render_table_text(bundles));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wear-level classification of bearing vibration signals"};
  app.require_subcommand(0, 1);
  std::string config_path;
  bool dump = false;
  Overrides ov;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_flag("--dump-config", dump, "Print the effective configuration and exit");

  auto data_opts = [&](CLI::App* sub) {
    sub->add_option("--dir", ov.dir, "IMS run directory");
    sub->add_option("--channel", ov.channel, "Accelerometer channel (0-based)");
    sub->add_flag("--synthetic", ov.synthetic, "Use the synthetic degradation generator");
    sub->add_option("--synthetic-seed", ov.synthetic_seed, "Seed for the synthetic generator");
    sub->add_option("--tsf", ov.tsf, "Statistical feature (rms, kurtosis, ...)");
    sub->add_option("--entropy-window", ov.entropy_window, "Entropy window length");
    sub->add_option("--k", ov.k, "Number of wear levels");
  };
  auto model_opts = [&](CLI::App* sub) {
    sub->add_option("--images", ov.images, "Image set directory");
    sub->add_option("--m", ov.m, "Image side length");
    sub->add_option("--k", ov.k, "Number of wear levels");
    sub->add_option("--epochs", ov.epochs, "Training epochs");
    sub->add_option("--batch", ov.batch, "Mini-batch size");
    sub->add_option("--lr", ov.learning_rate, "Learning rate");
    sub->add_option("--seed", ov.seed, "Base seed for split, init and shuffling");
    sub->add_flag("--split-by-snapshot", ov.split_by_snapshot,
                  "Keep all images of a snapshot on one side of the split");
  };

  std::string write_synthetic, out_path, checkpoint = "model.wnck", csv_path, report_in,
                                          format = "text";
  bool eval_all = false;

  auto* ingest = app.add_subcommand("ingest", "Load a run and print a summary");
  data_opts(ingest);
  ingest->add_option("--write-synthetic", write_synthetic, "Write the loaded run as IMS files here");

  auto* features = app.add_subcommand("features", "Per-snapshot feature and entropy series (CSV)");
  data_opts(features);
  features->add_option("--out", out_path, "Output CSV (default stdout)");

  auto* label = app.add_subcommand("label", "Cluster entropy into wear levels (CSV)");
  data_opts(label);
  label->add_option("--out", out_path, "Output CSV (default stdout)");

  auto* imagify = app.add_subcommand("imagify", "Convert snapshots to labeled PGM images");
  data_opts(imagify);
  imagify->add_option("--m", ov.m, "Image side length");
  imagify->add_option("--step", ov.step, "Window stride in samples");
  imagify->add_option("--out-dir", ov.images, "Output directory");
  imagify->add_flag("--no-balance", ov.no_balance, "Keep every image");

  auto* train = app.add_subcommand("train", "Train one model and evaluate on the held-out split");
  model_opts(train);
  train->add_option("--out", checkpoint, "Checkpoint path");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  model_opts(eval);
  eval->add_option("--checkpoint", checkpoint, "Checkpoint path");
  eval->add_flag("--all", eval_all, "Evaluate every image instead of the test split");

  auto* sweep = app.add_subcommand("sweep", "Repeated runs over FC widths");
  model_opts(sweep);
  sweep->add_option("--runs", ov.runs, "Runs per model");
  sweep->add_option("--out", out_path, "Write results as JSON");
  sweep->add_option("--csv", csv_path, "Write the table as CSV");

  auto* report = app.add_subcommand("report", "Render a results table from sweep JSON");
  report->add_option("--in", report_in, "Sweep results JSON")->required();
  report->add_option("--format", format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
  report->add_option("--out", out_path, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    Config cfg = config_path.empty() ? Config{} : load_config(config_path);
    apply(ov, cfg);
    if (dump) {
      std::cout << dump_config(cfg);
      return 0;
    }
    if (ingest->parsed()) return cmd_ingest(cfg, write_synthetic);
    if (features->parsed()) return cmd_features(cfg, out_path);
    if (label->parsed()) return cmd_label(cfg, out_path);
    if (imagify->parsed()) return cmd_imagify(cfg);
    if (train->parsed()) return cmd_train(cfg, checkpoint);
    if (eval->parsed()) return cmd_eval(cfg, checkpoint, eval_all);
    if (sweep->parsed()) return cmd_sweep(cfg, out_path, csv_path);
    if (report->parsed()) return cmd_report(report_in, format, out_path);
    std::cerr << app.help();
  } catch (const Error& e) {
    std::fprintf(stderr, "wearnet: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wearnet: %s\n", e.what());
    return 2;
  }
  return 1;
}

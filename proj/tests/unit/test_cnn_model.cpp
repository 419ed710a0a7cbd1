#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "wearnet/cnn/checkpoint.hpp"
#include "wearnet/cnn/network.hpp"
#include "wearnet/cnn/trainer.hpp"
#include "wearnet/error.hpp"

using namespace wearnet;
using namespace wearnet::cnn;

namespace {

std::vector<LayerSpec> without_relu(const ModelSpec& s) {
  std::vector<LayerSpec> out;
  for (const auto& l : s.layers)
    if (l.kind != LayerKind::kRelu) out.push_back(l);
  return out;
}

ImageDataset random_images(std::size_t n, std::size_t m, std::size_t classes, std::uint64_t seed) {
  Rng rng(seed);
  ImageDataset d;
  d.image_size = m;
  d.num_classes = classes;
  d.pixels.resize(n * m * m);
  for (auto& p : d.pixels) p = static_cast<std::uint8_t>(rng.below(256));
  for (std::size_t i = 0; i < n; ++i) {
    d.labels.push_back(i % classes);
    d.groups.push_back("g" + std::to_string(i));
  }
  return d;
}

ModelSpec tiny_spec() {
  ModelSpec s;
  s.name = "tiny";
  s.input_size = 8;
  s.layers = {LayerSpec::conv(3, 3, 3, 1), LayerSpec::relu(), LayerSpec::maxpool(2, 2),
              LayerSpec::conv(3, 3, 4),    LayerSpec::relu(), LayerSpec::avgpool(2, 2),
              LayerSpec::fc(6),            LayerSpec::relu(), LayerSpec::softmax_output(3)};
  return s;
}

}  // namespace

TEST_CASE("alexnet-mod preset layer list and shape trace") {
  PresetOptions o;
  o.fc1 = 2560;
  o.fc2 = 256;
  const auto spec = make_preset(o);
  CHECK(spec.name == "CNN-2560-256");
  const std::vector<LayerSpec> expect{
      LayerSpec::conv(5, 5, 96), LayerSpec::maxpool(2, 2), LayerSpec::conv(3, 3, 256),
      LayerSpec::maxpool(2, 2),  LayerSpec::conv(3, 3, 384), LayerSpec::maxpool(2, 2),
      LayerSpec::conv(3, 3, 384), LayerSpec::conv(3, 3, 256), LayerSpec::maxpool(2, 2),
      LayerSpec::fc(2560),       LayerSpec::fc(256),          LayerSpec::softmax_output(7)};
  CHECK(without_relu(spec) == expect);
  std::vector<std::size_t> spatial;
  for (const auto& a : spec.shape_trace()) spatial.push_back(a.h);
  std::vector<std::size_t> dedup;
  for (auto v : spatial)
    if (dedup.empty() || dedup.back() != v) dedup.push_back(v);
  CHECK(dedup == std::vector<std::size_t>{64, 60, 30, 28, 14, 12, 6, 4, 2, 1});
  CHECK(spec.shape_trace().back() == ActivationShape{7, 1, 1});

  Network net(spec);
  const auto params = init_params(spec, 1);
  const auto logits = net.forward(Tensor4({1, 1, 64, 64}, 0.5), params);
  CHECK(logits.shape() == Shape4{1, 7, 1, 1});
}

TEST_CASE("other presets and names") {
  PresetOptions l;
  l.preset = "lenet5";
  l.input_size = 32;
  l.classes = 10;
  const auto lenet = make_preset(l);
  CHECK(lenet.name == "LeNet5");
  CHECK(without_relu(lenet) ==
        std::vector<LayerSpec>{LayerSpec::conv(5, 5, 6), LayerSpec::avgpool(2, 2), LayerSpec::conv(5, 5, 16),
                               LayerSpec::avgpool(2, 2), LayerSpec::fc(120), LayerSpec::fc(84),
                               LayerSpec::softmax_output(10)});

  PresetOptions w;
  w.preset = "lenet5-wen";
  w.fc1 = 2560;
  w.fc2 = 512;
  const auto wen = make_preset(w);
  CHECK(wen.name == "LeNet5-2560-512");
  CHECK(without_relu(wen) ==
        std::vector<LayerSpec>{LayerSpec::conv(5, 5, 32), LayerSpec::maxpool(2, 2), LayerSpec::conv(3, 3, 64),
                               LayerSpec::maxpool(2, 2), LayerSpec::conv(3, 3, 128), LayerSpec::maxpool(2, 2),
                               LayerSpec::conv(3, 3, 256), LayerSpec::maxpool(2, 2), LayerSpec::fc(2560),
                               LayerSpec::fc(512), LayerSpec::softmax_output(7)});

  CHECK(model_name("alexnet-mod", 512, 0) == "CNN-512");
  CHECK(model_name("alexnet-mod", 2560, 1024) == "CNN-2560-1024");

  PresetOptions small;
  small.input_size = 32;
  small.width_divisor = 4;
  const auto reduced = make_preset(small);
  CHECK(reduced.layers.front() == LayerSpec::conv(5, 5, 24, 2));
  CHECK(reduced.shape_trace().back() == ActivationShape{7, 1, 1});

  PresetOptions unknown;
  unknown.preset = "resnet";
  CHECK_THROWS_AS(make_preset(unknown), Error);
}

TEST_CASE("model spec text round trip") {
  PresetOptions o;
  o.fc2 = 128;
  const auto spec = make_preset(o);
  CHECK(parse_model_spec(serialize_model_spec(spec)) == spec);
  CHECK_THROWS_AS(parse_model_spec("name x\ninput 1 8\nbogus 1 1 1 0\n"), Error);
}

TEST_CASE("He-uniform initialization") {
  PresetOptions o;
  o.input_size = 32;
  o.width_divisor = 4;
  o.fc1 = 512;
  o.fc2 = 64;
  const auto spec = make_preset(o);
  const auto a = init_params(spec, 77);
  const auto b = init_params(spec, 77);
  CHECK(a == b);
  CHECK(init_params(spec, 78) != a);
  for (const auto& slot : parameter_layout(spec)) {
    if (slot.weight_count == 0) continue;
    double s = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < slot.weight_count; ++i) {
      const double v = a[slot.weight_offset + i];
      s += v;
      ss += v * v;
    }
    const double n = static_cast<double>(slot.weight_count);
    const double var = ss / n - (s / n) * (s / n);
    const double target = 2.0 / static_cast<double>(slot.fan_in);
    CAPTURE(slot.layer);
    CHECK(std::abs(var - target) <= 0.2 * target);
    const double bound = std::sqrt(6.0 / static_cast<double>(slot.fan_in));
    for (std::size_t i = 0; i < slot.weight_count; ++i) CHECK(std::abs(a[slot.weight_offset + i]) <= bound);
    for (std::size_t i = 0; i < slot.bias_count; ++i) CHECK(a[slot.bias_offset + i] == 0.0);
  }
}

TEST_CASE("full network backward matches finite differences") {
  const auto spec = tiny_spec();
  Network net(spec);
  Rng rng(5);
  auto params = init_params(spec, 3);
  for (auto& p : params) p += rng.uniform(-0.05, 0.05);
  const auto x = oracle::random_tensor(rng, {3, 1, 8, 8});
  const std::vector<std::size_t> labels{0, 2, 1};
  auto loss = [&] {
    const auto logits = net.forward(x, params);
    return softmax_cross_entropy(logits.data(), 3, labels).loss;
  };
  const auto logits = net.forward(x, params);
  const auto ce = softmax_cross_entropy(logits.data(), 3, labels);
  std::vector<double> grads(params.size());
  net.backward(Tensor4(logits.shape(), ce.grad_logits), params, grads);
  const auto numeric = oracle::numeric_gradient(loss, params);
  CHECK(oracle::relative_error(grads, numeric) < 1e-5);
}

TEST_CASE("training basics") {
  const auto spec = tiny_spec();
  const auto data = random_images(8, 8, 3, 11);
  std::vector<std::size_t> idx(8);
  std::iota(idx.begin(), idx.end(), 0);

  TrainConfig frozen;
  frozen.optimizer.learning_rate = 0.0;
  frozen.epochs = 3;
  frozen.batch_size = 4;
  const auto still = train(spec, data, idx, frozen, 9);
  CHECK(still.params == init_params(spec, mix_seed(9, 1)));

  TrainConfig cfg;
  cfg.optimizer.learning_rate = 1e-2;
  cfg.epochs = 200;
  cfg.batch_size = 8;
  const auto a = train(spec, data, idx, cfg, 4);
  const auto b = train(spec, data, idx, cfg, 4);
  for (std::size_t i = 0; i < a.loss_trace.size(); ++i) {
    CAPTURE(i);
    REQUIRE(a.loss_trace[i] == b.loss_trace[i]);
  }
  CHECK(a.params == b.params);
  CHECK(a.loss_trace.size() == 200);
  CHECK(a.loss_trace.back() < 0.01);

  TrainConfig sgd = cfg;
  sgd.optimizer.kind = OptimizerConfig::Kind::kSgd;
  sgd.optimizer.learning_rate = 0.05;
  const auto s = train(spec, data, idx, sgd, 4);
  CHECK(s.loss_trace.back() < s.loss_trace.front());

  const auto pred = predict(spec, a.params, data, idx, 3);
  CHECK(pred == data.labels);
}

TEST_CASE("divergence is reported with the step index") {
  const auto spec = tiny_spec();
  Network net(spec);
  auto params = init_params(spec, 1);
  params[0] = std::nan("");
  Optimizer opt(OptimizerConfig{}, params.size());
  const auto data = random_images(2, 8, 3, 1);
  const std::vector<std::size_t> idx{0, 1};
  try {
    train_step(net, params, data.batch(idx), data.batch_labels(idx), opt, 17);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDivergence);
    CHECK(std::string(e.what()).find("17") != std::string::npos);
  }
}

TEST_CASE("checkpoint round trip is byte exact") {
  PresetOptions o;
  o.input_size = 32;
  o.width_divisor = 8;
  o.fc1 = 64;
  o.fc2 = 16;
  const auto spec = make_preset(o);
  auto params = init_params(spec, 2);
  params[3] = -0.0;
  params[4] = 1e-310;
  const auto bytes = encode_checkpoint(spec, params);
  CHECK(bytes.substr(0, 4) == "WNCK");
  const auto ck = decode_checkpoint(bytes);
  CHECK(ck.spec == spec);
  CHECK(encode_checkpoint(ck.spec, ck.params) == bytes);
  CHECK(std::signbit(ck.params[3]));

  const auto path = std::filesystem::temp_directory_path() / "wearnet_ck_test.bin";
  save_checkpoint(path, spec, params);
  CHECK(encode_checkpoint(load_checkpoint(path).spec, load_checkpoint(path).params) == bytes);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() - 3)), Error);
  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_checkpoint(bad), Error);
}

#include <benchmark/benchmark.h>

#include <vector>

#include "wearnet/cnn/layers.hpp"
#include "wearnet/cnn/model_spec.hpp"
#include "wearnet/cnn/network.hpp"
#include "wearnet/features.hpp"
#include "wearnet/imaging.hpp"
#include "wearnet/ingest.hpp"
#include "wearnet/labeling.hpp"
#include "wearnet/rng.hpp"

namespace {

using namespace wearnet;
using namespace wearnet::cnn;

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

void BM_Tsf(benchmark::State& state) {
  const auto x = noise(20480, 1);
  const auto kind = kAllTsfKinds[static_cast<std::size_t>(state.range(0))];
  for (auto _ : state) benchmark::DoNotOptimize(compute_tsf(x, kind));
  state.SetLabel(std::string(to_string(kind)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_Tsf)->DenseRange(0, 7);

void BM_Entropy(benchmark::State& state) {
  auto x = noise(984, 2);
  for (auto& v : x) v = v * v + 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(shannon_entropy(x, 16));
}
BENCHMARK(BM_Entropy);

void BM_KMeans1d(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 3);
  KMeansOptions o;
  for (auto _ : state) benchmark::DoNotOptimize(kmeans_1d(x, o).wcss);
}
BENCHMARK(BM_KMeans1d)->Arg(984)->Arg(10000);

void BM_SignalToImage(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto x = noise(m * m, 4);
  for (auto _ : state) benchmark::DoNotOptimize(signal_to_image(x, m));
}
BENCHMARK(BM_SignalToImage)->Arg(32)->Arg(64);

void BM_ImagifySnapshot(benchmark::State& state) {
  DegradationProfile p;
  p.snapshots = 1;
  p.samples_per_snapshot = 20480;
  const auto series = synth_run(p, 5);
  WearLabeling wl;
  wl.k = 1;
  wl.assignment = {0};
  ImagingConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(imagify_run(series, wl, cfg).size());
}
BENCHMARK(BM_ImagifySnapshot);

ConvGeometry first_layer() {
  ConvGeometry g;
  g.in_channels = 1;
  g.out_channels = 96;
  g.kernel_h = g.kernel_w = 5;
  return g;
}

void BM_ConvForward(benchmark::State& state) {
  const auto g = first_layer();
  const auto batch = static_cast<std::size_t>(state.range(0));
  const Tensor4 x({batch, 1, 64, 64}, noise(batch * 64 * 64, 6));
  const auto w = noise(g.weight_count(), 7);
  const std::vector<double> b(g.out_channels, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d_forward(x, w, b, g).size());
}
BENCHMARK(BM_ConvForward)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ConvBackward(benchmark::State& state) {
  const auto g = first_layer();
  const auto batch = static_cast<std::size_t>(state.range(0));
  const Tensor4 x({batch, 1, 64, 64}, noise(batch * 64 * 64, 8));
  const auto w = noise(g.weight_count(), 9);
  const Tensor4 dy({batch, 96, 60, 60}, noise(batch * 96 * 60 * 60, 10));
  for (auto _ : state) benchmark::DoNotOptimize(conv2d_backward(dy, x, w, g).weights.size());
}
BENCHMARK(BM_ConvBackward)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_MaxPool(benchmark::State& state) {
  const Tensor4 x({8, 96, 60, 60}, noise(8 * 96 * 60 * 60, 11));
  for (auto _ : state) benchmark::DoNotOptimize(maxpool_forward(x, 2, 2).output.size());
}
BENCHMARK(BM_MaxPool)->Unit(benchmark::kMillisecond);

void BM_NetworkStep(benchmark::State& state) {
  PresetOptions po;
  po.input_size = static_cast<std::size_t>(state.range(0));
  po.width_divisor = static_cast<std::size_t>(state.range(1));
  po.fc2 = 256;
  const ModelSpec spec = make_preset(po);
  Network net(spec);
  const auto params = init_params(spec, 1);
  std::vector<double> grads(params.size());
  const std::size_t batch = 8, m = po.input_size;
  const Tensor4 x({batch, 1, m, m}, noise(batch * m * m, 12));
  for (auto _ : state) {
    const Tensor4 logits = net.forward(x, params);
    net.backward(Tensor4(logits.shape(), 1.0 / static_cast<double>(batch)), params, grads);
    benchmark::DoNotOptimize(grads.data());
  }
  state.SetLabel(spec.name + " M=" + std::to_string(m) + " /" + std::to_string(po.width_divisor));
}
BENCHMARK(BM_NetworkStep)->Args({32, 4})->Args({64, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

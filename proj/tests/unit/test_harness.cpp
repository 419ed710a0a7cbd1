#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "wearnet/error.hpp"
#include "wearnet/harness/config.hpp"
#include "wearnet/harness/experiment.hpp"
#include "wearnet/harness/metrics.hpp"
#include "wearnet/harness/report.hpp"
#include "wearnet/rng.hpp"

using namespace wearnet;

namespace {

std::vector<std::size_t> balanced_labels(std::size_t per_class, std::size_t k) {
  std::vector<std::size_t> l;
  for (std::size_t i = 0; i < per_class * k; ++i) l.push_back(i % k);
  return l;
}

// Images whose class is visible as a bright horizontal band.
ImageDataset band_dataset(std::size_t per_class, std::size_t k, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  ImageDataset d;
  d.image_size = m;
  d.num_classes = k;
  d.labels = balanced_labels(per_class, k);
  for (std::size_t i = 0; i < d.labels.size(); ++i) {
    const std::size_t row = d.labels[i] * m / k;
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c)
        d.pixels.push_back(static_cast<std::uint8_t>(r == row ? 255 : rng.below(60)));
    d.groups.push_back("s" + std::to_string(d.labels[i]) + "_" + std::to_string(i / k / 2));
  }
  return d;
}

}  // namespace

TEST_CASE("stratified split") {
  const auto labels = balanced_labels(100, 3);
  const auto s = split_dataset(labels, 3, 0.7, 4);
  std::map<std::size_t, std::size_t> tr, te;
  for (auto i : s.train) ++tr[labels[i]];
  for (auto i : s.test) ++te[labels[i]];
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(tr[c] == 70);
    CHECK(te[c] == 30);
  }
  std::vector<std::size_t> all(s.train);
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expect(labels.size());
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(all == expect);
  CHECK(std::is_sorted(s.train.begin(), s.train.end()));

  const auto again = split_dataset(labels, 3, 0.7, 4);
  CHECK(again.train == s.train);
  CHECK(split_dataset(labels, 3, 0.7, 5).train != s.train);

  const auto tiny = split_dataset(labels, 3, 0.001, 1);
  CHECK(tiny.train.size() == 3);
  const auto huge = split_dataset(labels, 3, 0.999, 1);
  CHECK(huge.test.size() == 3);

  try {
    split_dataset(std::vector<std::size_t>{0, 0, 1}, 2, 0.7, 0);
    FAIL("expected split error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSplit);
  }
  CHECK_THROWS_AS(split_dataset(labels, 3, 1.0, 0), Error);
  CHECK_THROWS_AS(split_dataset(labels, 3, 0.0, 0), Error);
}

TEST_CASE("split by snapshot keeps groups together") {
  const auto data = band_dataset(20, 2, 8, 1);
  const auto s = split_by_group(data.labels, data.groups, 2, 0.7, 3);
  std::set<std::string> tr, te;
  for (auto i : s.train) tr.insert(data.groups[i]);
  for (auto i : s.test) te.insert(data.groups[i]);
  for (const auto& g : tr) CHECK(te.count(g) == 0);
  CHECK(s.train.size() + s.test.size() == data.size());
}

TEST_CASE("metrics examples") {
  const std::vector<std::size_t> labels{0, 0, 1, 1}, preds{0, 1, 1, 1};
  const auto m = compute_metrics(preds, labels, 2);
  CHECK(m.accuracy == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(m.precision == doctest::Approx(0.5 * (1.0 + 2.0 / 3.0)).epsilon(1e-15));
  CHECK(m.recall == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(m.f1 == doctest::Approx(0.5 * (2.0 / 3.0 + 0.8)).epsilon(1e-15));
  CHECK(m.mse == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m.confusion == std::vector<std::vector<std::size_t>>{{1, 1}, {0, 2}});

  const auto perfect = compute_metrics(labels, labels, 2);
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);
  CHECK(perfect.mse == 0.0);

  const auto seven = balanced_labels(10, 7);
  const auto chance = compute_metrics(std::vector<std::size_t>(seven.size(), 3), seven, 7);
  CHECK(chance.accuracy == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
  CHECK(chance.undefined == 6);

  CHECK_THROWS_AS(compute_metrics(std::vector<std::size_t>{0}, labels, 2), Error);
  CHECK_THROWS_AS(compute_metrics(std::vector<std::size_t>{0, 0, 0, 2}, labels, 2), Error);
}

TEST_CASE("metrics invariants on random predictions") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.below(6), n = 1 + rng.below(200);
    std::vector<std::size_t> p(n), l(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng.below(k);
      l[i] = rng.below(k);
    }
    const auto m = compute_metrics(p, l, k);
    std::size_t trace = 0, total = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        total += m.confusion[i][j];
        if (i == j) trace += m.confusion[i][j];
      }
    CHECK(total == n);
    CHECK(m.accuracy == static_cast<double>(trace) / static_cast<double>(n));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<std::size_t> p2, l2;
    for (auto i : order) {
      p2.push_back(p[i]);
      l2.push_back(l[i]);
    }
    const auto m2 = compute_metrics(p2, l2, k);
    CHECK(m2.accuracy == m.accuracy);
    CHECK(m2.precision == m.precision);
    CHECK(m2.recall == m.recall);
    CHECK(m2.f1 == m.f1);
    CHECK(m2.mse == m.mse);
  }
}

TEST_CASE("summaries") {
  const std::vector<double> one{0.42};
  const auto s1 = summarize(one);
  CHECK(s1.max == 0.42);
  CHECK(s1.min == 0.42);
  CHECK(s1.mean == 0.42);
  CHECK(s1.std == 0.0);
  const std::vector<double> v{1, 2, 3, 4};
  const auto s = summarize(v);
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));

  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(1 + rng.below(10), rng.uniform());
    for (auto& e : x) e = 0.9 + 1e-3 * rng.uniform();
    const auto st = summarize(x);
    CHECK(st.min <= st.mean);
    CHECK(st.mean <= st.max);
    CHECK(st.std >= 0.0);
  }
}

TEST_CASE("repeated runs and sweeps") {
  const auto data = band_dataset(12, 3, 16, 7);
  cnn::PresetOptions po;
  po.preset = "lenet5-wen";
  po.input_size = 16;
  po.classes = 3;
  po.fc1 = 16;
  po.width_divisor = 8;
  const auto spec = cnn::make_preset(po);
  RunOptions opts;
  opts.training.epochs = 2;
  opts.training.batch_size = 8;

  const auto a = repeated_runs(spec, data, opts, 1, 10);
  CHECK(a.runs.size() == 1);
  for (auto m : kAllMetrics) {
    CHECK(a[m].std == 0.0);
    CHECK(a[m].min == a[m].max);
    CHECK(a[m].mean == a[m].max);
  }
  const auto b = repeated_runs(spec, data, opts, 2, 10);
  const auto c = repeated_runs(spec, data, opts, 2, 10);
  CHECK(bundles_to_json({b}) == bundles_to_json({c}));
  CHECK(b.runs[0].accuracy == a.runs[0].accuracy);
  CHECK(run_once(spec, data, opts, 11).confusion == b.runs[1].confusion);

  const std::vector<std::size_t> wi{8, 16}, wj{0, 4};
  std::vector<std::string> seen;
  const auto sweep = fc_sweep(po, wi, wj, data, opts, 1, 10,
                              [&](const ReportBundle& rb) { seen.push_back(rb.model); });
  std::vector<std::string> names;
  for (const auto& s : sweep) names.push_back(s.model);
  CHECK(names == std::vector<std::string>{"LeNet5-8", "LeNet5-8-4", "LeNet5-16", "LeNet5-16-4"});
  CHECK(seen == names);
  CHECK(bundles_to_json({sweep[2]}) == bundles_to_json({a}));
}

TEST_CASE("report rendering") {
  RunMetrics r1{0.9, 0.91, 0.9, 0.905, 0.1, {}, 0};
  RunMetrics r2{0.95, 0.96, 0.95, 0.955, 0.05, {}, 0};
  const std::vector<ReportBundle> bundles{make_bundle("CNN-512", {r1, r2}), make_bundle("CNN-1024", {r2})};
  const auto text = render_table_text(bundles);
  CHECK(text.find("CNN-512") != std::string::npos);
  CHECK(text.find("95.00%") != std::string::npos);
  for (auto m : kAllMetrics) CHECK(text.find(std::string(metric_name(m))) != std::string::npos);

  const auto csv = render_table_csv(bundles);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    const auto nl = csv.find('\n', pos);
    lines.push_back(csv.substr(pos, nl - pos));
    pos = nl + 1;
  }
  REQUIRE(lines.size() == 1 + 5 * 4);
  CHECK(lines[0] == "metric,stat,CNN-512,CNN-1024");
  CHECK(lines[1].rfind("Accuracy,Max,", 0) == 0);
  CHECK(lines[4].rfind("Accuracy,Std,", 0) == 0);
  CHECK(lines[20].rfind("MSE,Std,", 0) == 0);

  const auto back = bundles_from_json(bundles_to_json(bundles));
  REQUIRE(back.size() == 2);
  CHECK(back[0].model == "CNN-512");
  CHECK(back[0].runs.size() == 2);
  CHECK(render_table_csv(back) == csv);
}

TEST_CASE("config parsing") {
  const auto defaults = parse_config("{}");
  CHECK(defaults.labeling.kmeans.k == 7);
  CHECK(defaults.imaging.image.size == 64);
  CHECK(defaults.model.preset == "alexnet-mod");
  CHECK(defaults.experiment.runs == 10);

  const auto c = parse_config(R"({
    "labeling": {"k": 5, "mode": "2d"},
    "imaging": {"m": 32, "step": 16},
    "model": {"preset": "lenet5-wen", "fc": [1024, 128], "width_divisor": 2},
    "training": {"optimizer": "sgd", "epochs": 3},
    "features": {"tsf": "kurtosis", "entropy_window": 4}
  })");
  CHECK(c.labeling.kmeans.k == 5);
  CHECK(c.labeling.two_d);
  CHECK(c.model.input_size == 32);
  CHECK(c.model.classes == 5);
  CHECK(c.model.fc1 == 1024);
  CHECK(c.model.fc2 == 128);
  CHECK(c.run.training.optimizer.kind == cnn::OptimizerConfig::Kind::kSgd);
  CHECK(c.features.tsf == TsfKind::kKurtosis);

  const auto round = parse_config(dump_config(c));
  CHECK(dump_config(round) == dump_config(c));

  for (const char* bad : {R"({"bogus": {}})", R"({"imaging": {"size": 3}})", "{not json",
                          R"({"model": {"fc": []}})", R"({"labeling": {"mode": "3d"}})",
                          R"({"imaging": {"m": "big"}})"}) {
    CAPTURE(bad);
    try {
      parse_config(bad);
      FAIL("expected config error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kConfig);
    }
  }
}

#include "wearnet/harness/report.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>

#include "wearnet/error.hpp"

namespace wearnet {
namespace {

constexpr const char* kStatNames[] = {"Max", "Min", "Mean", "Std"};

double stat_value(const MetricStats& s, int i) {
  switch (i) {
    case 0: return s.max;
    case 1: return s.min;
    case 2: return s.mean;
    default: return s.std;
  }
}

std::string format_cell(Metric m, int stat, double v) {
  char buf[32];
  if (m == Metric::kMse) {
    std::snprintf(buf, sizeof buf, stat == 3 ? "%.4f" : "%.5f", v);
  } else if (stat == 3) {
    std::snprintf(buf, sizeof buf, "%.4f", v * 100.0);
  } else {
    std::snprintf(buf, sizeof buf, "%.2f%%", v * 100.0);
  }
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string render_table_text(const std::vector<ReportBundle>& bundles) {
  std::size_t width = 10;
  for (const auto& b : bundles) width = std::max(width, b.model.size() + 2);
  std::string out = pad("No.", 6);
  for (const auto& b : bundles) out += pad(b.model, width);
  out += "\n";
  for (Metric m : kAllMetrics) {
    out += std::string(metric_name(m)) + "\n";
    for (int s = 0; s < 4; ++s) {
      out += pad(kStatNames[s], 6);
      for (const auto& b : bundles) out += pad(format_cell(m, s, stat_value(b[m], s)), width);
      out += "\n";
    }
  }
  return out;
}

std::string render_table_csv(const std::vector<ReportBundle>& bundles) {
  std::string out = "metric,stat";
  for (const auto& b : bundles) out += "," + b.model;
  out += "\n";
  char buf[40];
  for (Metric m : kAllMetrics) {
    for (int s = 0; s < 4; ++s) {
      out += std::string(metric_name(m)) + "," + kStatNames[s];
      for (const auto& b : bundles) {
        std::snprintf(buf, sizeof buf, ",%.17g", stat_value(b[m], s));
        out += buf;
      }
      out += "\n";
    }
  }
  return out;
}

std::string bundles_to_json(const std::vector<ReportBundle>& bundles) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& b : bundles) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : b.runs) {
      runs.push_back({{"accuracy", r.accuracy},
                      {"precision", r.precision},
                      {"recall", r.recall},
                      {"f1", r.f1},
                      {"mse", r.mse},
                      {"confusion", r.confusion},
                      {"undefined", r.undefined}});
    }
    doc.push_back({{"model", b.model}, {"runs", runs}});
  }
  return doc.dump(2) + "\n";
}

std::vector<ReportBundle> bundles_from_json(std::string_view text) {
  std::vector<ReportBundle> out;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& b : doc) {
      std::vector<RunMetrics> runs;
      for (const auto& r : b.at("runs")) {
        RunMetrics m;
        m.accuracy = r.at("accuracy").get<double>();
        m.precision = r.at("precision").get<double>();
        m.recall = r.at("recall").get<double>();
        m.f1 = r.at("f1").get<double>();
        m.mse = r.at("mse").get<double>();
        m.confusion = r.at("confusion").get<std::vector<std::vector<std::size_t>>>();
        m.undefined = r.value("undefined", std::size_t{0});
        runs.push_back(std::move(m));
      }
      out.push_back(make_bundle(b.at("model").get<std::string>(), std::move(runs)));
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::kFormat, std::string("results file: ") + e.what());
  }
  return out;
}

}  // namespace wearnet

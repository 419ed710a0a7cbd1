#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "wearnet/harness/metrics.hpp"

namespace wearnet {

/// Results table with one column per model and, for each metric, Max/Min/Mean/Std
/// rows. Accuracy, precision, recall and F1 print as percentages (std in
/// percentage points); MSE prints raw.
std::string render_table_text(const std::vector<ReportBundle>& bundles);

/// Same layout as comma-separated rows: "metric,stat,<model>...", raw values.
std::string render_table_csv(const std::vector<ReportBundle>& bundles);

/// Serialized bundles (per-run metrics included) for later re-rendering.
std::string bundles_to_json(const std::vector<ReportBundle>& bundles);
std::vector<ReportBundle> bundles_from_json(std::string_view text);

}  // namespace wearnet

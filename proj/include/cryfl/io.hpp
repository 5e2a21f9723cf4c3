#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cryfl/dataset.hpp"
#include "cryfl/federation.hpp"
#include "cryfl/forest.hpp"
#include "cryfl/svm.hpp"

namespace cryfl {

// Nine significant digits, the fixed precision of every text artifact.
std::string format_real(double v);

// Rounds to what format_real prints.
double round_sig9(double v);

// Rows of MFCC-derived features. feature_ids[j] is the MFCC coefficient index
// of column j (header name f<id>).
struct FeatureTable {
  std::vector<std::size_t> feature_ids;
  Dataset rows;
};

std::string feature_csv(const FeatureTable& table);
FeatureTable parse_feature_csv(const std::string& text);

struct ModelBundle {
  SvmModel model;
  std::optional<FeatureSelector> selector;  // indices into the full MFCC vector
};

std::string model_json(const ModelBundle& bundle);
ModelBundle parse_model_json(const std::string& text);

std::string selector_json(const FeatureSelector& selector);
FeatureSelector parse_selector_json(const std::string& text);

std::string metrics_json(const MetricsReport& report);
std::string metrics_csv(const MetricsReport& report);  // header + one row

std::string loss_csv(const LossTrace& trace);
std::string history_csv(const std::vector<RoundRecord>& history);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace cryfl

#include "cryfl/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cryfl/error.hpp"

namespace cryfl {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& s, std::size_t row, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
    throw Error(Errc::ParseError, "row " + std::to_string(row) + ": bad " + what + " '" + s + "'");
  return v;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

ordered_json selector_to_json(const FeatureSelector& s) {
  ordered_json j;
  j["indices"] = s.selected_indices;
  std::vector<double> imp;
  imp.reserve(s.importances.size());
  for (double v : s.importances) imp.push_back(round_sig9(v));
  j["importances"] = imp;
  return j;
}

FeatureSelector selector_from_json(const ordered_json& j) {
  FeatureSelector s;
  s.selected_indices = j.at("indices").get<std::vector<std::size_t>>();
  s.importances = j.at("importances").get<std::vector<double>>();
  for (std::size_t i = 1; i < s.selected_indices.size(); ++i)
    if (s.selected_indices[i] <= s.selected_indices[i - 1])
      throw Error(Errc::ParseError, "selector indices must be strictly increasing");
  return s;
}

ordered_json parse_json(const std::string& text, const char* what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double round_sig9(double v) { return std::strtod(format_real(v).c_str(), nullptr); }

std::string feature_csv(const FeatureTable& table) {
  std::string out;
  for (auto id : table.feature_ids) out += "f" + std::to_string(id) + ",";
  out += "label\n";
  for (const auto& row : table.rows) {
    if (row.features.size() != table.feature_ids.size())
      throw Error(Errc::DimensionMismatch, "row width differs from the header");
    for (double v : row.features) out += format_real(v) + ",";
    out += std::to_string(row.label) + "\n";
  }
  return out;
}

FeatureTable parse_feature_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::ParseError, "row 1: missing header");
  const auto header = split_fields(strip_cr(line), ',');
  if (header.size() < 2 || header.back() != "label")
    throw Error(Errc::ParseError, "row 1: header must be f<i>,...,label");

  FeatureTable table;
  for (std::size_t j = 0; j + 1 < header.size(); ++j) {
    const auto& h = header[j];
    char* end = nullptr;
    const long id = h.size() > 1 && h[0] == 'f' ? std::strtol(h.c_str() + 1, &end, 10) : -1;
    if (id < 0 || end != h.c_str() + h.size())
      throw Error(Errc::ParseError, "row 1: bad column name '" + h + "'");
    table.feature_ids.push_back(static_cast<std::size_t>(id));
  }

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line, ',');
    if (fields.size() != header.size())
      throw Error(Errc::ParseError, "row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                                        " fields, got " + std::to_string(fields.size()));
    LabeledExample ex;
    ex.features.reserve(fields.size() - 1);
    for (std::size_t j = 0; j + 1 < fields.size(); ++j) ex.features.push_back(parse_real(fields[j], row, "value"));
    const auto& lab = fields.back();
    if (lab == "1" || lab == "+1")
      ex.label = kAsphyxia;
    else if (lab == "-1")
      ex.label = kNormal;
    else
      throw Error(Errc::ParseError, "row " + std::to_string(row) + ": label must be -1 or 1, got '" + lab + "'");
    ex.source_id = "row" + std::to_string(row);
    table.rows.push_back(std::move(ex));
  }
  return table;
}

std::string model_json(const ModelBundle& bundle) {
  ordered_json j;
  // Shortest round-trip form: the saved weights are bitwise the trained ones.
  j["weights"] = bundle.model.weights;
  j["lambda"] = bundle.model.lambda;
  if (bundle.selector) j["feature_selector"] = selector_to_json(*bundle.selector);
  j["label_map"] = {{"+1", "asphyxia"}, {"-1", "normal"}};
  return j.dump(2) + "\n";
}

ModelBundle parse_model_json(const std::string& text) {
  const auto j = parse_json(text, "model");
  try {
    ModelBundle b;
    b.model.weights = j.at("weights").get<std::vector<double>>();
    b.model.lambda = j.at("lambda").get<double>();
    if (b.model.weights.empty()) throw Error(Errc::ParseError, "model has no weights");
    if (j.contains("feature_selector")) b.selector = selector_from_json(j.at("feature_selector"));
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("model: ") + e.what());
  }
}

std::string selector_json(const FeatureSelector& selector) { return selector_to_json(selector).dump(2) + "\n"; }

FeatureSelector parse_selector_json(const std::string& text) {
  const auto j = parse_json(text, "selector");
  try {
    return selector_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("selector: ") + e.what());
  }
}

std::string metrics_json(const MetricsReport& r) {
  ordered_json j;
  j["sensitivity"] = round_sig9(r.sensitivity);
  j["specificity"] = round_sig9(r.specificity);
  j["uar"] = round_sig9(r.uar);
  j["accuracy"] = round_sig9(r.accuracy);
  return j.dump(2) + "\n";
}

std::string metrics_csv(const MetricsReport& r) {
  return "sensitivity,specificity,uar,accuracy\n" + format_real(r.sensitivity) + "," + format_real(r.specificity) +
         "," + format_real(r.uar) + "," + format_real(r.accuracy) + "\n";
}

std::string loss_csv(const LossTrace& trace) {
  std::string out = "epoch,objective\n";
  for (std::size_t e = 0; e < trace.size(); ++e) out += std::to_string(e + 1) + "," + format_real(trace[e]) + "\n";
  return out;
}

std::string history_csv(const std::vector<RoundRecord>& history) {
  std::string out = "round,selected_ids,train_loss,avg_train_accuracy\n";
  for (const auto& rec : history) {
    std::string ids;
    for (std::size_t i = 0; i < rec.selected_ids.size(); ++i) ids += (i ? ";" : "") + std::to_string(rec.selected_ids[i]);
    out += std::to_string(rec.round) + "," + ids + "," + format_real(rec.train_loss) + "," +
           format_real(rec.avg_train_accuracy) + "\n";
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::IoError, "short write to " + path.string());
}

}  // namespace cryfl

#include "cryfl/commands.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "cryfl/error.hpp"
#include "cryfl/rng.hpp"
#include "cryfl/wav.hpp"

namespace cryfl::cli {

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(Errc::IoError, "cannot create directory " + dir.string());
}

// Corpus files longer than one second contribute their first second.
FeatureVector clip_features(const AudioClip& clip, const MfccConfig& cfg) {
  const auto one_second = static_cast<std::size_t>(clip.sample_rate_hz);
  if (clip.samples.size() <= one_second) return mfcc(clip, cfg);
  AudioClip head{{clip.samples.begin(), clip.samples.begin() + static_cast<std::ptrdiff_t>(one_second)},
                 clip.sample_rate_hz};
  return mfcc(head, cfg);
}

struct PreparedData {
  Dataset train;
  Dataset test;
  std::optional<FeatureSelector> selector;  // in MFCC coefficient ids
  std::optional<FeatureSelector> local;     // in CSV column positions
};

PreparedData prepare(const fs::path& features, double test_fraction, const SelectionOptions& sel, std::uint64_t seed) {
  FeatureTable table = parse_feature_csv(read_text(features));
  if (table.rows.empty()) throw Error(Errc::EmptyDataset, features.string() + " holds no rows");

  PreparedData p;
  std::tie(p.train, p.test) = split(table.rows, test_fraction, true, substream(seed, "split"));
  if (sel.k <= 0) return p;

  std::vector<FeatureVector> xs;
  std::vector<int> ys;
  for (const auto& ex : p.train) {
    xs.push_back(ex.features);
    ys.push_back(ex.label);
  }
  ForestConfig fc = sel.forest;
  fc.seed = substream(seed, "forest");
  const RandomForest forest = train_random_forest(xs, ys, fc);
  p.local = select_features(forest, static_cast<std::size_t>(sel.k));

  FeatureSelector global;
  const std::size_t dim = *std::max_element(table.feature_ids.begin(), table.feature_ids.end()) + 1;
  global.importances.assign(dim, 0.0);
  for (std::size_t j = 0; j < table.feature_ids.size(); ++j) global.importances[table.feature_ids[j]] = p.local->importances[j];
  for (auto i : p.local->selected_indices) global.selected_indices.push_back(table.feature_ids[i]);
  std::sort(global.selected_indices.begin(), global.selected_indices.end());
  p.selector = std::move(global);

  for (auto* part : {&p.train, &p.test})
    for (auto& ex : *part) ex.features = apply_selector(ex.features, *p.local);
  return p;
}

void write_training_artifacts(const fs::path& out, const TrainSummary& s) {
  write_text(out / "model.json", model_json(s.bundle));
  write_text(out / "metrics.json", metrics_json(s.test_metrics));
  write_text(out / "metrics.csv", metrics_csv(s.test_metrics));
  if (s.bundle.selector) write_text(out / "selector.json", selector_json(*s.bundle.selector));
}

}  // namespace

std::uint64_t substream(std::uint64_t seed, const char* tag) { return derive_seed(seed, {stream_tag(tag)}); }

void cmd_synth(const SynthOptions& opt) {
  SynthConfig cfg = opt.synth;
  cfg.seed = substream(opt.seed, "synth");
  const auto corpus = generate_synthetic_corpus(cfg);
  ensure_dir(opt.out);
  std::string manifest = "file,label,f0_hz,seed\n";
  for (const auto& item : corpus) {
    const std::string cls = class_name(item.item.label);
    ensure_dir(opt.out / cls);
    const std::string rel = cls + "/" + item.item.source_id + ".wav";
    write_wav(opt.out / rel, item.item.clip);
    manifest += rel + "," + std::to_string(item.item.label) + "," + format_real(item.f0_hz) + "," +
                std::to_string(item.seed) + "\n";
  }
  write_text(opt.out / "manifest.csv", manifest);
}

std::vector<SkippedFile> cmd_features(const FeaturesOptions& opt) {
  auto corpus = load_corpus(opt.corpus);
  std::vector<LabeledClip> clips = std::move(corpus.clips);
  if (opt.augment && !clips.empty()) {
    AugmentConfig ac;
    ac.seed = substream(opt.seed, "augment");
    clips = augment_dataset(clips, default_rir_bank(substream(opt.seed, "rir")), ac);
  }

  std::optional<FeatureSelector> selector;
  if (opt.selector) selector = parse_selector_json(read_text(*opt.selector));

  FeatureTable table;
  if (selector) {
    table.feature_ids = selector->selected_indices;
  } else {
    for (int i = 0; i < opt.mfcc.n_coeffs; ++i) table.feature_ids.push_back(static_cast<std::size_t>(i));
  }
  for (const auto& c : clips) {
    FeatureVector v = clip_features(c.clip, opt.mfcc);
    if (selector) v = apply_selector(v, *selector);
    table.rows.push_back({std::move(v), c.label, c.source_id});
  }
  ensure_dir(opt.out);
  write_text(opt.out / "features.csv", feature_csv(table));
  return corpus.skipped;
}

TrainSummary cmd_train_central(const CentralOptions& opt) {
  if (opt.rounds < 1) throw Error(Errc::InvalidConfig, "rounds must be >= 1");
  const PreparedData data = prepare(opt.features, opt.test_fraction, opt.selection, opt.seed);

  FedConfig schedule;
  schedule.rounds = opt.rounds;
  schedule.local_epochs = opt.train.epochs;
  schedule.seed = substream(opt.seed, "train");
  schedule.train_cfg = opt.train;

  TrainSummary s;
  std::tie(s.bundle.model, s.loss) = train_matched_centralized(data.train, schedule);
  s.bundle.selector = data.selector;
  s.test_metrics = evaluate(s.bundle.model, data.test);
  s.train_metrics = evaluate(s.bundle.model, data.train);

  ensure_dir(opt.out);
  write_training_artifacts(opt.out, s);
  write_text(opt.out / "loss.csv", loss_csv(s.loss));
  return s;
}

TrainSummary cmd_train_fed(const FedOptions& opt) {
  const PreparedData data = prepare(opt.features, opt.test_fraction, opt.selection, opt.seed);
  FedConfig cfg = opt.fed;
  cfg.seed = substream(opt.seed, "train");

  auto result = run_federated_training(data.train, cfg);
  TrainSummary s;
  s.bundle.model = std::move(result.model);
  s.bundle.selector = data.selector;
  s.history = std::move(result.history);
  s.test_metrics = evaluate(s.bundle.model, data.test);
  s.train_metrics = evaluate(s.bundle.model, data.train);

  ensure_dir(opt.out);
  write_training_artifacts(opt.out, s);
  write_text(opt.out / "history.csv", history_csv(s.history));
  write_text(opt.out / "train_metrics.json", metrics_json(s.train_metrics));
  return s;
}

MetricsReport cmd_eval(const EvalOptions& opt) {
  const ModelBundle bundle = parse_model_json(read_text(opt.model));
  const FeatureTable table = parse_feature_csv(read_text(opt.features));
  Dataset rows = table.rows;
  if (bundle.selector && table.feature_ids.size() != bundle.selector->selected_indices.size()) {
    // Full-width table: map the model's MFCC ids onto column positions.
    FeatureSelector columns;
    for (auto id : bundle.selector->selected_indices) {
      const auto it = std::find(table.feature_ids.begin(), table.feature_ids.end(), id);
      if (it == table.feature_ids.end())
        throw Error(Errc::DimensionMismatch, "feature f" + std::to_string(id) + " missing from " + opt.features.string());
      columns.selected_indices.push_back(static_cast<std::size_t>(it - table.feature_ids.begin()));
    }
    for (auto& ex : rows) ex.features = apply_selector(ex.features, columns);
  }
  const MetricsReport report = evaluate(bundle.model, rows);
  if (opt.out) {
    ensure_dir(*opt.out);
    write_text(*opt.out / "metrics.json", metrics_json(report));
    write_text(*opt.out / "metrics.csv", metrics_csv(report));
  }
  return report;
}

DiagnosisReport diagnose_clip(const AudioClip& input, const ModelBundle& model, const DiagnoseOptions& opt) {
  const AudioClip clip = resample(input, kCanonicalRateHz);
  const auto segments = detect_voice_activity(clip, opt.vad);

  AudioClip voiced;
  voiced.sample_rate_hz = clip.sample_rate_hz;
  std::vector<std::size_t> origin;
  for (const auto& seg : segments) {
    for (std::size_t i = seg.start; i < seg.end; ++i) {
      voiced.samples.push_back(clip.samples[i]);
      origin.push_back(i);
    }
  }
  if (voiced.empty()) throw Error(Errc::NoVoiceDetected, "no voiced audio");

  const auto sections = design_butterworth_bandpass(opt.filter, clip.sample_rate_hz);
  voiced = apply_filter(voiced, sections);

  const auto window = static_cast<std::size_t>(clip.sample_rate_hz);
  DiagnosisReport report;
  std::size_t positives = 0;
  for (std::size_t start = 0; start < voiced.samples.size(); start += window) {
    const std::size_t len = std::min(window, voiced.samples.size() - start);
    if (2 * len < window) break;  // tails under 500 ms are dropped
    AudioClip w{{voiced.samples.begin() + static_cast<std::ptrdiff_t>(start),
                 voiced.samples.begin() + static_cast<std::ptrdiff_t>(start + len)},
                clip.sample_rate_hz};
    w.samples.resize(window, 0.0);
    FeatureVector v = mfcc(w, opt.mfcc);
    if (model.selector) v = apply_selector(v, *model.selector);
    const Prediction p = predict(model.model, v);
    report.windows.push_back({1000.0 * static_cast<double>(origin[start]) / clip.sample_rate_hz, p.label, p.score});
    positives += p.label > 0 ? 1 : 0;
  }
  if (report.windows.empty()) throw Error(Errc::NoVoiceDetected, "voiced audio shorter than 500 ms");

  report.positive_window_fraction = static_cast<double>(positives) / static_cast<double>(report.windows.size());
  report.verdict = report.positive_window_fraction >= opt.threshold ? kAsphyxia : kNormal;
  return report;
}

DiagnosisReport cmd_diagnose(const DiagnoseOptions& opt) {
  const ModelBundle model = parse_model_json(read_text(opt.model));
  DiagnosisReport report = diagnose_clip(read_wav(opt.wav), model, opt);
  report.file = opt.wav.string();
  return report;
}

std::string diagnosis_json(const DiagnosisReport& report) {
  nlohmann::ordered_json j;
  j["file"] = report.file;
  j["status"] = "ok";
  auto windows = nlohmann::ordered_json::array();
  for (const auto& w : report.windows) {
    nlohmann::ordered_json o;
    o["start_ms"] = round_sig9(w.start_ms);
    o["label"] = class_name(w.label);
    o["score"] = round_sig9(w.score);
    windows.push_back(o);
  }
  j["windows"] = windows;
  j["positive_window_fraction"] = round_sig9(report.positive_window_fraction);
  j["verdict"] = class_name(report.verdict);
  return j.dump(2) + "\n";
}

std::string no_voice_json(const std::string& file) {
  nlohmann::ordered_json j;
  j["file"] = file;
  j["status"] = "NoVoiceDetected";
  j["windows"] = nlohmann::ordered_json::array();
  return j.dump(2) + "\n";
}

}  // namespace cryfl::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cryfl/audio.hpp"
#include "cryfl/dataset.hpp"
#include "cryfl/federation.hpp"
#include "cryfl/features.hpp"
#include "cryfl/forest.hpp"
#include "cryfl/io.hpp"

// Pipeline commands behind the command-line tool. Each takes a plain options
// struct and writes its artifacts under `out`; all randomness is derived from
// `seed` through tagged substreams.
namespace cryfl::cli {

namespace fs = std::filesystem;

// Seed of a named substream of the global seed.
std::uint64_t substream(std::uint64_t seed, const char* tag);

struct SynthOptions {
  SynthConfig synth;
  std::uint64_t seed = 0;
  fs::path out;
};

// Writes <out>/<class>/<class>_<index>.wav and <out>/manifest.csv.
void cmd_synth(const SynthOptions& opt);

struct FeaturesOptions {
  fs::path corpus;
  fs::path out;
  MfccConfig mfcc;
  std::optional<fs::path> selector;
  bool augment = false;
  std::uint64_t seed = 0;
};

// Writes <out>/features.csv; returns the files that could not be read.
std::vector<SkippedFile> cmd_features(const FeaturesOptions& opt);

struct SelectionOptions {
  int k = 20;  // 0 disables selection
  ForestConfig forest;
};

struct CentralOptions {
  fs::path features;
  fs::path out;
  TrainConfig train;
  int rounds = 1;  // training segments with a fresh optimizer each (matched schedule)
  double test_fraction = 0.2;
  SelectionOptions selection;
  std::uint64_t seed = 0;
};

struct TrainSummary {
  ModelBundle bundle;
  MetricsReport test_metrics;
  MetricsReport train_metrics;
  LossTrace loss;
  std::vector<RoundRecord> history;
};

// Writes model.json, loss.csv, metrics.json, metrics.csv (+ selector.json).
TrainSummary cmd_train_central(const CentralOptions& opt);

struct FedOptions {
  fs::path features;
  fs::path out;
  FedConfig fed;
  double test_fraction = 0.2;
  SelectionOptions selection;
  std::uint64_t seed = 0;
};

// Writes model.json, history.csv, metrics.json, metrics.csv,
// train_metrics.json (+ selector.json).
TrainSummary cmd_train_fed(const FedOptions& opt);

struct EvalOptions {
  fs::path features;
  fs::path model;
  std::optional<fs::path> out;
};

MetricsReport cmd_eval(const EvalOptions& opt);

struct DiagnoseOptions {
  fs::path wav;
  fs::path model;
  VadConfig vad;
  FilterSpec filter;
  MfccConfig mfcc;
  double threshold = 0.5;
};

struct WindowResult {
  double start_ms = 0.0;
  int label = kAsphyxia;
  double score = 0.0;
};

struct DiagnosisReport {
  std::string file;
  std::vector<WindowResult> windows;
  int verdict = kAsphyxia;
  double positive_window_fraction = 0.0;
};

// resample -> VAD -> band-pass -> 1 s windows -> MFCC (+ selector) -> vote.
// Throws NoVoiceDetected when no window survives.
DiagnosisReport diagnose_clip(const AudioClip& clip, const ModelBundle& model, const DiagnoseOptions& opt);

DiagnosisReport cmd_diagnose(const DiagnoseOptions& opt);

std::string diagnosis_json(const DiagnosisReport& report);
std::string no_voice_json(const std::string& file);

}  // namespace cryfl::cli

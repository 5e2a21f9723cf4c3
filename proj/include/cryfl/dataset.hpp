#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cryfl/audio.hpp"
#include "cryfl/features.hpp"
#include "cryfl/svm.hpp"

namespace cryfl {

struct LabeledClip {
  AudioClip clip;
  int label = kNormal;
  std::string source_id;
};

const char* class_name(int label);
int label_from_class(const std::string& name);  // throws InvalidLabel

struct SkippedFile {
  std::filesystem::path path;
  std::string reason;
};

struct CorpusLoadResult {
  std::vector<LabeledClip> clips;
  std::vector<SkippedFile> skipped;
};

// Reads <root>/normal/*.wav and <root>/asphyxia/*.wav in lexicographic order,
// resampling to the canonical rate. Invalid files are skipped and reported.
CorpusLoadResult load_corpus(const std::filesystem::path& root, int target_rate_hz = kCanonicalRateHz);

struct SynthConfig {
  int n_normal = 400;
  int n_asphyxia = 400;
  double duration_ms = 1000.0;
  int sample_rate = kCanonicalRateHz;
  double normal_f0_lo = 350.0, normal_f0_hi = 550.0;
  double asphyxia_f0_lo = 650.0, asphyxia_f0_hi = 900.0;
  double asphyxia_noise_db = -20.0;  // noise RMS relative to the harmonic stack RMS
  std::uint64_t seed = 0;
};

struct SynthClip {
  LabeledClip item;
  double f0_hz = 0.0;
  std::uint64_t seed = 0;
};

// Harmonic stacks (amplitudes 1, 1/2, 1/3, 1/4) with +-3% F0 jitter and a
// rise/fall envelope. Normal clips come first, then asphyxia clips.
std::vector<SynthClip> generate_synthetic_corpus(const SynthConfig& cfg);

struct AugmentMultiplicity {
  int tanh_copies = 1;
  int rir_copies = 1;
};

struct AugmentConfig {
  double gain_min = 2.0;
  double gain_max = 8.0;
  AugmentMultiplicity normal;
  AugmentMultiplicity asphyxia;
  std::uint64_t seed = 0;
};

// Originals, then tanh-distorted copies, then reverberated copies (impulse
// responses used round-robin). Labels are preserved.
std::vector<LabeledClip> augment_dataset(std::span<const LabeledClip> clips, std::span<const RirFilter> rir_bank,
                                         const AugmentConfig& cfg = {});

// A small bank of synthetic room responses, prepared and power-normalized.
std::vector<RirFilter> default_rir_bank(std::uint64_t seed, int sample_rate_hz = kCanonicalRateHz);

// Train/test partition; both halves keep input order.
std::pair<Dataset, Dataset> split(const Dataset& examples, double test_fraction, bool stratified, std::uint64_t seed);

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricsReport {
  double sensitivity = 0.0;
  double specificity = 0.0;
  double uar = 0.0;
  double accuracy = 0.0;
};

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels);

MetricsReport metrics(const ConfusionMatrix& cm);

MetricsReport evaluate(const SvmModel& model, std::span<const LabeledExample> data);

}  // namespace cryfl

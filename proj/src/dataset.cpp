#include "cryfl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "cryfl/error.hpp"
#include "cryfl/rng.hpp"
#include "cryfl/wav.hpp"

namespace cryfl {

namespace fs = std::filesystem;

const char* class_name(int label) { return label > 0 ? "asphyxia" : "normal"; }

int label_from_class(const std::string& name) {
  if (name == "asphyxia") return kAsphyxia;
  if (name == "normal") return kNormal;
  throw Error(Errc::InvalidLabel, "unknown class '" + name + "'");
}

CorpusLoadResult load_corpus(const fs::path& root, int target_rate_hz) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(Errc::IoError, "corpus directory " + root.string() + " not found");

  std::vector<std::pair<std::string, int>> files;
  for (const char* cls : {"normal", "asphyxia"}) {
    const fs::path dir = root / cls;
    if (!fs::is_directory(dir, ec)) continue;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
      if (ext != ".wav") continue;
      files.emplace_back((fs::path(cls) / entry.path().filename()).generic_string(), label_from_class(cls));
    }
  }
  std::sort(files.begin(), files.end());

  CorpusLoadResult result;
  for (const auto& [rel, label] : files) {
    const fs::path path = root / rel;
    try {
      AudioClip clip = read_wav(path);
      if (clip.empty()) throw Error(Errc::EmptySignal, "no samples");
      result.clips.push_back({resample(clip, target_rate_hz), label, rel});
    } catch (const Error& e) {
      result.skipped.push_back({path, e.what()});
    }
  }
  return result;
}

std::vector<SynthClip> generate_synthetic_corpus(const SynthConfig& cfg) {
  if (cfg.n_normal < 0 || cfg.n_asphyxia < 0) throw Error(Errc::InvalidConfig, "class counts must be >= 0");
  if (cfg.sample_rate <= 0 || !(cfg.duration_ms > 0.0)) throw Error(Errc::InvalidConfig, "bad rate or duration");
  if (!(cfg.normal_f0_lo < cfg.normal_f0_hi) || !(cfg.asphyxia_f0_lo < cfg.asphyxia_f0_hi) ||
      !(cfg.normal_f0_hi < cfg.asphyxia_f0_lo || cfg.asphyxia_f0_hi < cfg.normal_f0_lo))
    throw Error(Errc::InvalidConfig, "F0 ranges must be proper and non-overlapping");

  constexpr double kJitter = 0.03;
  const auto n = static_cast<std::size_t>(std::llround(cfg.duration_ms * cfg.sample_rate / 1000.0));
  const double nyquist = cfg.sample_rate / 2.0;

  std::vector<SynthClip> out;
  out.reserve(static_cast<std::size_t>(cfg.n_normal + cfg.n_asphyxia));
  for (int label : {kNormal, kAsphyxia}) {
    const int count = label > 0 ? cfg.n_asphyxia : cfg.n_normal;
    double lo = label > 0 ? cfg.asphyxia_f0_lo : cfg.normal_f0_lo;
    double hi = label > 0 ? cfg.asphyxia_f0_hi : cfg.normal_f0_hi;
    // Keep the jittered instantaneous F0 inside the band.
    if (lo / (1.0 - kJitter) < hi / (1.0 + kJitter)) {
      lo /= 1.0 - kJitter;
      hi /= 1.0 + kJitter;
    }
    for (int i = 0; i < count; ++i) {
      const std::uint64_t seed =
          derive_seed(cfg.seed, {stream_tag(class_name(label)), static_cast<std::uint64_t>(i)});
      Rng rng(seed);
      const double f0 = rng.uniform(lo, hi);
      const double rate_hz = rng.uniform(3.0, 6.0);
      const double phase0 = rng.uniform(0.0, 2.0 * std::numbers::pi);

      std::vector<double> x(n, 0.0);
      double phase = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        const double t = static_cast<double>(s) / cfg.sample_rate;
        for (int h = 1; h <= 4; ++h)
          if (h * f0 * (1.0 + kJitter) < nyquist) x[s] += std::sin(h * phase) / h;
        const double f = f0 * (1.0 + kJitter * std::sin(2.0 * std::numbers::pi * rate_hz * t + phase0));
        phase += 2.0 * std::numbers::pi * f / cfg.sample_rate;
      }

      // Raised-cosine attack over the first 10%, release over the last 20%.
      const double attack = 0.1 * static_cast<double>(n);
      const double release = 0.2 * static_cast<double>(n);
      for (std::size_t s = 0; s < n; ++s) {
        const double pos = static_cast<double>(s);
        double env = 1.0;
        if (pos < attack) env = 0.5 - 0.5 * std::cos(std::numbers::pi * pos / attack);
        if (pos > static_cast<double>(n) - release)
          env = 0.5 - 0.5 * std::cos(std::numbers::pi * (static_cast<double>(n) - pos) / release);
        x[s] *= env;
      }

      double peak = 0.0;
      for (double v : x) peak = std::max(peak, std::abs(v));
      if (peak > 0.0)
        for (double& v : x) v *= 0.8 / peak;

      if (label > 0) {
        double energy = 0.0;
        for (double v : x) energy += v * v;
        const double noise_rms =
            std::sqrt(energy / static_cast<double>(std::max<std::size_t>(1, n))) * std::pow(10.0, cfg.asphyxia_noise_db / 20.0);
        for (double& v : x) v += noise_rms * rng.normal();
        double p = 0.0;
        for (double v : x) p = std::max(p, std::abs(v));
        if (p > 0.99)
          for (double& v : x) v *= 0.99 / p;
      }

      char name[64];
      std::snprintf(name, sizeof name, "%s_%04d", class_name(label), i);
      out.push_back({LabeledClip{AudioClip{std::move(x), cfg.sample_rate}, label, name}, f0, seed});
    }
  }
  return out;
}

std::vector<LabeledClip> augment_dataset(std::span<const LabeledClip> clips, std::span<const RirFilter> rir_bank,
                                         const AugmentConfig& cfg) {
  if (clips.empty()) throw Error(Errc::EmptyDataset, "nothing to augment");
  if (rir_bank.empty()) throw Error(Errc::MissingRir, "reverberation needs at least one impulse response");
  if (!(cfg.gain_min > 0.0) || cfg.gain_max < cfg.gain_min)
    throw Error(Errc::InvalidGain, "gain range must satisfy 0 < min <= max");

  std::vector<LabeledClip> out(clips.begin(), clips.end());
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const auto& mult = clips[i].label > 0 ? cfg.asphyxia : cfg.normal;
    for (int c = 0; c < mult.tanh_copies; ++c) {
      Rng rng(derive_seed(cfg.seed, {stream_tag("tanh"), i, static_cast<std::uint64_t>(c)}));
      const double gain = rng.uniform(cfg.gain_min, cfg.gain_max);
      char tag[48];
      std::snprintf(tag, sizeof tag, "+tanh(g=%.4f)", gain);
      out.push_back({tanh_distortion(clips[i].clip, gain), clips[i].label, clips[i].source_id + tag});
    }
  }
  std::size_t next_rir = 0;
  for (const auto& src : clips) {
    const auto& mult = src.label > 0 ? cfg.asphyxia : cfg.normal;
    for (int c = 0; c < mult.rir_copies; ++c) {
      const std::size_t r = next_rir++ % rir_bank.size();
      out.push_back({convolve_rir(src.clip, rir_bank[r]), src.label, src.source_id + "+rir#" + std::to_string(r)});
    }
  }
  return out;
}

std::vector<RirFilter> default_rir_bank(std::uint64_t seed, int sample_rate_hz) {
  std::vector<RirFilter> bank;
  int i = 0;
  for (double rt60 : {0.2, 0.35, 0.5}) {
    const auto raw = synthesize_rir(rt60, rt60, derive_seed(seed, {stream_tag("rir"), static_cast<std::uint64_t>(i++)}),
                                    sample_rate_hz);
    bank.push_back(prepare_rir(raw));
  }
  return bank;
}

std::pair<Dataset, Dataset> split(const Dataset& examples, double test_fraction, bool stratified, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw Error(Errc::InvalidConfig, "test fraction must be in (0, 1)");
  Rng rng(derive_seed(seed, {stream_tag("split")}));
  std::vector<bool> in_test(examples.size(), false);

  const auto pick = [&](std::vector<std::size_t> idx, const char* what) {
    if (idx.size() < 2)
      throw Error(Errc::StratifyError, std::string(what) + " has " + std::to_string(idx.size()) + " example(s); need 2");
    rng.shuffle(idx);
    const auto want = std::llround(static_cast<double>(idx.size()) * test_fraction);
    const auto n_test = static_cast<std::size_t>(std::clamp<long long>(want, 1, static_cast<long long>(idx.size()) - 1));
    for (std::size_t i = 0; i < n_test; ++i) in_test[idx[i]] = true;
  };

  if (stratified) {
    for (int cls : {kNormal, kAsphyxia}) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < examples.size(); ++i)
        if (examples[i].label == cls) idx.push_back(i);
      pick(std::move(idx), class_name(cls));
    }
  } else {
    std::vector<std::size_t> idx(examples.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    pick(std::move(idx), "dataset");
  }

  Dataset train, test;
  for (std::size_t i = 0; i < examples.size(); ++i) (in_test[i] ? test : train).push_back(examples[i]);
  return {std::move(train), std::move(test)};
}

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size())
    throw Error(Errc::DimensionMismatch, "predictions and labels differ in length");
  if (labels.empty()) throw Error(Errc::EmptyDataset, "no predictions");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int p = predictions[i];
    const int y = labels[i];
    if ((p != 1 && p != -1) || (y != 1 && y != -1)) throw Error(Errc::InvalidLabel, "labels must be -1 or +1");
    if (y > 0)
      (p > 0 ? cm.tp : cm.fn) += 1;
    else
      (p > 0 ? cm.fp : cm.tn) += 1;
  }
  return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  if (cm.tp + cm.fn == 0) throw Error(Errc::UndefinedMetric, "no asphyxia examples; sensitivity is undefined");
  if (cm.tn + cm.fp == 0) throw Error(Errc::UndefinedMetric, "no normal examples; specificity is undefined");
  MetricsReport r;
  r.sensitivity = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  r.specificity = static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
  r.uar = (r.sensitivity + r.specificity) / 2.0;
  r.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  return r;
}

MetricsReport evaluate(const SvmModel& model, std::span<const LabeledExample> data) {
  std::vector<int> preds, labels;
  preds.reserve(data.size());
  labels.reserve(data.size());
  for (const auto& ex : data) {
    preds.push_back(predict(model, ex.features).label);
    labels.push_back(ex.label);
  }
  return metrics(confusion(preds, labels));
}

}  // namespace cryfl

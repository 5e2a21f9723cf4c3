#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cryfl {

inline constexpr int kCanonicalRateHz = 16000;

// Mono signal with amplitudes nominally in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate_hz = kCanonicalRateHz;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
  bool empty() const { return samples.empty(); }
};

// Band-pass design request. `order` is the order of the analog low-pass
// prototype; the digital band-pass has 2*order poles realized as `order`
// second-order sections.
struct FilterSpec {
  double low_cut_hz = 100.0;
  double high_cut_hz = 4000.0;
  int order = 4;
};

// One biquad, a0 normalized to 1.
struct SecondOrderSection {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

struct RirFilter {
  std::vector<double> taps;
  int sample_rate_hz = kCanonicalRateHz;
  bool normalized_power = false;
};

struct VadConfig {
  double frame_ms = 30.0;
  double energy_threshold_db = -25.0;  // relative to clip RMS
  int hangover_frames = 3;
};

// Half-open sample range [start, end).
struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Segment&) const = default;
};

AudioClip resample(const AudioClip& clip, int target_rate_hz);

std::vector<SecondOrderSection> design_butterworth_bandpass(const FilterSpec& spec, int sample_rate_hz);

// Complex-free magnitude of a cascade at `freq_hz`.
double cascade_magnitude(std::span<const SecondOrderSection> sections, double freq_hz, int sample_rate_hz);

// Largest pole radius over all sections; < 1 means stable.
double max_pole_radius(std::span<const SecondOrderSection> sections);

AudioClip apply_filter(const AudioClip& clip, std::span<const SecondOrderSection> sections);

std::vector<Segment> detect_voice_activity(const AudioClip& clip, const VadConfig& cfg = {});

AudioClip tanh_distortion(const AudioClip& clip, double gain);

// tail_samples == 0 keeps everything after the main impulse.
RirFilter prepare_rir(const AudioClip& raw, bool flip_time_axis = false, std::size_t tail_samples = 0);

// Linear convolution truncated to the length of `x` (no normalization).
std::vector<double> convolve_truncated(std::span<const double> x, std::span<const double> h);

AudioClip convolve_rir(const AudioClip& clip, const RirFilter& rir);

AudioClip synthesize_rir(double duration_s, double rt60_s, std::uint64_t seed,
                         int sample_rate_hz = kCanonicalRateHz);

}  // namespace cryfl

#include "cryfl/audio.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "cryfl/error.hpp"
#include "cryfl/rng.hpp"
#include "fft.hpp"

namespace cryfl {

namespace {

using cd = std::complex<double>;

void require_rate(int rate) {
  if (rate <= 0) throw Error(Errc::InvalidConfig, "sample rate must be positive");
}

cd section_response(const SecondOrderSection& s, cd z_inv) {
  const cd num = s.b0 + z_inv * (s.b1 + z_inv * s.b2);
  const cd den = 1.0 + z_inv * (s.a1 + z_inv * s.a2);
  return num / den;
}

// Biquad with zeros at z = +1 and z = -1 and a conjugate pole pair at `pole`.
SecondOrderSection bandpass_section(cd pole, double center_omega) {
  SecondOrderSection s;
  s.b0 = 1.0;
  s.b1 = 0.0;
  s.b2 = -1.0;
  s.a1 = -2.0 * pole.real();
  s.a2 = std::norm(pole);
  const double mag = std::abs(section_response(s, std::polar(1.0, -center_omega)));
  s.b0 /= mag;
  s.b2 /= mag;
  return s;
}

}  // namespace

AudioClip resample(const AudioClip& clip, int target_rate_hz) {
  if (target_rate_hz <= 0) throw Error(Errc::InvalidConfig, "target rate must be positive");
  require_rate(clip.sample_rate_hz);
  if (clip.empty()) throw Error(Errc::EmptySignal, "cannot resample an empty clip");
  if (target_rate_hz == clip.sample_rate_hz) return clip;

  const std::size_t n = clip.samples.size();
  const double ratio = static_cast<double>(clip.sample_rate_hz) / target_rate_hz;
  const auto n_out = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(static_cast<double>(n) * target_rate_hz / clip.sample_rate_hz)));

  AudioClip out;
  out.sample_rate_hz = target_rate_hz;
  out.samples.resize(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    const double pos = static_cast<double>(i) * ratio;
    const auto idx = static_cast<std::size_t>(pos);
    if (idx + 1 >= n) {
      out.samples[i] = clip.samples[n - 1];
      continue;
    }
    const double frac = pos - static_cast<double>(idx);
    out.samples[i] = clip.samples[idx] + frac * (clip.samples[idx + 1] - clip.samples[idx]);
  }
  return out;
}

std::vector<SecondOrderSection> design_butterworth_bandpass(const FilterSpec& spec, int sample_rate_hz) {
  require_rate(sample_rate_hz);
  const double nyquist = sample_rate_hz / 2.0;
  if (spec.low_cut_hz <= 0.0 || spec.high_cut_hz <= spec.low_cut_hz)
    throw Error(Errc::InvalidFilterSpec, "cutoffs must satisfy 0 < low < high");
  if (spec.high_cut_hz >= nyquist)
    throw Error(Errc::InvalidFilterSpec,
                "high cut " + std::to_string(spec.high_cut_hz) + " Hz is not below Nyquist");
  if (spec.order < 2 || spec.order > 8 || spec.order % 2 != 0)
    throw Error(Errc::InvalidFilterSpec, "order must be one of 2, 4, 6, 8");

  const double fs2 = 2.0 * sample_rate_hz;
  // Pre-warp the band edges so the bilinear map lands them exactly.
  const double w_lo = fs2 * std::tan(std::numbers::pi * spec.low_cut_hz / sample_rate_hz);
  const double w_hi = fs2 * std::tan(std::numbers::pi * spec.high_cut_hz / sample_rate_hz);
  const double bw = w_hi - w_lo;
  const double w0_sq = w_lo * w_hi;
  const double center_omega = 2.0 * std::atan(std::sqrt(w0_sq) / fs2);

  const int n = spec.order;
  std::vector<SecondOrderSection> sections;
  sections.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n / 2; ++k) {
    // Upper-half-plane prototype pole; its conjugate yields the mirrored pairs.
    const cd p = std::polar(1.0, std::numbers::pi * (2.0 * k + n + 1) / (2.0 * n));
    const cd half = p * bw / 2.0;
    const cd root = std::sqrt(half * half - w0_sq);
    for (const cd s : {half + root, half - root}) {
      const cd z = (fs2 + s) / (fs2 - s);
      sections.push_back(bandpass_section(z, center_omega));
    }
  }
  return sections;
}

double cascade_magnitude(std::span<const SecondOrderSection> sections, double freq_hz, int sample_rate_hz) {
  const cd z_inv = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / sample_rate_hz);
  cd h = 1.0;
  for (const auto& s : sections) h *= section_response(s, z_inv);
  return std::abs(h);
}

double max_pole_radius(std::span<const SecondOrderSection> sections) {
  double r = 0.0;
  for (const auto& s : sections) {
    const double disc = s.a1 * s.a1 - 4.0 * s.a2;
    if (disc < 0.0) {
      r = std::max(r, std::sqrt(s.a2));
    } else {
      const double sq = std::sqrt(disc);
      r = std::max({r, std::abs((-s.a1 + sq) / 2.0), std::abs((-s.a1 - sq) / 2.0)});
    }
  }
  return r;
}

AudioClip apply_filter(const AudioClip& clip, std::span<const SecondOrderSection> sections) {
  AudioClip out = clip;
  for (const auto& s : sections) {
    double z1 = 0.0, z2 = 0.0;
    for (double& x : out.samples) {
      const double y = s.b0 * x + z1;
      z1 = s.b1 * x - s.a1 * y + z2;
      z2 = s.b2 * x - s.a2 * y;
      x = y;
    }
  }
  return out;
}

std::vector<Segment> detect_voice_activity(const AudioClip& clip, const VadConfig& cfg) {
  require_rate(clip.sample_rate_hz);
  if (!(cfg.frame_ms > 0.0) || cfg.hangover_frames < 0)
    throw Error(Errc::InvalidConfig, "VAD frame_ms must be > 0 and hangover >= 0");
  const auto frame_len = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(cfg.frame_ms * clip.sample_rate_hz / 1000.0)));
  const std::size_t n = clip.samples.size();
  if (n < frame_len) throw Error(Errc::SignalTooShort, "clip is shorter than one VAD frame");

  double total = 0.0;
  for (double x : clip.samples) total += x * x;
  const double clip_rms = std::sqrt(total / static_cast<double>(n));
  if (clip_rms == 0.0) return {};
  const double threshold = clip_rms * std::pow(10.0, cfg.energy_threshold_db / 20.0);

  const std::size_t n_frames = (n + frame_len - 1) / frame_len;
  std::vector<bool> active(n_frames, false);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t b = f * frame_len;
    const std::size_t e = std::min(n, b + frame_len);
    double acc = 0.0;
    for (std::size_t i = b; i < e; ++i) acc += clip.samples[i] * clip.samples[i];
    active[f] = std::sqrt(acc / static_cast<double>(e - b)) > threshold;
  }

  std::vector<Segment> segments;
  std::size_t f = 0;
  while (f < n_frames) {
    if (!active[f]) {
      ++f;
      continue;
    }
    std::size_t last = f;
    while (last + 1 < n_frames && active[last + 1]) ++last;
    const std::size_t end_frame = std::min(n_frames, last + 1 + static_cast<std::size_t>(cfg.hangover_frames));
    Segment seg{f * frame_len, std::min(n, end_frame * frame_len)};
    if (!segments.empty() && seg.start <= segments.back().end)
      segments.back().end = std::max(segments.back().end, seg.end);
    else
      segments.push_back(seg);
    f = last + 1;
  }
  return segments;
}

AudioClip tanh_distortion(const AudioClip& clip, double gain) {
  if (!(gain > 0.0) || !std::isfinite(gain)) throw Error(Errc::InvalidGain, "gain must be a finite value > 0");
  AudioClip out = clip;
  for (double& x : out.samples) x = std::tanh(gain * x);
  return out;
}

RirFilter prepare_rir(const AudioClip& raw, bool flip_time_axis, std::size_t tail_samples) {
  require_rate(raw.sample_rate_hz);
  if (raw.empty()) throw Error(Errc::DegenerateRir, "impulse response is empty");
  std::size_t peak = 0;
  for (std::size_t i = 1; i < raw.samples.size(); ++i)
    if (std::abs(raw.samples[i]) > std::abs(raw.samples[peak])) peak = i;
  if (raw.samples[peak] == 0.0) throw Error(Errc::DegenerateRir, "impulse response is all zeros");

  std::size_t end = raw.samples.size();
  if (tail_samples > 0) end = std::min(end, peak + tail_samples);

  RirFilter rir;
  rir.sample_rate_hz = raw.sample_rate_hz;
  rir.taps.assign(raw.samples.begin() + static_cast<std::ptrdiff_t>(peak),
                  raw.samples.begin() + static_cast<std::ptrdiff_t>(end));
  double energy = 0.0;
  for (double t : rir.taps) energy += t * t;
  const double scale = 1.0 / std::sqrt(energy);
  for (double& t : rir.taps) t *= scale;
  rir.normalized_power = true;
  if (flip_time_axis) std::reverse(rir.taps.begin(), rir.taps.end());
  return rir;
}

std::vector<double> convolve_truncated(std::span<const double> x, std::span<const double> h) {
  const std::size_t n = x.size();
  const std::size_t m = h.size();
  std::vector<double> y(n, 0.0);
  if (n == 0 || m == 0) return y;

  if (n * m <= (std::size_t{1} << 18)) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      const std::size_t kmax = std::min(m - 1, i);
      for (std::size_t k = 0; k <= kmax; ++k) acc += h[k] * x[i - k];
      y[i] = acc;
    }
    return y;
  }

  const std::size_t hm = std::min(m, n);
  const std::size_t size = detail::next_pow2(n + hm - 1);
  auto fx = detail::rfft(x, size);
  const auto fh = detail::rfft(h.first(hm), size);
  for (std::size_t k = 0; k < fx.size(); ++k) fx[k] *= fh[k];
  const auto full = detail::irfft(fx, size);
  std::copy_n(full.begin(), n, y.begin());
  return y;
}

AudioClip convolve_rir(const AudioClip& clip, const RirFilter& rir) {
  if (rir.taps.empty()) throw Error(Errc::DegenerateRir, "impulse response has no taps");
  if (clip.sample_rate_hz != rir.sample_rate_hz)
    throw Error(Errc::RateMismatch, "clip at " + std::to_string(clip.sample_rate_hz) +
                                        " Hz, impulse response prepared at " +
                                        std::to_string(rir.sample_rate_hz) + " Hz");
  AudioClip out;
  out.sample_rate_hz = clip.sample_rate_hz;
  out.samples = convolve_truncated(clip.samples, rir.taps);
  double peak = 0.0;
  for (double v : out.samples) peak = std::max(peak, std::abs(v));
  if (peak > 1.0)
    for (double& v : out.samples) v /= peak;
  return out;
}

AudioClip synthesize_rir(double duration_s, double rt60_s, std::uint64_t seed, int sample_rate_hz) {
  require_rate(sample_rate_hz);
  if (!(duration_s > 0.0) || !(rt60_s > 0.0))
    throw Error(Errc::InvalidConfig, "RIR duration and rt60 must be positive");
  const auto n = static_cast<std::size_t>(std::max<long long>(1, std::llround(duration_s * sample_rate_hz)));
  Rng rng(seed);
  AudioClip out;
  out.sample_rate_hz = sample_rate_hz;
  out.samples.resize(n);
  // 6.9 ~= ln(1000): amplitude falls 60 dB over rt60.
  const double decay = 6.9 / rt60_s;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate_hz;
    out.samples[i] = std::exp(-decay * t) * rng.normal();
  }
  out.samples[0] = 1.0;
  return out;
}

}  // namespace cryfl

#include "cryfl/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "cryfl/error.hpp"
#include "fft.hpp"

namespace cryfl {

namespace {

std::size_t ms_to_samples(double ms, int rate) {
  return static_cast<std::size_t>(std::llround(ms * rate / 1000.0));
}

void validate(const MfccConfig& cfg, int sample_rate_hz) {
  if (!(cfg.frame_ms > 0.0) || !(cfg.hop_ms > 0.0) || cfg.frame_ms < cfg.hop_ms)
    throw Error(Errc::InvalidConfig, "need frame_ms >= hop_ms > 0");
  if (cfg.n_mels < 1 || cfg.n_coeffs < 1 || cfg.n_coeffs > cfg.n_mels)
    throw Error(Errc::InvalidConfig, "need 1 <= n_coeffs <= n_mels");
  if (!(cfg.fmin_hz >= 0.0) || !(cfg.fmin_hz < cfg.fmax_hz))
    throw Error(Errc::InvalidConfig, "need 0 <= fmin < fmax");
  if (cfg.fmax_hz > sample_rate_hz / 2.0)
    throw Error(Errc::InvalidConfig, "fmax " + std::to_string(cfg.fmax_hz) + " Hz exceeds Nyquist");
  if (!(cfg.log_floor > 0.0)) throw Error(Errc::InvalidConfig, "log_floor must be > 0");
}

// Row k holds the orthonormal DCT-II basis vector k over n inputs.
Matrix dct_basis(std::size_t n, int n_out) {
  Matrix basis(static_cast<std::size_t>(n_out), std::vector<double>(n, 0.0));
  if (n == 0) return basis;
  const double s0 = std::sqrt(1.0 / static_cast<double>(n));
  const double sk = std::sqrt(2.0 / static_cast<double>(n));
  for (int k = 0; k < n_out; ++k)
    for (std::size_t i = 0; i < n; ++i)
      basis[static_cast<std::size_t>(k)][i] =
          (k == 0 ? s0 : sk) *
          std::cos(std::numbers::pi * k * (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n)));
  return basis;
}

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Matrix frame_and_window(const AudioClip& clip, const MfccConfig& cfg) {
  validate(cfg, clip.sample_rate_hz);
  const std::size_t frame_len = ms_to_samples(cfg.frame_ms, clip.sample_rate_hz);
  const std::size_t hop = std::max<std::size_t>(1, ms_to_samples(cfg.hop_ms, clip.sample_rate_hz));
  if (frame_len == 0 || clip.samples.size() < frame_len)
    throw Error(Errc::SignalTooShort, "clip is shorter than one analysis frame");

  std::vector<double> window(frame_len);
  for (std::size_t i = 0; i < frame_len; ++i) {
    window[i] = frame_len == 1 ? 1.0
                               : 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                                        static_cast<double>(frame_len - 1));
  }

  const std::size_t n_frames = (clip.samples.size() - frame_len) / hop + 1;
  Matrix frames(n_frames, std::vector<double>(frame_len));
  for (std::size_t f = 0; f < n_frames; ++f)
    for (std::size_t i = 0; i < frame_len; ++i) frames[f][i] = clip.samples[f * hop + i] * window[i];
  return frames;
}

std::vector<double> power_spectrum(std::span<const double> frame) {
  const std::size_t n = detail::next_pow2(std::max<std::size_t>(1, frame.size()));
  const auto bins = detail::rfft(frame, n);
  std::vector<double> power(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) power[k] = std::norm(bins[k]);
  return power;
}

std::vector<double> mel_centers_hz(const MfccConfig& cfg) {
  const double lo = hz_to_mel(cfg.fmin_hz);
  const double step = (hz_to_mel(cfg.fmax_hz) - lo) / (cfg.n_mels + 1);
  std::vector<double> centers(static_cast<std::size_t>(cfg.n_mels));
  for (int i = 0; i < cfg.n_mels; ++i) centers[static_cast<std::size_t>(i)] = mel_to_hz(lo + step * (i + 1));
  return centers;
}

Matrix mel_filterbank(const MfccConfig& cfg, int sample_rate_hz, int n_fft_bins) {
  validate(cfg, sample_rate_hz);
  if (n_fft_bins < 2) throw Error(Errc::InvalidConfig, "need at least 2 FFT bins");
  const double lo = hz_to_mel(cfg.fmin_hz);
  const double step = (hz_to_mel(cfg.fmax_hz) - lo) / (cfg.n_mels + 1);
  const double bin_hz = sample_rate_hz / (2.0 * (n_fft_bins - 1));

  Matrix bank(static_cast<std::size_t>(cfg.n_mels), std::vector<double>(static_cast<std::size_t>(n_fft_bins), 0.0));
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double left = mel_to_hz(lo + step * m);
    const double center = mel_to_hz(lo + step * (m + 1));
    const double right = mel_to_hz(lo + step * (m + 2));
    auto& row = bank[static_cast<std::size_t>(m)];
    bool any = false;
    for (int k = 0; k < n_fft_bins; ++k) {
      const double f = k * bin_hz;
      double w = 0.0;
      if (f > left && f <= center)
        w = (f - left) / (center - left);
      else if (f > center && f < right)
        w = (right - f) / (right - center);
      row[static_cast<std::size_t>(k)] = w;
      any = any || w > 0.0;
    }
    // Filters narrower than a bin still need one tap.
    if (!any) {
      const auto k = std::clamp<long long>(std::llround(center / bin_hz), 0, n_fft_bins - 1);
      row[static_cast<std::size_t>(k)] = 1.0;
    }
  }
  return bank;
}

std::vector<double> dct_ii(std::span<const double> x, int n_out) {
  const Matrix basis = dct_basis(x.size(), n_out);
  std::vector<double> out(basis.size(), 0.0);
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (std::size_t i = 0; i < x.size(); ++i) out[k] += basis[k][i] * x[i];
  return out;
}

Matrix mfcc_frames(const AudioClip& clip, const MfccConfig& cfg) {
  const Matrix frames = frame_and_window(clip, cfg);
  const std::size_t n_fft = detail::next_pow2(frames.front().size());
  const Matrix bank = mel_filterbank(cfg, clip.sample_rate_hz, static_cast<int>(n_fft / 2 + 1));
  const Matrix basis = dct_basis(bank.size(), cfg.n_coeffs);

  Matrix out;
  out.reserve(frames.size());
  std::vector<double> log_mel(bank.size());
  for (const auto& frame : frames) {
    const auto power = power_spectrum(frame);
    for (std::size_t m = 0; m < bank.size(); ++m) {
      double e = 0.0;
      for (std::size_t k = 0; k < power.size(); ++k) e += bank[m][k] * power[k];
      log_mel[m] = std::log(e + cfg.log_floor);
    }
    std::vector<double> coeffs(basis.size(), 0.0);
    for (std::size_t k = 0; k < basis.size(); ++k)
      for (std::size_t m = 0; m < log_mel.size(); ++m) coeffs[k] += basis[k][m] * log_mel[m];
    out.push_back(std::move(coeffs));
  }
  return out;
}

FeatureVector mfcc(const AudioClip& clip, const MfccConfig& cfg) {
  if (clip.empty()) throw Error(Errc::EmptySignal, "cannot compute MFCCs of an empty clip");
  if (clip.sample_rate_hz <= 0) throw Error(Errc::InvalidConfig, "sample rate must be positive");
  const auto one_second = static_cast<std::size_t>(clip.sample_rate_hz);
  if (clip.samples.size() * 10 > one_second * 11)
    throw Error(Errc::InvalidConfig, "clip longer than 1100 ms; window it first");

  const Matrix frames = [&] {
    if (clip.samples.size() >= one_second) return mfcc_frames(clip, cfg);
    AudioClip padded = clip;
    padded.samples.resize(one_second, 0.0);
    return mfcc_frames(padded, cfg);
  }();

  FeatureVector pooled(static_cast<std::size_t>(cfg.n_coeffs), 0.0);
  for (const auto& f : frames)
    for (std::size_t c = 0; c < pooled.size(); ++c) pooled[c] += f[c];
  for (double& v : pooled) v /= static_cast<double>(frames.size());
  return pooled;
}

}  // namespace cryfl

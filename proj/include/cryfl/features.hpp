#pragma once

#include <span>
#include <vector>

#include "cryfl/audio.hpp"

namespace cryfl {

using FeatureVector = std::vector<double>;
using Matrix = std::vector<std::vector<double>>;

struct MfccConfig {
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  int n_mels = 40;
  int n_coeffs = 40;
  double fmin_hz = 20.0;
  double fmax_hz = 7600.0;
  double log_floor = 1e-10;
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Hamming-windowed frames; the trailing partial frame is dropped.
Matrix frame_and_window(const AudioClip& clip, const MfccConfig& cfg = {});

// |DFT|^2 for bins 0..N/2, N the next power of two >= frame length.
std::vector<double> power_spectrum(std::span<const double> frame);

// Center frequencies (Hz) of the triangular filters, strictly increasing.
std::vector<double> mel_centers_hz(const MfccConfig& cfg);

// n_mels x n_fft_bins triangular filterbank. n_fft_bins = N/2 + 1.
Matrix mel_filterbank(const MfccConfig& cfg, int sample_rate_hz, int n_fft_bins);

// Orthonormal DCT-II, first `n_out` coefficients.
std::vector<double> dct_ii(std::span<const double> x, int n_out);

// Per-frame MFCCs (frames x n_coeffs), before pooling.
Matrix mfcc_frames(const AudioClip& clip, const MfccConfig& cfg = {});

// Clip-level MFCC vector: mean of per-frame coefficients over a 1000 ms clip.
// Shorter clips are zero-padded to 1000 ms; clips over 1100 ms are rejected.
FeatureVector mfcc(const AudioClip& clip, const MfccConfig& cfg = {});

}  // namespace cryfl

#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's DSP, feature or training code paths.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline std::size_t pow2_at_least(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p *= 2;
  return p;
}

// |DFT|^2 of the zero-padded frame, bins 0..N/2, O(N^2).
inline std::vector<double> naive_power_spectrum(const std::vector<double>& frame) {
  const std::size_t n = pow2_at_least(frame.size());
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < frame.size(); ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n);
      re += frame[t] * std::cos(ang);
      im += frame[t] * std::sin(ang);
    }
    out[k] = re * re + im * im;
  }
  return out;
}

// Nested-loop linear convolution truncated to len(x).
inline std::vector<double> brute_convolve(const std::vector<double>& x, const std::vector<double>& h) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t k = 0; k < h.size(); ++k)
      if (k <= i) y[i] += h[k] * x[i - k];
  return y;
}

// Analog Butterworth band-pass magnitude (dB) at a digital frequency, through
// the pre-warped bilinear frequency map. `n` is the prototype order.
inline double butterworth_bandpass_db(double f, double lo, double hi, int n, double fs) {
  const auto warp = [fs](double hz) { return 2.0 * fs * std::tan(std::numbers::pi * hz / fs); };
  const double w = warp(f), wl = warp(lo), wh = warp(hi);
  const double mapped = (w * w - wl * wh) / (w * (wh - wl));
  return 10.0 * std::log10(1.0 / (1.0 + std::pow(mapped, 2.0 * n)));
}

// tanh from exponentials: (e^z - e^-z) / (e^z + e^-z).
inline double tanh_exp(double z) {
  const double a = std::exp(z), b = std::exp(-z);
  return (a - b) / (a + b);
}

// Straight-line MFCC: Hamming frames -> naive DFT power -> triangular mel
// filters -> log -> explicit DCT-II sums -> mean over frames.
struct MfccParams {
  double frame_ms = 25.0, hop_ms = 10.0;
  int n_mels = 40, n_coeffs = 40;
  double fmin = 20.0, fmax = 7600.0, floor = 1e-10;
};

inline std::vector<double> reference_mfcc(std::vector<double> x, int rate, const MfccParams& p = {}) {
  if (x.size() < static_cast<std::size_t>(rate)) x.resize(static_cast<std::size_t>(rate), 0.0);
  const auto frame = static_cast<std::size_t>(std::llround(p.frame_ms * rate / 1000.0));
  const auto hop = static_cast<std::size_t>(std::llround(p.hop_ms * rate / 1000.0));
  const std::size_t n_fft = pow2_at_least(frame);
  const std::size_t bins = n_fft / 2 + 1;
  const auto mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  const auto inv = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  const double m_lo = mel(p.fmin), m_hi = mel(p.fmax);

  std::vector<double> sum(static_cast<std::size_t>(p.n_coeffs), 0.0);
  std::size_t frames = 0;
  for (std::size_t start = 0; start + frame <= x.size(); start += hop, ++frames) {
    std::vector<double> buf(frame);
    for (std::size_t i = 0; i < frame; ++i)
      buf[i] = x[start + i] * (0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (frame - 1.0)));
    const auto power = naive_power_spectrum(buf);
    std::vector<double> logmel(static_cast<std::size_t>(p.n_mels));
    for (int m = 0; m < p.n_mels; ++m) {
      const double l = inv(m_lo + (m_hi - m_lo) * m / (p.n_mels + 1.0));
      const double c = inv(m_lo + (m_hi - m_lo) * (m + 1) / (p.n_mels + 1.0));
      const double r = inv(m_lo + (m_hi - m_lo) * (m + 2) / (p.n_mels + 1.0));
      double e = 0.0;
      for (std::size_t k = 0; k < bins; ++k) {
        const double f = static_cast<double>(k) * rate / static_cast<double>(n_fft);
        if (f > l && f <= c) e += power[k] * (f - l) / (c - l);
        if (f > c && f < r) e += power[k] * (r - f) / (r - c);
      }
      logmel[static_cast<std::size_t>(m)] = std::log(e + p.floor);
    }
    for (int k = 0; k < p.n_coeffs; ++k) {
      double acc = 0.0;
      for (int m = 0; m < p.n_mels; ++m)
        acc += logmel[static_cast<std::size_t>(m)] * std::cos(std::numbers::pi * k * (2.0 * m + 1.0) / (2.0 * p.n_mels));
      sum[static_cast<std::size_t>(k)] += acc * (k == 0 ? std::sqrt(1.0 / p.n_mels) : std::sqrt(2.0 / p.n_mels));
    }
  }
  for (double& v : sum) v /= static_cast<double>(frames);
  return sum;
}

inline std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(gen);
  return v;
}

// Central differences of f at w, one coordinate at a time.
template <class F>
std::vector<double> central_difference(F&& f, const std::vector<double>& w, double h = 1e-6) {
  std::vector<double> g(w.size());
  std::vector<double> probe(w);
  for (std::size_t i = 0; i < w.size(); ++i) {
    probe[i] = w[i] + h;
    const double up = f(probe);
    probe[i] = w[i] - h;
    const double down = f(probe);
    probe[i] = w[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Brute-force counts with +1 as the positive class: {tp, fp, tn, fn}.
inline std::array<std::size_t, 4> count_confusion(const std::vector<int>& pred, const std::vector<int>& label) {
  std::array<std::size_t, 4> c{};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == 1 && label[i] == 1) ++c[0];
    if (pred[i] == 1 && label[i] == -1) ++c[1];
    if (pred[i] == -1 && label[i] == -1) ++c[2];
    if (pred[i] == -1 && label[i] == 1) ++c[3];
  }
  return c;
}

// 200 x 10 uniform features; the label is the sign of feature 3 only.
struct Informative {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
};

inline Informative informative_feature_3(std::uint64_t seed, std::size_t n = 200, std::size_t d = 10) {
  std::mt19937_64 gen(seed);
  Informative out;
  for (std::size_t i = 0; i < n; ++i) {
    out.x.push_back(random_vector(gen, d));
    out.y.push_back(out.x.back()[3] >= 0.0 ? 1 : -1);
  }
  return out;
}

}  // namespace oracle

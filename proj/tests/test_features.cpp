#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cryfl/error.hpp"
#include "cryfl/features.hpp"
#include "oracles.hpp"

using namespace cryfl;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected cryfl::Error");
  return Errc::IoError;
}

}  // namespace

TEST_CASE("frame_and_window") {
  SUBCASE("one second gives 98 frames of 400") {
    const Matrix frames = frame_and_window(AudioClip{std::vector<double>(16000, 0.1), 16000});
    CHECK(frames.size() == (16000 - 400) / 160 + 1);
    CHECK(frames.size() == 98);
    for (const auto& f : frames) CHECK(f.size() == 400);
  }
  SUBCASE("ones reproduce the Hamming window") {
    const Matrix frames = frame_and_window(AudioClip{std::vector<double>(800, 1.0), 16000});
    for (std::size_t i = 0; i < 400; ++i)
      CHECK(frames[0][i] == doctest::Approx(0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / 399.0)).epsilon(1e-14));
  }
  SUBCASE("exactly one frame") { CHECK(frame_and_window(AudioClip{std::vector<double>(400, 0.2), 16000}).size() == 1); }
  SUBCASE("too short") {
    CHECK(code_of([] { frame_and_window(AudioClip{std::vector<double>(399, 0.2), 16000}); }) == Errc::SignalTooShort);
  }
}

TEST_CASE("power_spectrum") {
  SUBCASE("zero frame") {
    for (double v : power_spectrum(std::vector<double>(400, 0.0))) CHECK(v == 0.0);
  }
  SUBCASE("impulse is flat") {
    std::vector<double> frame(64, 0.0);
    frame[0] = 1.0;
    const auto p = power_spectrum(frame);
    CHECK(p.size() == 33);
    for (double v : p) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("naive DFT oracle") {
    std::mt19937_64 gen(8);
    for (std::size_t len : {64u, 400u, 100u}) {
      const auto frame = oracle::random_vector(gen, len);
      const auto got = power_spectrum(frame);
      const auto want = oracle::naive_power_spectrum(frame);
      REQUIRE(got.size() == want.size());
      double peak = 0.0;
      for (double w : want) peak = std::max(peak, w);
      for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - want[k]) <= 1e-9 * peak);
    }
  }
}

TEST_CASE("mel filterbank") {
  const MfccConfig cfg;
  const Matrix fb = mel_filterbank(cfg, 16000, 257);
  REQUIRE(fb.size() == 40);

  for (const auto& row : fb) {
    REQUIRE(row.size() == 257);
    double sum = 0.0;
    std::size_t first = row.size(), last = 0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      CHECK(row[k] >= 0.0);
      sum += row[k];
      if (row[k] > 0.0) {
        first = std::min(first, k);
        last = k;
      }
    }
    CHECK(sum > 0.0);
    for (std::size_t k = first; k <= last; ++k) CHECK(row[k] > 0.0);  // contiguous support
  }

  const auto centers = mel_centers_hz(cfg);
  for (std::size_t i = 1; i < centers.size(); ++i) CHECK(centers[i] > centers[i - 1]);

  // Hand evaluation of the mel formulas for the first center.
  const double mel_lo = 2595.0 * std::log10(1.0 + 20.0 / 700.0);
  const double mel_hi = 2595.0 * std::log10(1.0 + 7600.0 / 700.0);
  const double c0 = 700.0 * (std::pow(10.0, (mel_lo + (mel_hi - mel_lo) / 41.0) / 2595.0) - 1.0);
  const double bin_hz = 16000.0 / 512.0;
  CHECK(std::abs(centers[0] - c0) <= bin_hz);
  std::size_t peak = 0;
  for (std::size_t k = 0; k < 257; ++k)
    if (fb[0][k] > fb[0][peak]) peak = k;
  CHECK(std::abs(peak * bin_hz - c0) <= bin_hz);

  CHECK(hz_to_mel(mel_to_hz(1234.5)) == doctest::Approx(1234.5).epsilon(1e-12));

  MfccConfig bad;
  bad.fmax_hz = 9000.0;
  CHECK(code_of([&] { mel_filterbank(bad, 16000, 257); }) == Errc::InvalidConfig);
}

TEST_CASE("dct_ii") {
  const std::vector<double> constant(40, -3.25);
  const auto c = dct_ii(constant, 40);
  CHECK(c[0] == doctest::Approx(-3.25 * std::sqrt(40.0)).epsilon(1e-12));
  for (std::size_t k = 1; k < c.size(); ++k) CHECK(std::abs(c[k]) <= 1e-12);

  // Orthonormal: energy is preserved when all coefficients are kept.
  std::mt19937_64 gen(2);
  const auto x = oracle::random_vector(gen, 40);
  const auto y = dct_ii(x, 40);
  double ex = 0, ey = 0;
  for (std::size_t i = 0; i < 40; ++i) {
    ex += x[i] * x[i];
    ey += y[i] * y[i];
  }
  CHECK(ey == doctest::Approx(ex).epsilon(1e-12));
}

TEST_CASE("mfcc") {
  SUBCASE("silence equals a single frame") {
    const AudioClip silence{std::vector<double>(16000, 0.0), 16000};
    const auto pooled = mfcc(silence);
    const auto frames = mfcc_frames(silence);
    REQUIRE(pooled.size() == 40);
    for (std::size_t k = 0; k < 40; ++k) CHECK(pooled[k] == doctest::Approx(frames[0][k]).epsilon(1e-12));
  }
  SUBCASE("440 Hz sine matches the straight-line reference") {
    AudioClip tone{std::vector<double>(16000), 16000};
    for (std::size_t i = 0; i < tone.samples.size(); ++i)
      tone.samples[i] = std::sin(2.0 * std::numbers::pi * 440.0 * i / 16000.0);
    const auto got = mfcc(tone);
    const auto want = oracle::reference_mfcc(tone.samples, 16000);
    for (std::size_t k = 0; k < 40; ++k) CHECK(std::abs(got[k] - want[k]) <= 1e-6);
  }
  SUBCASE("short clips are zero-padded") {
    std::mt19937_64 gen(4);
    const AudioClip half{oracle::random_vector(gen, 8000), 16000};
    AudioClip padded = half;
    padded.samples.resize(16000, 0.0);
    CHECK(mfcc(half) == mfcc(padded));
  }
  SUBCASE("overlong clips are rejected") {
    CHECK(code_of([] { mfcc(AudioClip{std::vector<double>(18000, 0.1), 16000}); }) == Errc::InvalidConfig);
  }
}

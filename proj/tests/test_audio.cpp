#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cryfl/audio.hpp"
#include "cryfl/error.hpp"
#include "oracles.hpp"

using namespace cryfl;

namespace {

AudioClip sine(double hz, double seconds, int rate, double amp = 1.0) {
  AudioClip c{{}, rate};
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate));
  for (std::size_t i = 0; i < n; ++i) c.samples.push_back(amp * std::sin(2.0 * std::numbers::pi * hz * i / rate));
  return c;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected cryfl::Error");
  return Errc::IoError;
}

double rms(const std::vector<double>& x, std::size_t b, std::size_t e) {
  double acc = 0.0;
  for (std::size_t i = b; i < e; ++i) acc += x[i] * x[i];
  return std::sqrt(acc / static_cast<double>(e - b));
}

}  // namespace

TEST_CASE("resample") {
  SUBCASE("same rate is the identity") {
    const AudioClip c{{0.1, -0.2, 0.3, 0.4}, 16000};
    CHECK(resample(c, 16000).samples == c.samples);
  }
  SUBCASE("constant doubles in length") {
    const AudioClip c{std::vector<double>(800, 0.5), 8000};
    const AudioClip r = resample(c, 16000);
    CHECK(r.sample_rate_hz == 16000);
    CHECK(r.samples.size() == 1600);
    for (double v : r.samples) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("100 Hz sine correlates with direct synthesis") {
    const AudioClip r = resample(sine(100.0, 1.0, 8000), 16000);
    CHECK(correlation(r.samples, sine(100.0, 1.0, 16000).samples) >= 0.999);
  }
  SUBCASE("empty clip") { CHECK(code_of([] { resample(AudioClip{{}, 8000}, 16000); }) == Errc::EmptySignal); }
}

TEST_CASE("butterworth band-pass design") {
  const FilterSpec spec{100.0, 4000.0, 4};
  const auto sections = design_butterworth_bandpass(spec, 16000);
  const auto db = [&](double f) { return 20.0 * std::log10(cascade_magnitude(sections, f, 16000)); };

  CHECK(max_pole_radius(sections) < 1.0);
  CHECK(db(0.0) < -60.0);
  CHECK(std::abs(db(std::sqrt(100.0 * 4000.0))) <= 1.0);
  CHECK(db(50.0) <= -20.0);

  // The digital cascade tracks the analytic prototype magnitude.
  for (double f : {30.0, 50.0, 80.0, 150.0, 632.0, 2000.0, 3500.0, 5000.0, 7000.0})
    CHECK(db(f) == doctest::Approx(oracle::butterworth_bandpass_db(f, 100.0, 4000.0, 4, 16000)).epsilon(1e-6));

  for (int order : {2, 6, 8}) CHECK(max_pole_radius(design_butterworth_bandpass({300.0, 3000.0, order}, 16000)) < 1.0);

  CHECK(code_of([] { design_butterworth_bandpass({100.0, 8000.0, 4}, 16000); }) == Errc::InvalidFilterSpec);
  CHECK(code_of([] { design_butterworth_bandpass({500.0, 400.0, 4}, 16000); }) == Errc::InvalidFilterSpec);
}

TEST_CASE("apply_filter") {
  const auto sections = design_butterworth_bandpass({}, 16000);
  std::mt19937_64 gen(11);
  const auto x = oracle::random_vector(gen, 2000);
  const auto y = oracle::random_vector(gen, 2000);

  SUBCASE("zero in, zero out") {
    for (double v : apply_filter(AudioClip{std::vector<double>(500, 0.0), 16000}, sections).samples) CHECK(v == 0.0);
  }
  SUBCASE("linearity") {
    const double a = 0.7, b = -1.3;
    AudioClip mix{std::vector<double>(x.size()), 16000};
    for (std::size_t i = 0; i < x.size(); ++i) mix.samples[i] = a * x[i] + b * y[i];
    const auto fx = apply_filter({x, 16000}, sections).samples;
    const auto fy = apply_filter({y, 16000}, sections).samples;
    const auto fm = apply_filter(mix, sections).samples;
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(fm[i] - (a * fx[i] + b * fy[i])) <= 1e-10);

    AudioClip scaled{x, 16000};
    for (double& v : scaled.samples) v *= 3.0;
    const auto fs = apply_filter(scaled, sections).samples;
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(fs[i] - 3.0 * fx[i]) <= 1e-12);
  }
  SUBCASE("identity section passes an impulse") {
    const std::vector<SecondOrderSection> identity{SecondOrderSection{}};
    const AudioClip impulse{{1.0, 0.0, 0.0, 0.0}, 16000};
    CHECK(apply_filter(impulse, identity).samples == impulse.samples);
  }
}

TEST_CASE("voice activity detection") {
  SUBCASE("silence has no segments") {
    CHECK(detect_voice_activity(AudioClip{std::vector<double>(16000, 0.0), 16000}).empty());
  }
  SUBCASE("tone between silences") {
    AudioClip c{std::vector<double>(16000, 0.0), 16000};
    const auto tone = sine(440.0, 1.0, 16000).samples;
    c.samples.insert(c.samples.end(), tone.begin(), tone.end());
    c.samples.resize(48000, 0.0);

    // Frame-by-frame RMS oracle for the active range.
    const std::size_t frame = 480;
    const double threshold = rms(c.samples, 0, c.samples.size()) * std::pow(10.0, -20.0 / 20.0);
    std::size_t first = SIZE_MAX, last = 0;
    for (std::size_t f = 0; f * frame < c.samples.size(); ++f) {
      if (rms(c.samples, f * frame, std::min(c.samples.size(), (f + 1) * frame)) > threshold) {
        first = std::min(first, f);
        last = f;
      }
    }
    REQUIRE(first != SIZE_MAX);

    VadConfig cfg;
    cfg.energy_threshold_db = -20.0;
    cfg.hangover_frames = 0;
    auto segs = detect_voice_activity(c, cfg);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].start == first * frame);
    CHECK(segs[0].end == (last + 1) * frame);
    const auto within = [&](std::size_t got, std::size_t want, std::size_t frames) {
      return (got > want ? got - want : want - got) <= frames * frame;
    };
    CHECK(within(segs[0].start, 16000, 2));
    CHECK(within(segs[0].end, 32000, 2));

    // The default hangover only extends the end.
    cfg.hangover_frames = 3;
    segs = detect_voice_activity(c, cfg);
    REQUIRE(segs.size() == 1);
    CHECK(within(segs[0].start, 16000, 2));
    CHECK(within(segs[0].end, 32000, 2 + 3));
  }
  SUBCASE("continuous tone spans the clip") {
    const AudioClip c = sine(300.0, 1.0, 16000);
    const auto segs = detect_voice_activity(c);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0] == Segment{0, c.samples.size()});
  }
  SUBCASE("segments are sorted, disjoint and in bounds") {
    std::mt19937_64 gen(5);
    AudioClip c{{}, 16000};
    for (int burst = 0; burst < 8; ++burst) {
      const auto noise = oracle::random_vector(gen, 3000 + 500 * burst);
      c.samples.insert(c.samples.end(), noise.begin(), noise.end());
      c.samples.insert(c.samples.end(), 4000 + 300 * burst, 0.0);
    }
    const auto segs = detect_voice_activity(c);
    REQUIRE(!segs.empty());
    for (std::size_t i = 0; i < segs.size(); ++i) {
      CHECK(segs[i].start < segs[i].end);
      CHECK(segs[i].end <= c.samples.size());
      if (i > 0) CHECK(segs[i - 1].end < segs[i].start);
    }
  }
  SUBCASE("shorter than one frame") {
    CHECK(code_of([] { detect_voice_activity(AudioClip{std::vector<double>(100, 0.1), 16000}); }) ==
          Errc::SignalTooShort);
  }
}

TEST_CASE("tanh distortion") {
  CHECK(tanh_distortion(AudioClip{{0.0}, 16000}, 3.0).samples[0] == 0.0);
  CHECK(tanh_distortion(AudioClip{{0.5}, 16000}, 4.0).samples[0] == doctest::Approx(oracle::tanh_exp(2.0)).epsilon(1e-15));
  CHECK(oracle::tanh_exp(2.0) == doctest::Approx(0.96402758).epsilon(1e-8));

  std::mt19937_64 gen(3);
  const auto x = oracle::random_vector(gen, 1000, -2.0, 2.0);
  std::vector<double> neg(x);
  for (double& v : neg) v = -v;
  const auto fx = tanh_distortion({x, 16000}, 5.0).samples;
  const auto fn = tanh_distortion({neg, 16000}, 5.0).samples;
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(fn[i] == -fx[i]);
    CHECK(std::abs(fx[i]) <= 1.0);
  }

  // Strictly increasing on a grid away from saturation.
  std::vector<double> grid;
  for (int i = -50; i <= 50; ++i) grid.push_back(i * 0.01);
  const auto fg = tanh_distortion({grid, 16000}, 2.0).samples;
  for (std::size_t i = 1; i < fg.size(); ++i) CHECK(fg[i] > fg[i - 1]);

  CHECK(code_of([] { tanh_distortion(AudioClip{{0.1}, 16000}, 0.0); }) == Errc::InvalidGain);
  CHECK(code_of([] { tanh_distortion(AudioClip{{0.1}, 16000}, -1.0); }) == Errc::InvalidGain);
}

TEST_CASE("prepare_rir") {
  SUBCASE("single impulse") {
    const RirFilter r = prepare_rir(AudioClip{{0.0, 0.0, 1.0, 0.0}, 16000});
    CHECK(r.taps == std::vector<double>{1.0, 0.0});
    CHECK(r.normalized_power);
  }
  SUBCASE("scaling is removed") {
    const RirFilter r = prepare_rir(AudioClip{{0.0, 2.0, 0.0}, 16000});
    CHECK(r.taps == std::vector<double>{1.0, 0.0});
  }
  SUBCASE("decaying noise has unit power") {
    const AudioClip raw = synthesize_rir(0.2, 0.15, 99);
    double power = 0.0;
    for (double t : prepare_rir(raw).taps) power += t * t;
    CHECK(std::abs(power - 1.0) <= 1e-9);
  }
  SUBCASE("all zero") {
    CHECK(code_of([] { prepare_rir(AudioClip{{0.0, 0.0}, 16000}); }) == Errc::DegenerateRir);
  }
}

TEST_CASE("convolve_rir") {
  std::mt19937_64 gen(21);
  const AudioClip x{oracle::random_vector(gen, 32), 16000};
  SUBCASE("unit impulse is the identity") {
    CHECK(convolve_rir(x, RirFilter{{1.0}, 16000, true}).samples == x.samples);
  }
  SUBCASE("delayed impulse shifts") {
    const auto y = convolve_rir(x, RirFilter{{0.0, 0.0, 1.0}, 16000, true}).samples;
    REQUIRE(y.size() == x.samples.size());
    CHECK(y[0] == 0.0);
    CHECK(y[1] == 0.0);
    for (std::size_t i = 2; i < y.size(); ++i) CHECK(y[i] == x.samples[i - 2]);
  }
  SUBCASE("nested-loop oracle, short and long") {
    for (auto [n, m] : {std::pair<std::size_t, std::size_t>{32, 8}, {5000, 700}}) {
      const auto xs = oracle::random_vector(gen, n);
      const auto h = oracle::random_vector(gen, m, -0.1, 0.1);
      const auto got = convolve_truncated(xs, h);
      const auto want = oracle::brute_convolve(xs, h);
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(got[i] - want[i]));
      CHECK(err <= 1e-12);
    }
  }
  SUBCASE("rate mismatch") {
    CHECK(code_of([&] { convolve_rir(x, RirFilter{{1.0}, 8000, true}); }) == Errc::RateMismatch);
  }
}

TEST_CASE("synthesize_rir") {
  const AudioClip a = synthesize_rir(0.6, 0.3, 42);
  CHECK(a.samples == synthesize_rir(0.6, 0.3, 42).samples);
  CHECK(a.samples != synthesize_rir(0.6, 0.3, 43).samples);
  CHECK(a.samples.size() == 9600);
  CHECK(a.samples[0] == 1.0);

  // Analytic envelope: second-half RMS / first-half RMS = exp(-6.9 * 0.3 / 0.3).
  const double first = rms(a.samples, 1, 4800), second = rms(a.samples, 4800, 9600);
  CHECK(second < first);
  const double ratio = second / first, expected = std::exp(-6.9);
  CHECK(ratio >= expected / 2.0);
  CHECK(ratio <= expected * 2.0);
}

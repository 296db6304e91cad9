#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "sfm/errors.hpp"
#include "sfm/rng.hpp"
#include "sfm/signal.hpp"
#include "sfm/stft.hpp"
#include "sfm/wav_io.hpp"
#include "sfm/waveform.hpp"
#include "test_util.hpp"

using namespace sfm;

namespace {

Waveform sine(double freq, double seconds, int rate = 16000, double amp = 0.5) {
  Waveform w;
  w.sample_rate = rate;
  const auto n = static_cast<std::size_t>(seconds * rate);
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    w.samples[i] =
        amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate);
  return w;
}

double rel_l2(const Waveform& a, const Waveform& b) {
  REQUIRE(a.samples.size() == b.samples.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    num += (a.samples[i] - b.samples[i]) * (a.samples[i] - b.samples[i]);
    den += a.samples[i] * a.samples[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("synth_clean is deterministic and seed-sensitive") {
  const Waveform a = synth_clean("harmonic", 1.0, 7);
  const Waveform b = synth_clean("harmonic", 1.0, 7);
  CHECK(a.samples == b.samples);  // bit-identical
  CHECK(a.samples.size() == 16000);
  CHECK(a.peak() <= 1.0);

  const Waveform c = synth_clean("harmonic", 1.0, 8);
  CHECK(a.samples != c.samples);
}

TEST_CASE("synth_clean kinds and errors") {
  for (const char* kind : {"harmonic", "vowel", "chime"}) {
    const Waveform w = synth_clean(kind, 0.5, 3);
    CHECK(w.samples.size() == 8000);
    CHECK(w.peak() <= 1.0);
    CHECK(w.rms() > 0.0);
  }
  CHECK_THROWS_AS(synth_clean("whalesong", 1.0, 0), ConfigError);
  CHECK_THROWS_AS(synth_clean("harmonic", 0.0, 0), ContractError);
}

TEST_CASE("mix hits the requested RMS SNR exactly") {
  const Waveform clean = synth_clean("harmonic", 1.0, 11);

  SUBCASE("snr 0 dB equalizes RMS") {
    auto [noisy, noise] = mix(clean, {0.0, NoiseKind::kWhite, 5});
    const double ratio_db = 20.0 * std::log10(clean.rms() / noise.rms());
    CHECK(std::abs(ratio_db) < 0.01);
  }
  SUBCASE("snr 10 dB, recomputed from returned components") {
    auto [noisy, noise] = mix(clean, {10.0, NoiseKind::kWhite, 5});
    for (std::size_t i = 0; i < clean.samples.size(); ++i)
      CHECK(noisy.samples[i] == clean.samples[i] + noise.samples[i]);
    const double ratio_db = 20.0 * std::log10(clean.rms() / noise.rms());
    CHECK(ratio_db == doctest::Approx(10.0).epsilon(1e-6));
  }
  SUBCASE("non-finite snr rejected") {
    CHECK_THROWS_AS(
        mix(clean, {std::numeric_limits<double>::infinity(), NoiseKind::kWhite, 5}),
        DomainError);
  }
  SUBCASE("silent clean rejected") {
    Waveform silent;
    silent.samples.assign(100, 0.0);
    CHECK_THROWS_AS(mix(silent, {0.0, NoiseKind::kWhite, 5}), DomainError);
  }
}

TEST_CASE("mix SNR holds for all noise kinds over random draws") {
  Rng rng(99);
  const Waveform clean = synth_clean("vowel", 0.5, 17);
  for (NoiseKind kind :
       {NoiseKind::kWhite, NoiseKind::kPink, NoiseKind::kHarmonicBabble}) {
    for (int i = 0; i < 34; ++i) {
      const double snr = rng.uniform(-5.0, 20.0);
      auto [noisy, noise] = mix(clean, {snr, kind, rng.next_u64()});
      const double got = 20.0 * std::log10(clean.rms() / noise.rms());
      CHECK(std::abs(got - snr) < 0.01);
    }
  }
}

TEST_CASE("stft/istft round-trip across the config matrix") {
  const Waveform w = sine(440.0, 1.0);
  for (const StftConfig cfg :
       {StftConfig{256, 128, WindowKind::kHann},
        StftConfig{256, 64, WindowKind::kHann},
        StftConfig{512, 256, WindowKind::kHann},
        StftConfig{128, 128, WindowKind::kRect},
        StftConfig{64, 16, WindowKind::kHann}}) {
    const ComplexSpectrogram s = stft(w, cfg);
    CHECK(s.freq_bins() == cfg.fft_size / 2 + 1);
    const Waveform back = istft(s);
    CHECK(rel_l2(w, back) < 1e-6);
  }
}

TEST_CASE("round-trip on short and awkward lengths") {
  Rng rng(4);
  const StftConfig cfg{256, 128, WindowKind::kHann};
  for (std::size_t len : {1u, 2u, 100u, 255u, 256u, 257u, 1000u}) {
    Waveform w;
    w.samples.resize(len);
    for (auto& s : w.samples) s = rng.uniform(-0.5, 0.5);
    const Waveform back = istft(stft(w, cfg));
    REQUIRE(back.samples.size() == len);
    for (std::size_t i = 0; i < len; ++i)
      CHECK(back.samples[i] == doctest::Approx(w.samples[i]).epsilon(1e-9));
  }
}

TEST_CASE("stft rejects non-reconstructible configs") {
  // Hann at hop == fft_size has zero-coverage gaps.
  CHECK_THROWS_AS(validate_config(StftConfig{256, 256, WindowKind::kHann}),
                  ConfigError);
  CHECK_THROWS_AS(validate_config(StftConfig{100, 50, WindowKind::kHann}),
                  ConfigError);  // not a power of two
  CHECK_THROWS_AS(validate_config(StftConfig{256, 0, WindowKind::kHann}),
                  ConfigError);
  CHECK_THROWS_AS(validate_config(StftConfig{256, 300, WindowKind::kHann}),
                  ConfigError);
}

TEST_CASE("stft is linear") {
  const StftConfig cfg{256, 128, WindowKind::kHann};
  const Waveform x = sine(300.0, 0.25);
  const Waveform y = sine(1234.5, 0.25, 16000, 0.3);

  SUBCASE("all-zero maps to all-zero") {
    Waveform z;
    z.samples.assign(4000, 0.0);
    CHECK(stft(z, cfg).bins.cwiseAbs().maxCofficient_placeholder == 0.0);
  }
  SUBCASE("scaling and superposition") {
    Waveform combo;
    combo.samples.resize(x.samples.size());
    for (std::size_t i = 0; i < combo.samples.size(); ++i)
      combo.samples[i] = 2.0 * x.samples[i] - 0.5 * y.samples[i];
    const auto sx = stft(x, cfg), sy = stft(y, cfg), sc = stft(combo, cfg);
    const Eigen::MatrixXcd expect = 2.0 * sx.bins - 0.5 * sy.bins;
    const double denom = expect.norm();
    CHECK((sc.bins - expect).norm() / denom < 1e-10);
  }
  SUBCASE("doubling the waveform doubles the spectrogram exactly") {
    Waveform x2 = x;
    for (auto& s : x2.samples) s *= 2.0;
    const auto s1 = stft(x, cfg), s2 = stft(x2, cfg);
    CHECK(s2.bins == 2.0 * s1.bins);
  }
}

TEST_CASE("chunk partitions and reassembles exactly") {
  SUBCASE("documented example: 10 samples in chunks of 4") {
    Waveform w;
    w.samples = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const auto chunks = chunk(w, 4);
    REQUIRE(chunks.size() == 3);
    for (const auto& c : chunks) CHECK(c.samples.size() == 4);
    CHECK(chunks[2].samples == std::vector<double>{9, 10, 0, 0});
    const Waveform back = reassemble(chunks, w.samples.size());
    CHECK(back.samples == w.samples);
  }
  SUBCASE("exact fit is the identity") {
    Waveform w;
    w.samples = {1, 2, 3, 4};
    const auto chunks = chunk(w, 4);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].samples == w.samples);
  }
  SUBCASE("empty waveform rejected") {
    Waveform w;
    CHECK_THROWS_AS(chunk(w, 4), ContractError);
    CHECK_THROWS_AS(chunk(Waveform{{1.0}, 16000}, 0), ContractError);
  }
  SUBCASE("identity property over lengths and chunk sizes") {
    Rng rng(12);
    for (std::size_t chunk_len : {16u, 160u, 4096u}) {
      for (std::size_t len = 1; len <= 1000; len += 13) {
        Waveform w;
        w.samples.resize(len);
        for (auto& s : w.samples) s = rng.uniform(-1.0, 1.0);
        const Waveform back = reassemble(chunk(w, chunk_len), len);
        CHECK(back.samples == w.samples);
      }
    }
  }
}

TEST_CASE("wav io round-trips and rejects what it should") {
  test::TempDir dir("wav");
  const Waveform w = synth_clean("harmonic", 0.25, 5);

  SUBCASE("float32 round-trip") {
    write_wav(dir.path / "f.wav", w, WavFormat::kFloat32);
    const Waveform back = read_wav(dir.path / "f.wav");
    REQUIRE(back.samples.size() == w.samples.size());
    for (std::size_t i = 0; i < w.samples.size(); ++i)
      CHECK(back.samples[i] ==
            doctest::Approx(w.samples[i]).epsilon(1e-7));
  }
  SUBCASE("pcm16 round-trip within quantization") {
    write_wav(dir.path / "p.wav", w, WavFormat::kPcm16);
    const Waveform back = read_wav(dir.path / "p.wav");
    for (std::size_t i = 0; i < w.samples.size(); ++i)
      CHECK(std::abs(back.samples[i] - w.samples[i]) <= 1.0 / 32768.0);
  }
  SUBCASE("wrong rate rejected") {
    Waveform w8 = w;
    w8.sample_rate = 8000;
    write_wav(dir.path / "r8.wav", w8);
    CHECK_THROWS_AS(read_wav(dir.path / "r8.wav"), IoError);
  }
  SUBCASE("garbage rejected") {
    std::ofstream(dir.path / "x.wav") << "definitely not audio";
    CHECK_THROWS_AS(read_wav(dir.path / "x.wav"), IoError);
  }
}

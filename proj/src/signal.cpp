#include "sfm/signal.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "sfm/errors.hpp"
#include "sfm/rng.hpp"
#include "sfm/stft.hpp"

namespace sfm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void normalize_peak(Waveform& w, double target) {
  const double p = w.peak();
  if (p > 0.0) {
    const double g = target / p;
    for (double& s : w.samples) s *= g;
  }
}

void normalize_rms(Waveform& w, double target) {
  const double r = w.rms();
  if (r > 0.0) {
    const double g = target / r;
    for (double& s : w.samples) s *= g;
  }
}

// One modulated harmonic stack. Partial amplitudes fall off as 1/p^rolloff;
// vibrato is applied through incremental phase so frequency modulation stays
// exact at any rate.
Waveform harmonic_stack(std::size_t n, int rate, Rng& rng, int partials,
                        double f0_lo, double f0_hi) {
  const double f0 = rng.uniform(f0_lo, f0_hi);
  const double rolloff = rng.uniform(0.7, 1.4);
  const double vib_rate = rng.uniform(4.0, 7.0);
  const double vib_depth = rng.uniform(0.005, 0.02);
  const double am_rate = rng.uniform(1.5, 4.0);
  const double am_depth = rng.uniform(0.3, 0.8);
  const double vib_phase = rng.uniform(0.0, kTwoPi);
  const double am_phase = rng.uniform(0.0, kTwoPi);
  std::vector<double> partial_phase(static_cast<std::size_t>(partials));
  std::vector<double> partial_gain(static_cast<std::size_t>(partials));
  for (int p = 0; p < partials; ++p) {
    partial_phase[static_cast<std::size_t>(p)] = rng.uniform(0.0, kTwoPi);
    partial_gain[static_cast<std::size_t>(p)] =
        std::pow(p + 1.0, -rolloff) * rng.uniform(0.6, 1.0);
  }

  Waveform w;
  w.sample_rate = rate;
  w.samples.assign(n, 0.0);
  const double dt = 1.0 / rate;
  double phase = 0.0;  // fundamental phase, radians
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double inst_f0 =
        f0 * (1.0 + vib_depth * std::sin(kTwoPi * vib_rate * t + vib_phase));
    phase += kTwoPi * inst_f0 * dt;
    const double env =
        0.5 * (1.0 + am_depth * std::sin(kTwoPi * am_rate * t + am_phase));
    double s = 0.0;
    for (int p = 0; p < partials; ++p) {
      const double f = inst_f0 * (p + 1);
      if (f >= 0.45 * rate) break;  // keep clear of Nyquist
      s += partial_gain[static_cast<std::size_t>(p)] *
           std::sin((p + 1) * phase + partial_phase[static_cast<std::size_t>(p)]);
    }
    w.samples[i] = env * s;
  }
  return w;
}

// Harmonic stack colored by two formant-like resonance peaks, applied in the
// frequency domain over the whole signal.
Waveform synth_vowel(std::size_t n, int rate, Rng& rng) {
  Waveform w = harmonic_stack(n, rate, rng, 24, 100.0, 220.0);
  const double r1 = rng.uniform(350.0, 700.0);
  const double r2 = rng.uniform(1200.0, 2400.0);
  std::size_t m = 1;
  while (m < n) m <<= 1;
  std::vector<std::complex<double>> buf(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) buf[i] = w.samples[i];
  fft_radix2(buf, false);
  for (std::size_t k = 0; k <= m / 2; ++k) {
    const double f = static_cast<double>(k) * rate / static_cast<double>(m);
    const double g1 = 1.0 / (1.0 + std::pow((f - r1) / (r1 * 0.5), 2.0));
    const double g2 = 0.7 / (1.0 + std::pow((f - r2) / (r2 * 0.3), 2.0));
    buf[k] *= 0.15 + g1 + g2;
    if (k > 0 && k < m / 2) buf[m - k] = std::conj(buf[k]);
  }
  fft_radix2(buf, true);
  for (std::size_t i = 0; i < n; ++i) w.samples[i] = buf[i].real();
  return w;
}

Waveform synth_chime(std::size_t n, int rate, Rng& rng) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.assign(n, 0.0);
  const int strikes = 3 + static_cast<int>(rng.uniform_int(0, 2));
  const double base = rng.uniform(220.0, 440.0);
  for (int s = 0; s < strikes; ++s) {
    const double t0 = rng.uniform(0.0, 0.6) * static_cast<double>(n) / rate;
    const double decay = rng.uniform(2.0, 6.0);
    for (int p = 0; p < 6; ++p) {
      const double f = base * (p + 1) * (1.0 + rng.uniform(-0.004, 0.004));
      if (f >= 0.45 * rate) break;
      const double amp = std::pow(p + 1.0, -0.9);
      const double ph = rng.uniform(0.0, kTwoPi);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate - t0;
        if (t < 0.0) continue;
        w.samples[i] += amp * std::exp(-decay * t) * std::sin(kTwoPi * f * t + ph);
      }
    }
  }
  return w;
}

Waveform white_noise(std::size_t n, int rate, Rng& rng) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(n);
  std::size_t i = 0;
  while (i + 1 < n) {
    auto [a, b] = rng.normal_pair();
    w.samples[i++] = a;
    w.samples[i++] = b;
  }
  if (i < n) w.samples[i] = rng.normal();
  return w;
}

// 1/sqrt(f) spectral shaping of white noise, clamped below 1 Hz.
Waveform pink_noise(std::size_t n, int rate, Rng& rng) {
  Waveform w = white_noise(n, rate, rng);
  std::size_t m = 1;
  while (m < n) m <<= 1;
  std::vector<std::complex<double>> buf(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) buf[i] = w.samples[i];
  fft_radix2(buf, false);
  for (std::size_t k = 0; k <= m / 2; ++k) {
    const double f = static_cast<double>(k) * rate / static_cast<double>(m);
    const double g = 1.0 / std::sqrt(std::max(f, 1.0));
    buf[k] *= g;
    if (k > 0 && k < m / 2) buf[m - k] = std::conj(buf[k]);
  }
  fft_radix2(buf, true);
  for (std::size_t i = 0; i < n; ++i) w.samples[i] = buf[i].real();
  return w;
}

Waveform babble_noise(std::size_t n, int rate, Rng& rng) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.assign(n, 0.0);
  const int voices = 5;
  for (int v = 0; v < voices; ++v) {
    Rng sub = rng.child(static_cast<std::uint64_t>(v) + 101);
    Waveform voice = harmonic_stack(n, rate, sub, 12, 80.0, 320.0);
    normalize_rms(voice, 1.0);
    for (std::size_t i = 0; i < n; ++i) w.samples[i] += voice.samples[i];
  }
  return w;
}

}  // namespace

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "white") return NoiseKind::kWhite;
  if (name == "pink") return NoiseKind::kPink;
  if (name == "harmonic-babble") return NoiseKind::kHarmonicBabble;
  throw ConfigError("unknown noise kind: '" + name +
                    "' (expected white|pink|harmonic-babble)");
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kWhite: return "white";
    case NoiseKind::kPink: return "pink";
    case NoiseKind::kHarmonicBabble: return "harmonic-babble";
  }
  return "?";
}

Waveform synth_clean(const std::string& kind, double duration_seconds,
                     std::uint64_t seed, int sample_rate) {
  if (!(duration_seconds > 0.0)) throw ContractError("duration must be positive");
  if (sample_rate <= 0) throw ContractError("sample rate must be positive");
  const std::size_t n =
      static_cast<std::size_t>(std::llround(duration_seconds * sample_rate));
  if (n == 0) throw ContractError("duration too short for one sample");
  Rng rng(seed);
  Waveform w;
  if (kind == "harmonic") {
    w = harmonic_stack(n, sample_rate, rng, 16, 90.0, 300.0);
  } else if (kind == "vowel") {
    w = synth_vowel(n, sample_rate, rng);
  } else if (kind == "chime") {
    w = synth_chime(n, sample_rate, rng);
  } else {
    throw ConfigError("unknown clean-signal kind: '" + kind +
                      "' (expected harmonic|vowel|chime)");
  }
  normalize_peak(w, 0.7);
  return w;
}

Waveform synth_noise(NoiseKind kind, std::size_t num_samples,
                     std::uint64_t seed, int sample_rate) {
  if (num_samples == 0) throw ContractError("noise length must be positive");
  Rng rng(seed);
  Waveform w;
  switch (kind) {
    case NoiseKind::kWhite: w = white_noise(num_samples, sample_rate, rng); break;
    case NoiseKind::kPink: w = pink_noise(num_samples, sample_rate, rng); break;
    case NoiseKind::kHarmonicBabble:
      w = babble_noise(num_samples, sample_rate, rng);
      break;
  }
  normalize_rms(w, 1.0);
  return w;
}

std::pair<Waveform, Waveform> mix(const Waveform& clean, const MixSpec& spec) {
  validate(clean);
  if (!std::isfinite(spec.snr_db)) throw DomainError("snr_db must be finite");
  const double clean_rms = clean.rms();
  if (clean_rms <= 0.0) throw DomainError("clean input is silent; SNR undefined");

  Waveform noise =
      synth_noise(spec.noise_kind, clean.samples.size(), spec.seed, clean.sample_rate);
  const double noise_rms = noise.rms();
  if (noise_rms <= 0.0) throw DomainError("generated noise is silent");

  // 20*log10(clean_rms / (g * noise_rms)) == snr_db
  const double g = clean_rms / (noise_rms * std::pow(10.0, spec.snr_db / 20.0));
  Waveform noisy;
  noisy.sample_rate = clean.sample_rate;
  noisy.samples.resize(clean.samples.size());
  for (std::size_t i = 0; i < clean.samples.size(); ++i) {
    noise.samples[i] *= g;
    noisy.samples[i] = clean.samples[i] + noise.samples[i];
  }
  return {std::move(noisy), std::move(noise)};
}

}  // namespace sfm

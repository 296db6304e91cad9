#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "sfm/waveform.hpp"

namespace sfm {

enum class NoiseKind { kWhite, kPink, kHarmonicBabble };

NoiseKind parse_noise_kind(const std::string& name);
std::string to_string(NoiseKind kind);

// Target RMS SNR in dB between the clean signal and the scaled noise.
struct MixSpec {
  double snr_db = 10.0;
  NoiseKind noise_kind = NoiseKind::kWhite;
  std::uint64_t seed = 0;
};

// Deterministic synthetic "utterance": a harmonic stack with amplitude and
// frequency modulation. Supported kinds:
//   harmonic  - single modulated stack, slow AM envelope plus vibrato
//   vowel     - stack shaped by two formant-like resonance peaks
//   chime     - restruck decaying partials with slight detuning
// Peak amplitude is normalized to 0.7.
Waveform synth_clean(const std::string& kind, double duration_seconds,
                     std::uint64_t seed, int sample_rate = 16000);

// Deterministic noise of a given kind and length. Unit RMS before mixing.
Waveform synth_noise(NoiseKind kind, std::size_t num_samples,
                     std::uint64_t seed, int sample_rate = 16000);

// Additive mixture: noisy = clean + g * noise, with g chosen so the RMS SNR
// equals spec.snr_db exactly. Returns (noisy, scaled noise), so
// noisy - noise == clean sample for sample.
std::pair<Waveform, Waveform> mix(const Waveform& clean, const MixSpec& spec);

}  // namespace sfm

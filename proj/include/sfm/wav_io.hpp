#pragma once

#include <filesystem>

#include "sfm/waveform.hpp"

namespace sfm {

enum class WavFormat { kPcm16, kFloat32 };

// Mono RIFF/WAVE writer. Float32 by default so synthesized material
// round-trips with negligible loss; PCM16 clips to [-1, 1).
void write_wav(const std::filesystem::path& path, const Waveform& w,
               WavFormat format = WavFormat::kFloat32);

// Reads mono 16-bit PCM or 32-bit float WAV at the canonical 16 kHz rate.
// Anything else (other rates, channel counts, codecs) is rejected with a
// descriptive IoError; resampling is out of scope.
Waveform read_wav(const std::filesystem::path& path);

}  // namespace sfm

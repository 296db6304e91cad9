#pragma once

#include <cstddef>
#include <vector>

namespace sfm {

// Mono time-domain signal. Samples are dimensionless amplitudes, nominally
// in [-1, 1]; sample_rate in Hz.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  std::size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  double rms() const;
  double peak() const;
};

// Throws ContractError unless the waveform has >= 1 finite samples and a
// positive sample rate.
void validate(const Waveform& w);

// Splits into non-overlapping chunks of exactly chunk_len samples; the last
// chunk is zero-padded. reassemble() undoes the padding given the original
// length, so chunk + reassemble is the identity.
std::vector<Waveform> chunk(const Waveform& w, std::size_t chunk_len);
Waveform reassemble(const std::vector<Waveform>& chunks,
                    std::size_t original_len);

}  // namespace sfm

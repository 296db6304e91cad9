#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sfm/waveform.hpp"

namespace sfm {

enum class WindowKind { kHann, kRect };

WindowKind parse_window_kind(const std::string& name);
std::string to_string(WindowKind kind);

// Analysis/synthesis configuration. fft_size must be a power of two (the
// transform is radix-2); 0 < hop <= fft_size. Validity beyond that is the
// overlap-add coverage check in validate_config().
struct StftConfig {
  int fft_size = 256;
  int hop = 128;
  WindowKind window = WindowKind::kHann;

  int num_bins() const { return fft_size / 2 + 1; }
  bool operator==(const StftConfig&) const = default;
};

// F x T complex grid plus everything needed to invert it exactly:
// the producing config, the original sample count, and the sample rate.
struct ComplexSpectrogram {
  Eigen::MatrixXcd bins;  // F rows (frequency), T cols (frames)
  StftConfig config;
  std::size_t num_samples = 0;
  int sample_rate = 16000;

  int freq_bins() const { return static_cast<int>(bins.rows()); }
  int frames() const { return static_cast<int>(bins.cols()); }
  bool same_shape(const ComplexSpectrogram& other) const {
    return bins.rows() == other.bins.rows() && bins.cols() == other.bins.cols();
  }
};

// Periodic window of fft_size samples.
std::vector<double> make_window(const StftConfig& cfg);

// Throws ConfigError if fft_size is not a power of two, hop is out of range,
// or the squared-window overlap-add coverage has (near-)zero gaps, which
// would make reconstruction ill-posed.
void validate_config(const StftConfig& cfg);

// Windowed transform with 1/sqrt(sum w^2) scaling, so a unit-variance white
// input yields unit-variance complex coefficients. Linear in the input.
ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg);

// Least-squares inverse (window-weighted overlap-add divided by the summed
// squared window). Exact for spectrograms produced by stft(), up to
// floating-point rounding.
Waveform istft(const ComplexSpectrogram& spec);

// In-place radix-2 FFT over a power-of-two-length buffer. Exposed for the
// noise synthesizer; inverse=true applies the unscaled inverse transform
// followed by 1/N normalization.
void fft_radix2(std::vector<std::complex<double>>& data, bool inverse);

}  // namespace sfm

#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "sfm/rng.hpp"
#include "sfm/stft.hpp"

namespace sfm::test {

// Unique scratch directory under the build tree, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("sfm_test_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

inline ComplexSpectrogram random_spectrogram(int freq_bins, int frames,
                                             Rng& rng, double scale = 1.0) {
  ComplexSpectrogram s;
  s.config.fft_size = (freq_bins - 1) * 2;
  s.config.hop = s.config.fft_size / 2;
  s.num_samples = static_cast<std::size_t>(frames) *
                  static_cast<std::size_t>(s.config.hop);
  s.bins.resize(freq_bins, frames);
  for (Eigen::Index i = 0; i < s.bins.size(); ++i) {
    auto [a, b] = rng.normal_pair();
    s.bins.data()[i] = std::complex<double>(scale * a, scale * b);
  }
  return s;
}

inline double max_rel_err(double a, double b, double guard = 1e-12) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), guard});
}

}  // namespace sfm::test

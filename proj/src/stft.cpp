#include "sfm/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sfm/errors.hpp"

namespace sfm {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Summed squared window over one hop period, assuming all covering frames
// exist. Index i in [0, hop).
std::vector<double> periodic_sq_coverage(const std::vector<double>& win, int hop) {
  std::vector<double> cov(static_cast<std::size_t>(hop), 0.0);
  const int n = static_cast<int>(win.size());
  for (int i = 0; i < hop; ++i) {
    for (int j = i; j < n; j += hop) cov[static_cast<std::size_t>(i)] += win[j] * win[j];
  }
  return cov;
}

}  // namespace

WindowKind parse_window_kind(const std::string& name) {
  if (name == "hann") return WindowKind::kHann;
  if (name == "rect") return WindowKind::kRect;
  throw ConfigError("unknown window kind: '" + name + "' (expected hann|rect)");
}

std::string to_string(WindowKind kind) {
  return kind == WindowKind::kHann ? "hann" : "rect";
}

std::vector<double> make_window(const StftConfig& cfg) {
  std::vector<double> w(static_cast<std::size_t>(cfg.fft_size));
  switch (cfg.window) {
    case WindowKind::kHann:
      for (int n = 0; n < cfg.fft_size; ++n) {
        w[static_cast<std::size_t>(n)] =
            0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / cfg.fft_size));
      }
      break;
    case WindowKind::kRect:
      std::fill(w.begin(), w.end(), 1.0);
      break;
  }
  return w;
}

void validate_config(const StftConfig& cfg) {
  if (!is_pow2(cfg.fft_size))
    throw ConfigError("fft_size must be a power of two, got " +
                      std::to_string(cfg.fft_size));
  if (cfg.hop <= 0 || cfg.hop > cfg.fft_size)
    throw ConfigError("hop must satisfy 0 < hop <= fft_size");
  const auto win = make_window(cfg);
  const auto cov = periodic_sq_coverage(win, cfg.hop);
  const double peak = *std::max_element(cov.begin(), cov.end());
  const double low = *std::min_element(cov.begin(), cov.end());
  if (peak <= 0.0 || low < 1e-6 * peak)
    throw ConfigError("window/hop combination leaves overlap-add gaps (" +
                      to_string(cfg.window) + ", hop " + std::to_string(cfg.hop) +
                      ", fft " + std::to_string(cfg.fft_size) + ")");
}

void fft_radix2(std::vector<std::complex<double>>& data, bool inverse) {
  const std::size_t n = data.size();
  if (!is_pow2(static_cast<int>(n)))
    throw ContractError("fft length must be a power of two");
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang =
        (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& x : data) x *= inv_n;
  }
}

// Frame m starts at m*hop in the zero-padded signal; the original signal is
// offset by (fft_size - hop) so its first sample already has full window
// coverage. Frame count is chosen so the last original sample is covered by
// its complete set of windows.
ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg) {
  validate(w);
  validate_config(cfg);
  const int fft_size = cfg.fft_size;
  const int hop = cfg.hop;
  const auto win = make_window(cfg);
  double win_energy = 0.0;
  for (double v : win) win_energy += v * v;
  const double scale = 1.0 / std::sqrt(win_energy);

  const std::size_t len = w.samples.size();
  const std::size_t left_pad = static_cast<std::size_t>(fft_size - hop);
  const std::size_t frames =
      (left_pad + len - 1) / static_cast<std::size_t>(hop) + 1;

  ComplexSpectrogram spec;
  spec.config = cfg;
  spec.num_samples = len;
  spec.sample_rate = w.sample_rate;
  spec.bins.resize(cfg.num_bins(), static_cast<Eigen::Index>(frames));

  std::vector<std::complex<double>> buf(static_cast<std::size_t>(fft_size));
  for (std::size_t m = 0; m < frames; ++m) {
    for (int n = 0; n < fft_size; ++n) {
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(m) * hop + n -
                                 static_cast<std::ptrdiff_t>(left_pad);
      const double s =
          (src >= 0 && src < static_cast<std::ptrdiff_t>(len))
              ? w.samples[static_cast<std::size_t>(src)]
              : 0.0;
      buf[static_cast<std::size_t>(n)] = s * win[static_cast<std::size_t>(n)];
    }
    fft_radix2(buf, false);
    for (int k = 0; k < cfg.num_bins(); ++k) {
      spec.bins(k, static_cast<Eigen::Index>(m)) =
          buf[static_cast<std::size_t>(k)] * scale;
    }
  }
  return spec;
}

Waveform istft(const ComplexSpectrogram& spec) {
  validate_config(spec.config);
  const int fft_size = spec.config.fft_size;
  const int hop = spec.config.hop;
  if (spec.freq_bins() != spec.config.num_bins())
    throw ContractError("spectrogram bin count does not match its config");
  if (spec.num_samples == 0) throw ContractError("spectrogram has no sample count");
  const auto win = make_window(spec.config);
  double win_energy = 0.0;
  for (double v : win) win_energy += v * v;
  const double unscale = std::sqrt(win_energy);

  const std::size_t left_pad = static_cast<std::size_t>(fft_size - hop);
  const std::size_t frames = static_cast<std::size_t>(spec.frames());
  const std::size_t padded_len =
      (frames - 1) * static_cast<std::size_t>(hop) +
      static_cast<std::size_t>(fft_size);

  std::vector<double> acc(padded_len, 0.0);
  std::vector<double> weight(padded_len, 0.0);
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(fft_size));
  for (std::size_t m = 0; m < frames; ++m) {
    // Rebuild the full Hermitian spectrum from the half-spectrum.
    for (int k = 0; k < spec.config.num_bins(); ++k)
      buf[static_cast<std::size_t>(k)] =
          spec.bins(k, static_cast<Eigen::Index>(m)) * unscale;
    for (int k = spec.config.num_bins(); k < fft_size; ++k)
      buf[static_cast<std::size_t>(k)] =
          std::conj(buf[static_cast<std::size_t>(fft_size - k)]);
    fft_radix2(buf, true);
    const std::size_t base = m * static_cast<std::size_t>(hop);
    for (int n = 0; n < fft_size; ++n) {
      const double wn = win[static_cast<std::size_t>(n)];
      acc[base + static_cast<std::size_t>(n)] +=
          wn * buf[static_cast<std::size_t>(n)].real();
      weight[base + static_cast<std::size_t>(n)] += wn * wn;
    }
  }

  Waveform out;
  out.sample_rate = spec.sample_rate;
  out.samples.resize(spec.num_samples);
  for (std::size_t i = 0; i < spec.num_samples; ++i) {
    const std::size_t q = left_pad + i;
    if (q >= padded_len || weight[q] <= 0.0)
      throw ContractError("spectrogram too short for its sample count");
    out.samples[i] = acc[q] / weight[q];
  }
  return out;
}

}  // namespace sfm

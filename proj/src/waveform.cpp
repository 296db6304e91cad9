#include "sfm/waveform.hpp"

#include <algorithm>
#include <cmath>

#include "sfm/errors.hpp"

namespace sfm {

double Waveform::rms() const {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

double Waveform::peak() const {
  double p = 0.0;
  for (double s : samples) p = std::max(p, std::abs(s));
  return p;
}

void validate(const Waveform& w) {
  if (w.samples.empty()) throw ContractError("waveform is empty");
  if (w.sample_rate <= 0) throw ContractError("waveform sample rate must be positive");
  for (double s : w.samples) {
    if (!std::isfinite(s)) throw ContractError("waveform contains non-finite samples");
  }
}

std::vector<Waveform> chunk(const Waveform& w, std::size_t chunk_len) {
  if (chunk_len == 0) throw ContractError("chunk_len must be positive");
  validate(w);
  const std::size_t n = w.samples.size();
  const std::size_t num_chunks = (n + chunk_len - 1) / chunk_len;
  std::vector<Waveform> out;
  out.reserve(num_chunks);
  for (std::size_t c = 0; c < num_chunks; ++c) {
    Waveform piece;
    piece.sample_rate = w.sample_rate;
    piece.samples.assign(chunk_len, 0.0);
    const std::size_t begin = c * chunk_len;
    const std::size_t count = std::min(chunk_len, n - begin);
    std::copy_n(w.samples.begin() + static_cast<std::ptrdiff_t>(begin), count,
                piece.samples.begin());
    out.push_back(std::move(piece));
  }
  return out;
}

Waveform reassemble(const std::vector<Waveform>& chunks,
                    std::size_t original_len) {
  if (chunks.empty()) throw ContractError("no chunks to reassemble");
  const std::size_t chunk_len = chunks.front().samples.size();
  Waveform out;
  out.sample_rate = chunks.front().sample_rate;
  out.samples.reserve(chunks.size() * chunk_len);
  for (const Waveform& c : chunks) {
    if (c.samples.size() != chunk_len)
      throw ContractError("chunks differ in length");
    out.samples.insert(out.samples.end(), c.samples.begin(), c.samples.end());
  }
  if (original_len > out.samples.size())
    throw ContractError("original_len exceeds total chunk length");
  out.samples.resize(original_len);
  return out;
}

}  // namespace sfm

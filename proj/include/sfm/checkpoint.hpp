#pragma once

#include <filesystem>
#include <optional>

#include "sfm/net.hpp"
#include "sfm/priors.hpp"
#include "sfm/rng.hpp"
#include "sfm/stft.hpp"

namespace sfm {

// Everything needed to resume training or run inference. Serialized as a
// little-endian binary file (layout documented in the README): magic bytes,
// format version, architecture descriptor and pipeline metadata, parameter
// vector, optional optimizer state, RNG state. Round-trips bit-exactly.
struct Checkpoint {
  NetConfig net_config;
  StftConfig stft_config;
  int sample_rate = 16000;
  std::uint32_t chunk_len = 32000;
  double dt_min = 1.0 / 128.0;
  PriorSpec prior;

  std::vector<double> params;
  std::optional<AdamState> adam;
  Rng rng{0};

  static Checkpoint capture(const VelocityNet& net, const AdamState& opt,
                            const Rng& rng);
  // Rebuilds a network carrying this checkpoint's parameters.
  VelocityNet restore_net() const;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);

// Throws FormatError on magic/version/shape mismatch, IoError on read
// failure.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace sfm

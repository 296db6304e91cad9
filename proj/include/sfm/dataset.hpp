#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sfm/flow.hpp"
#include "sfm/signal.hpp"
#include "sfm/stft.hpp"

namespace sfm {

// One dataset entry. The noisy side is reconstructed deterministically from
// the clean file plus (noise_kind, snr_db, seed), so manifests stay small
// and mixtures are exact.
struct ManifestRow {
  std::string id;
  std::string clean_path;  // relative to the manifest's directory
  NoiseKind noise_kind = NoiseKind::kWhite;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
};

// JSON-lines manifest: one object per row.
void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestRow>& rows);
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

// Loaded utterance, time domain.
struct LoadedUtterance {
  std::string id;
  Waveform clean;
  Waveform noisy;
};

LoadedUtterance load_utterance(const ManifestRow& row,
                               const std::filesystem::path& manifest_dir);

// Loads and transforms the whole manifest into training items.
std::vector<TrainItem> load_training_set(const std::filesystem::path& manifest,
                                         const StftConfig& cfg);

}  // namespace sfm

#include "sfm/dataset.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "sfm/errors.hpp"
#include "sfm/wav_io.hpp"

namespace sfm {

using nlohmann::json;

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestRow>& rows) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  for (const ManifestRow& r : rows) {
    json j{{"id", r.id},
           {"clean", r.clean_path},
           {"noise_kind", to_string(r.noise_kind)},
           {"snr_db", r.snr_db},
           {"seed", r.seed}};
    f << j.dump() << '\n';
  }
  if (!f) throw IoError("write failed: " + path.string());
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open manifest: " + path.string());
  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      ManifestRow r;
      r.id = j.at("id").get<std::string>();
      r.clean_path = j.at("clean").get<std::string>();
      r.noise_kind = parse_noise_kind(j.at("noise_kind").get<std::string>());
      r.snr_db = j.at("snr_db").get<double>();
      r.seed = j.at("seed").get<std::uint64_t>();
      rows.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw IoError("bad manifest row at " + path.string() + ":" +
                    std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

LoadedUtterance load_utterance(const ManifestRow& row,
                               const std::filesystem::path& manifest_dir) {
  LoadedUtterance u;
  u.id = row.id;
  u.clean = read_wav(manifest_dir / row.clean_path);
  MixSpec spec{row.snr_db, row.noise_kind, row.seed};
  auto [noisy, noise] = mix(u.clean, spec);
  (void)noise;
  u.noisy = std::move(noisy);
  return u;
}

std::vector<TrainItem> load_training_set(const std::filesystem::path& manifest,
                                         const StftConfig& cfg) {
  const auto rows = read_manifest(manifest);
  if (rows.empty()) throw ConfigError("manifest is empty: " + manifest.string());
  const auto dir = manifest.parent_path();
  std::vector<TrainItem> items;
  items.reserve(rows.size());
  for (const ManifestRow& row : rows) {
    LoadedUtterance u = load_utterance(row, dir);
    TrainItem item;
    item.id = u.id;
    item.clean = stft(u.clean, cfg);
    item.noisy = stft(u.noisy, cfg);
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace sfm

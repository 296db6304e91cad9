#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sfm {

// Full experiment configuration. Every field has a default except the
// paths. Files are JSON with these exact keys; unknown keys are rejected so
// typos fail loudly. Environment variables prefixed SFM_ (upper-cased key,
// e.g. SFM_BATCH_SIZE) override file values; command-line flags override
// both.
struct RunConfig {
  // signal / stft
  int sample_rate = 16000;
  int fft_size = 256;
  int hop = 128;
  std::string window = "hann";
  double utterance_seconds = 2.0;
  std::uint32_t chunk_len = 32000;

  // network
  int context = 1;
  int hidden = 128;
  int blocks = 3;
  int embed_dim = 16;

  // flow training
  double dt_min = 1.0 / 128.0;
  double dt_max = 0.5;
  double rate_sc = 0.25;
  double lambda_sc = 0.1;
  double rho = 0.1;
  int epochs = 20;
  int batch_size = 16;
  double lr = 1e-4;

  // prior
  std::string prior = "S";
  double sigma_end = 0.389;
  double alpha = 0.2;

  // dataset generation
  int train_utterances = 160;
  int valid_utterances = 16;
  int test_utterances = 16;
  std::vector<double> train_snrs_db = {0.0, 5.0, 10.0, 15.0};
  std::vector<double> test_snrs_db = {2.5, 7.5, 12.5, 17.5};
  std::vector<std::string> train_noise_kinds = {"white", "pink",
                                                "harmonic-babble"};
  std::vector<std::string> test_noise_kinds = {"white", "pink",
                                               "harmonic-babble"};
  bool unseen_noise = false;  // restrict train kinds and hold one out for test
  std::vector<std::string> clean_kinds = {"harmonic", "vowel", "chime"};

  // inference / evaluation
  int steps = 1;
  std::vector<int> k_list = {1, 2, 4, 8, 16};
  std::vector<std::string> sweep_priors = {"G", "S", "D", "F"};
  int rtf_repetitions = 5;

  // paths (no defaults)
  std::string data_dir;
  std::string checkpoint;
  std::string out_dir;

  std::uint64_t seed = 42;

  // Throws ConfigError on out-of-range values (e.g. rho outside [0, 0.2]).
  void validate() const;

  std::string to_json_string() const;  // normalized (sorted keys, stable)
  static RunConfig from_json_string(const std::string& text);
};

RunConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const RunConfig& cfg);

// Applies SFM_* environment overrides in place.
void apply_env_overrides(RunConfig& cfg);

}  // namespace sfm

#include "sfm/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sfm/errors.hpp"

namespace sfm {

namespace {

using nlohmann::json;

// Single source of truth for the key set: every accessor below runs the
// same visitor, so serialization, parsing and env overrides cannot drift.
template <typename Fn>
void visit_fields(RunConfig& c, Fn&& fn) {
  fn("sample_rate", c.sample_rate);
  fn("fft_size", c.fft_size);
  fn("hop", c.hop);
  fn("window", c.window);
  fn("utterance_seconds", c.utterance_seconds);
  fn("chunk_len", c.chunk_len);
  fn("context", c.context);
  fn("hidden", c.hidden);
  fn("blocks", c.blocks);
  fn("embed_dim", c.embed_dim);
  fn("dt_min", c.dt_min);
  fn("dt_max", c.dt_max);
  fn("rate_sc", c.rate_sc);
  fn("lambda_sc", c.lambda_sc);
  fn("rho", c.rho);
  fn("epochs", c.epochs);
  fn("batch_size", c.batch_size);
  fn("lr", c.lr);
  fn("prior", c.prior);
  fn("sigma_end", c.sigma_end);
  fn("alpha", c.alpha);
  fn("train_utterances", c.train_utterances);
  fn("valid_utterances", c.valid_utterances);
  fn("test_utterances", c.test_utterances);
  fn("train_snrs_db", c.train_snrs_db);
  fn("test_snrs_db", c.test_snrs_db);
  fn("train_noise_kinds", c.train_noise_kinds);
  fn("test_noise_kinds", c.test_noise_kinds);
  fn("unseen_noise", c.unseen_noise);
  fn("clean_kinds", c.clean_kinds);
  fn("steps", c.steps);
  fn("k_list", c.k_list);
  fn("sweep_priors", c.sweep_priors);
  fn("rtf_repetitions", c.rtf_repetitions);
  fn("data_dir", c.data_dir);
  fn("checkpoint", c.checkpoint);
  fn("out_dir", c.out_dir);
  fn("seed", c.seed);
}

template <typename T>
void parse_env_value(const std::string& key, const std::string& text, T& out) {
  std::istringstream is(text);
  if constexpr (std::is_same_v<T, std::string>) {
    out = text;
  } else if constexpr (std::is_same_v<T, bool>) {
    out = (text == "1" || text == "true" || text == "yes");
  } else if constexpr (std::is_same_v<T, std::vector<double>> ||
                       std::is_same_v<T, std::vector<int>> ||
                       std::is_same_v<T, std::vector<std::string>>) {
    out.clear();
    std::string item;
    while (std::getline(is, item, ',')) {
      typename T::value_type v;
      if constexpr (std::is_same_v<typename T::value_type, std::string>) {
        v = item;
      } else {
        std::istringstream vs(item);
        vs >> v;
        if (!vs) throw ConfigError("cannot parse env override " + key + "=" + text);
      }
      out.push_back(v);
    }
  } else {
    is >> out;
    if (!is) throw ConfigError("cannot parse env override " + key + "=" + text);
  }
}

}  // namespace

void RunConfig::validate() const {
  if (sample_rate != 16000)
    throw ConfigError("sample_rate must be 16000 (resampling unsupported)");
  if (!(utterance_seconds > 0.0)) throw ConfigError("utterance_seconds must be positive");
  if (chunk_len == 0) throw ConfigError("chunk_len must be positive");
  if (!(rate_sc >= 0.0 && rate_sc <= 1.0)) throw ConfigError("rate_sc must lie in [0,1]");
  if (!(rho >= 0.0 && rho <= 0.2))
    throw ConfigError("rho must lie in [0, 0.2] for training");
  if (!(lambda_sc >= 0.0)) throw ConfigError("lambda_sc must be non-negative");
  if (epochs < 0 || batch_size <= 0) throw ConfigError("bad epochs/batch_size");
  if (!(lr >= 0.0)) throw ConfigError("lr must be non-negative");
  if (steps < 1) throw ConfigError("steps must be >= 1");
  for (int k : k_list)
    if (k < 1) throw ConfigError("k_list entries must be >= 1");
  if (train_snrs_db.empty() || test_snrs_db.empty())
    throw ConfigError("SNR lists must be non-empty");
  if (train_noise_kinds.empty() || test_noise_kinds.empty())
    throw ConfigError("noise kind lists must be non-empty");
  if (clean_kinds.empty()) throw ConfigError("clean_kinds must be non-empty");
}

std::string RunConfig::to_json_string() const {
  json j = json::object();
  visit_fields(const_cast<RunConfig&>(*this),
               [&j](const char* key, auto& value) { j[key] = value; });
  return j.dump(2) + "\n";  // nlohmann objects iterate sorted: normalized form
}

RunConfig RunConfig::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  RunConfig cfg;
  std::set<std::string> known;
  visit_fields(cfg, [&](const char* key, auto& value) {
    known.insert(key);
    if (!j.contains(key)) return;  // defaulted
    try {
      j.at(key).get_to(value);
    } catch (const json::exception& e) {
      throw ConfigError("bad value for config key '" + std::string(key) +
                        "': " + e.what());
    }
  });
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key))
      throw ConfigError("unknown config key '" + key + "'");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config: " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return RunConfig::from_json_string(ss.str());
}

void save_config(const std::filesystem::path& path, const RunConfig& cfg) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << cfg.to_json_string();
  if (!f) throw IoError("write failed: " + path.string());
}

void apply_env_overrides(RunConfig& cfg) {
  visit_fields(cfg, [](const char* key, auto& value) {
    std::string env_key = "SFM_";
    for (const char* p = key; *p; ++p)
      env_key += static_cast<char>(std::toupper(*p));
    if (const char* text = std::getenv(env_key.c_str()))
      parse_env_value(env_key, text, value);
  });
}

}  // namespace sfm

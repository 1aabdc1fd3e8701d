#ifndef MNEMO_CONFIG_HPP
#define MNEMO_CONFIG_HPP

#include <cstdlib>
#include <map>
#include <string>

#include "mnemo/error.hpp"
#include "mnemo/text.hpp"

namespace mnemo {

// Default RNG seed for tie-breaking; documented in the README.
inline constexpr std::uint64_t kDefaultSeed = 20240613;

struct AppConfig {
  // resources
  std::string imageability_primary;
  std::string imageability_secondary;
  std::string aoa;
  std::string stopwords;
  std::string lemmas;
  std::string embeddings;
  std::string pronouncing_dict;
  std::string arpabet_ipa_map;
  std::string keyword_prompt;
  std::string cue_prompt;
  std::string mask_prompt;
  // backend
  std::string api_base;
  std::string api_key;
  std::string generation_model = "gpt-4";
  std::string scoring_model = "gpt-4";
  int timeout_seconds = 60;
  // pipeline knobs
  int keyword_cap = 0; // 0 means 2L+1
  int cue_cap = 5;
  int retry_rounds = 1;
  std::uint64_t seed = kDefaultSeed;
  int max_inflight = 4;
  std::string cache_file;

  void validate() const {
    if (cue_cap < 1 || retry_rounds < 0 || keyword_cap < 0)
      throw ConfigError("caps must be >= 1 and retry rounds >= 0");
    if (max_inflight < 1) throw ConfigError("max_inflight must be >= 1");
  }
};

// Minimal key-value config reader: `key = value` lines, `[section]` headers
// prefixing keys as "section.key", '#' comments, quoted or bare values.
inline std::map<std::string, std::string> parse_config_file(
    const std::string& path) {
  std::map<std::string, std::string> kv;
  std::string section;
  auto lines = split_lines(read_file(path));
  for (size_t ln = 0; ln < lines.size(); ++ln) {
    std::string line = trim(lines[ln]);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ": malformed line " + std::to_string(ln + 1));
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
      val = val.substr(1, val.size() - 2);
    kv[section.empty() ? key : section + "." + key] = val;
  }
  return kv;
}

// Precedence below flags: environment variables beat the config file.
inline void apply_config_sources(AppConfig& cfg,
                                 const std::string& config_path) {
  std::map<std::string, std::string> kv;
  if (!config_path.empty()) kv = parse_config_file(config_path);

  auto get = [&](const std::string& key, std::string& out) {
    auto it = kv.find(key);
    if (it != kv.end()) out = it->second;
  };
  auto get_int = [&](const std::string& key, int& out) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    try {
      out = std::stoi(it->second);
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + " is not an integer");
    }
  };

  get("resources.imageability_primary", cfg.imageability_primary);
  get("resources.imageability_secondary", cfg.imageability_secondary);
  get("resources.aoa", cfg.aoa);
  get("resources.stopwords", cfg.stopwords);
  get("resources.lemmas", cfg.lemmas);
  get("resources.embeddings", cfg.embeddings);
  get("resources.pronouncing_dict", cfg.pronouncing_dict);
  get("resources.arpabet_ipa_map", cfg.arpabet_ipa_map);
  get("resources.keyword_prompt", cfg.keyword_prompt);
  get("resources.cue_prompt", cfg.cue_prompt);
  get("resources.mask_prompt", cfg.mask_prompt);
  get("backend.api_base", cfg.api_base);
  get("backend.api_key", cfg.api_key);
  get("backend.generation_model", cfg.generation_model);
  get("backend.scoring_model", cfg.scoring_model);
  get_int("backend.timeout_seconds", cfg.timeout_seconds);
  get_int("pipeline.keyword_cap", cfg.keyword_cap);
  get_int("pipeline.cue_cap", cfg.cue_cap);
  get_int("pipeline.retry_rounds", cfg.retry_rounds);
  get_int("pipeline.max_inflight", cfg.max_inflight);
  get("pipeline.cache_file", cfg.cache_file);
  if (auto it = kv.find("pipeline.seed"); it != kv.end())
    cfg.seed = std::stoull(it->second);

  auto env = [&](const char* name, std::string& out) {
    if (const char* v = std::getenv(name)) out = v;
  };
  env("MNEMO_API_BASE", cfg.api_base);
  env("MNEMO_API_KEY", cfg.api_key);
  env("MNEMO_GEN_MODEL", cfg.generation_model);
  env("MNEMO_SCORE_MODEL", cfg.scoring_model);
}

} // namespace mnemo

#endif

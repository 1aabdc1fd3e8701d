#ifndef MNEMO_LLM_GATEWAY_HPP
#define MNEMO_LLM_GATEWAY_HPP

#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mnemo/error.hpp"
#include "mnemo/text.hpp"

namespace mnemo {

struct GenerationRequest {
  std::string prompt;
  double temperature = 0.7;
  double top_p = 1.0;
  int max_tokens = 512;
  std::string model;
  std::optional<int> seed_hint; // distinguishes otherwise-identical samples

  void validate() const {
    if (prompt.empty()) throw Error("GenerationRequest: empty prompt");
    if (temperature < 0) throw Error("GenerationRequest: temperature < 0");
    if (top_p <= 0 || top_p > 1) throw Error("GenerationRequest: top_p out of (0,1]");
  }

  std::string cache_key() const {
    std::string canon = model + '\x1f' + std::to_string(temperature) + '\x1f' +
                        std::to_string(top_p) + '\x1f' +
                        std::to_string(max_tokens) + '\x1f' +
                        (seed_hint ? std::to_string(*seed_hint) : "") + '\x1f' +
                        prompt;
    return fnv1a64_hex(canon);
  }
};

struct TokenLogprobs {
  std::vector<std::string> tokens;
  std::vector<double> logprobs;
};

struct MaskPredictions {
  std::vector<std::string> candidates; // exactly 5, lowercased single words
};

class Backend {
public:
  virtual ~Backend() = default;
  virtual std::string complete(const GenerationRequest& req) = 0;
  virtual TokenLogprobs token_logprobs(const std::string& model,
                                       const std::string& text) = 0;
};

// Deterministic backend replaying fixture files.
//
// Generation fixtures: <fnv1a64hex(prompt)>.json, a JSON array of response
// strings (or {"responses": [...]}). The response index is the request's
// seed_hint when present, otherwise a per-key arrival counter; indexes past
// the end clamp to the last entry.
// Logprob fixtures: lp_<fnv1a64hex(text)>.json with {"tokens", "logprobs"}.
class ReplayBackend : public Backend {
public:
  explicit ReplayBackend(std::string dir) : dir_(std::move(dir)) {}

  std::string complete(const GenerationRequest& req) override {
    req.validate();
    std::string key = fnv1a64_hex(req.prompt);
    nlohmann::json doc = load_fixture(dir_ + "/" + key + ".json",
                                      "prompt starting \"" +
                                          req.prompt.substr(0, 60) + "\"");
    const nlohmann::json& responses =
        doc.is_array() ? doc : doc.at("responses");
    size_t idx;
    {
      std::lock_guard<std::mutex> lock(mu_);
      ++complete_calls_;
      idx = req.seed_hint ? static_cast<size_t>(*req.seed_hint)
                          : counters_[key]++;
    }
    if (responses.empty())
      throw BackendError("replay fixture " + key + ".json has no responses");
    if (idx >= responses.size()) idx = responses.size() - 1;
    return responses[idx].get<std::string>();
  }

  TokenLogprobs token_logprobs(const std::string&,
                               const std::string& text) override {
    std::string key = fnv1a64_hex(text);
    nlohmann::json doc = load_fixture(dir_ + "/lp_" + key + ".json",
                                      "text starting \"" + text.substr(0, 60) +
                                          "\"");
    TokenLogprobs out;
    out.tokens = doc.at("tokens").get<std::vector<std::string>>();
    out.logprobs = doc.at("logprobs").get<std::vector<double>>();
    if (out.tokens.size() != out.logprobs.size())
      throw BackendError("replay logprob fixture length mismatch: " + key);
    {
      std::lock_guard<std::mutex> lock(mu_);
      ++logprob_calls_;
    }
    return out;
  }

  size_t complete_calls() const { return complete_calls_; }
  size_t logprob_calls() const { return logprob_calls_; }

private:
  nlohmann::json load_fixture(const std::string& path,
                              const std::string& what) const {
    std::ifstream in(path);
    if (!in)
      throw BackendError("replay fixture missing: " + path + " (for " + what +
                         ")");
    try {
      return nlohmann::json::parse(in);
    } catch (const std::exception& e) {
      throw BackendError("replay fixture unreadable: " + path + ": " +
                         e.what());
    }
  }

  std::string dir_;
  mutable std::mutex mu_;
  std::map<std::string, size_t> counters_;
  size_t complete_calls_ = 0;
  size_t logprob_calls_ = 0;
};

// Fixed-response backend for unit tests.
class MockBackend : public Backend {
public:
  std::function<std::string(const GenerationRequest&)> on_complete;
  std::function<TokenLogprobs(const std::string&)> on_logprobs;

  std::string complete(const GenerationRequest& req) override {
    req.validate();
    ++complete_calls;
    if (!on_complete) throw BackendError("mock: no completion handler");
    return on_complete(req);
  }
  TokenLogprobs token_logprobs(const std::string&,
                               const std::string& text) override {
    ++logprob_calls;
    if (!on_logprobs) throw BackendError("mock: no logprob handler");
    return on_logprobs(text);
  }

  std::atomic<size_t> complete_calls{0};
  std::atomic<size_t> logprob_calls{0};
};

// Append-only JSONL response cache, content-addressed by request key.
class ResponseCache {
public:
  explicit ResponseCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto rec = nlohmann::json::parse(line);
      entries_[rec.at("key").get<std::string>()] =
          rec.at("response").get<std::string>();
    }
  }

  std::optional<std::string> get(const std::string& key) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      ++misses_;
      return std::nullopt;
    }
    ++hits_;
    return it->second;
  }

  void put(const GenerationRequest& req, const std::string& response) {
    std::lock_guard<std::mutex> lock(mu_);
    std::string key = req.cache_key();
    if (entries_.count(key)) return;
    entries_[key] = response;
    nlohmann::ordered_json rec{
        {"key", key},
        {"model", req.model},
        {"params",
         {{"temperature", req.temperature},
          {"top_p", req.top_p},
          {"max_tokens", req.max_tokens},
          {"seed_hint", req.seed_hint ? nlohmann::json(*req.seed_hint)
                                      : nlohmann::json(nullptr)}}},
        {"prompt", req.prompt},
        {"response", response},
        {"timestamp",
         std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
             .count()}};
    std::ofstream out(path_, std::ios::app);
    if (!out) throw ConfigError("cannot append to cache file: " + path_);
    out << rec.dump() << '\n';
  }

  size_t size() const { return entries_.size(); }
  size_t hits() const { return hits_; }
  size_t misses() const { return misses_; }
  const std::string& path() const { return path_; }

private:
  std::string path_;
  std::mutex mu_;
  std::map<std::string, std::string> entries_;
  size_t hits_ = 0;
  size_t misses_ = 0;
};

struct GatewayConfig {
  std::string generation_model = "gpt-4";
  std::string scoring_model = "gpt-4";
  double temperature = 0.7;
  double top_p = 1.0;
  int max_tokens = 512;
  int max_inflight = 4;
  std::string mask_prompt_template; // needs a {masked_cue} slot
};

class Gateway {
public:
  Gateway(Backend& backend, GatewayConfig config,
          ResponseCache* cache = nullptr)
      : backend_(backend), config_(std::move(config)), cache_(cache) {}

  std::string complete(const std::string& prompt,
                       std::optional<int> seed_hint = std::nullopt) {
    GenerationRequest req;
    req.prompt = prompt;
    req.temperature = config_.temperature;
    req.top_p = config_.top_p;
    req.max_tokens = config_.max_tokens;
    req.model = config_.generation_model;
    req.seed_hint = seed_hint;
    req.validate();
    if (cache_) {
      if (auto hit = cache_->get(req.cache_key())) return *hit;
    }
    std::string response = backend_.complete(req);
    if (response.empty()) throw BackendError("backend returned empty response");
    if (cache_) cache_->put(req, response);
    return response;
  }

  // Issues `count` independent sampling calls (bounded concurrency). Slots
  // that fail after backend retries are dropped with a warning.
  std::vector<std::string> complete_many(const std::string& prompt,
                                         size_t count) {
    std::vector<std::optional<std::string>> slots(count);
    size_t inflight =
        std::max<size_t>(1, static_cast<size_t>(config_.max_inflight));
    for (size_t base = 0; base < count; base += inflight) {
      size_t batch = std::min(inflight, count - base);
      std::vector<std::future<std::string>> futs;
      futs.reserve(batch);
      for (size_t j = 0; j < batch; ++j) {
        size_t i = base + j;
        futs.push_back(std::async(std::launch::async, [this, &prompt, i] {
          return complete(prompt, static_cast<int>(i));
        }));
      }
      for (size_t j = 0; j < batch; ++j) {
        try {
          slots[base + j] = futs[j].get();
        } catch (const std::exception& e) {
          std::cerr << "warning: candidate " << (base + j)
                    << " dropped: " << e.what() << '\n';
        }
      }
    }
    std::vector<std::string> out;
    for (auto& s : slots)
      if (s) out.push_back(std::move(*s));
    return out;
  }

  // Masked top-5 prediction via the shipped mask prompt.
  MaskPredictions masked_top5(const std::string& cue_with_mask) {
    size_t first = cue_with_mask.find("[MASK]");
    if (first == std::string::npos ||
        cue_with_mask.find("[MASK]", first + 1) != std::string::npos)
      throw Error("masked_top5: cue must contain exactly one [MASK]");
    if (config_.mask_prompt_template.empty())
      throw ConfigError("masked_top5: mask prompt template not configured");
    std::string prompt =
        fill_template(config_.mask_prompt_template, "masked_cue",
                      cue_with_mask);
    return parse_mask_response(complete(prompt));
  }

  static MaskPredictions parse_mask_response(const std::string& raw) {
    MaskPredictions out;
    for (const auto& line : split_lines(raw)) {
      std::string s = trim(line);
      if (s.empty()) continue;
      size_t i = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
        ++i;
      if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')')) ++i;
      std::string word = to_lower(strip_punct(trim(s.substr(i))));
      if (word.empty()) continue;
      if (word.find(' ') != std::string::npos)
        throw ParseError("masked_top5: candidate is not a single word: \"" +
                         word + "\"");
      out.candidates.push_back(word);
    }
    if (out.candidates.size() != 5)
      throw ParseError("masked_top5: expected 5 candidates, got " +
                       std::to_string(out.candidates.size()));
    return out;
  }

  TokenLogprobs token_logprobs(const std::string& text) {
    if (text.empty()) throw Error("token_logprobs: empty text");
    return backend_.token_logprobs(config_.scoring_model, text);
  }

  const GatewayConfig& config() const { return config_; }
  ResponseCache* cache() const { return cache_; }

private:
  Backend& backend_;
  GatewayConfig config_;
  ResponseCache* cache_;
};

} // namespace mnemo

#endif

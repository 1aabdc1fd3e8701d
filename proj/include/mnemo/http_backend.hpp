#ifndef MNEMO_HTTP_BACKEND_HPP
#define MNEMO_HTTP_BACKEND_HPP

#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "mnemo/error.hpp"
#include "mnemo/llm_gateway.hpp"

namespace mnemo {

struct HttpBackendConfig {
  std::string base_url; // e.g. http://localhost:8000/v1
  std::string api_key;
  int timeout_seconds = 60;
  int max_retries = 3;
};

// OpenAI-compatible backend: /chat/completions for generation, legacy
// /completions with echo for per-token logprobs of arbitrary text.
class HttpBackend : public Backend {
public:
  explicit HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty())
      throw ConfigError("HttpBackend: base URL not configured");
    split_url(config_.base_url, host_, path_prefix_);
  }

  std::string complete(const GenerationRequest& req) override {
    req.validate();
    nlohmann::json body{
        {"model", req.model},
        {"messages",
         nlohmann::json::array(
             {{{"role", "user"}, {"content", req.prompt}}})},
        {"temperature", req.temperature},
        {"top_p", req.top_p},
        {"max_tokens", req.max_tokens}};
    nlohmann::json resp = post_json("/chat/completions", body);
    try {
      std::string text =
          resp.at("choices").at(0).at("message").at("content")
              .get<std::string>();
      if (text.empty()) throw BackendError("backend returned empty response");
      return text;
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("unexpected completion payload: ") +
                         e.what());
    }
  }

  TokenLogprobs token_logprobs(const std::string& model,
                               const std::string& text) override {
    nlohmann::json body{{"model", model},     {"prompt", text},
                        {"max_tokens", 0},    {"echo", true},
                        {"logprobs", 0},      {"temperature", 0.0}};
    nlohmann::json resp = post_json("/completions", body);
    TokenLogprobs out;
    try {
      const auto& lp = resp.at("choices").at(0).at("logprobs");
      const auto& toks = lp.at("tokens");
      const auto& probs = lp.at("token_logprobs");
      for (size_t i = 0; i < toks.size() && i < probs.size(); ++i) {
        if (probs[i].is_null()) continue; // first token has no prefix
        out.tokens.push_back(toks[i].get<std::string>());
        out.logprobs.push_back(probs[i].get<double>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("backend lacks logprob support: ") +
                         e.what());
    }
    if (out.tokens.empty())
      throw BackendError("backend returned no scored tokens");
    return out;
  }

private:
  nlohmann::json post_json(const std::string& endpoint,
                           const nlohmann::json& body) {
    std::string last_error;
    for (int attempt = 1; attempt <= config_.max_retries; ++attempt) {
      httplib::Client cli(host_);
      cli.set_connection_timeout(config_.timeout_seconds, 0);
      cli.set_read_timeout(config_.timeout_seconds, 0);
      httplib::Headers headers;
      if (!config_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config_.api_key);
      auto res = cli.Post(path_prefix_ + endpoint, headers, body.dump(),
                          "application/json");
      if (!res) {
        last_error = "transport failure: " + httplib::to_string(res.error());
      } else if (res->status < 200 || res->status >= 300) {
        last_error = "status " + std::to_string(res->status) + ": " +
                     res->body.substr(0, 200);
      } else {
        try {
          return nlohmann::json::parse(res->body);
        } catch (const std::exception& e) {
          last_error = std::string("bad JSON in response: ") + e.what();
        }
      }
      if (attempt < config_.max_retries)
        std::this_thread::sleep_for(
            std::chrono::milliseconds(200 * (1 << (attempt - 1))));
    }
    throw BackendError(endpoint + " failed after " +
                       std::to_string(config_.max_retries) +
                       " attempts; last error: " + last_error);
  }

  static void split_url(const std::string& url, std::string& host,
                        std::string& path) {
    size_t scheme = url.find("://");
    size_t path_start = url.find('/', scheme == std::string::npos
                                          ? 0
                                          : scheme + 3);
    if (path_start == std::string::npos) {
      host = url;
      path.clear();
    } else {
      host = url.substr(0, path_start);
      path = url.substr(path_start);
      while (!path.empty() && path.back() == '/') path.pop_back();
    }
  }

  HttpBackendConfig config_;
  std::string host_;
  std::string path_prefix_;
};

} // namespace mnemo

#endif

#pragma once

// HTTP client for an external deterministic inference endpoint.
//
// Wire protocol (JSON over HTTP POST):
//   request:  {"prompt": string, "prefix_tokens": [int], "top_k": int,
//              "deterministic": true}
//   response: {"tokens": [int], "logprobs": [number], "eos_token": int}
//
// Configuration comes from the environment: STEGO_LLM_ENDPOINT (full URL),
// STEGO_LLM_TOKEN (optional bearer token), STEGO_LLM_TIMEOUT_MS.
//
// The first scored step is issued twice and the responses compared; any
// disagreement fails fast as nondeterminism-detected, since a drifting
// server makes extraction impossible.

#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "lmstego/errors.hpp"
#include "lmstego/provider.hpp"

namespace lmstego {

struct RemoteOptions {
  std::string endpoint;  // e.g. http://127.0.0.1:8080/v1/scores
  std::string auth_token;
  int timeout_ms = 10000;
  int top_k = 64;

  static RemoteOptions from_env() {
    RemoteOptions opt;
    if (const char* ep = std::getenv("STEGO_LLM_ENDPOINT")) opt.endpoint = ep;
    if (const char* tok = std::getenv("STEGO_LLM_TOKEN")) opt.auth_token = tok;
    if (const char* to = std::getenv("STEGO_LLM_TIMEOUT_MS")) opt.timeout_ms = std::atoi(to);
    return opt;
  }
};

class RemoteProvider : public DistributionProvider {
public:
  RemoteProvider(RemoteOptions options, int max_candidates)
      : options_(std::move(options)) {
    if (options_.endpoint.empty())
      throw Error(Errc::provider_unavailable, "remote endpoint not configured");
    if (options_.top_k < max_candidates)
      throw Error(Errc::invalid_config,
                  "remote top_k must cover max_candidates (top_k=" +
                      std::to_string(options_.top_k) + ", max_candidates=" +
                      std::to_string(max_candidates) + ")");
    split_endpoint(options_.endpoint, base_, path_);
  }

  std::vector<TokenScore> next_scores(const PromptContext& ctx,
                                      const std::vector<int>& prefix) override {
    nlohmann::json body = request_body(ctx, prefix);
    nlohmann::json resp = post(body);
    if (!probed_) {
      nlohmann::json resp2 = post(body);
      if (resp != resp2)
        throw Error(Errc::nondeterminism_detected,
                    "remote endpoint returned different results for an identical probe "
                    "request");
      probed_ = true;
    }
    return parse_scores(resp);
  }

  int vocab_size() const override { return -1; }  // unknown for a remote vocabulary
  int eos_token() const override { return eos_; }

  // The wire protocol has no tokenize operation, so the remote provider
  // renders stegotext as space-separated decimal token ids.
  std::vector<int> tokenize(std::string_view text) const override {
    std::vector<int> out;
    size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      size_t start = i;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      if (i == start) break;
      std::string word(text.substr(start, i - start));
      try {
        size_t pos = 0;
        int id = std::stoi(word, &pos);
        if (pos != word.size()) throw std::invalid_argument(word);
        out.push_back(id);
      } catch (const std::exception&) {
        throw Error(Errc::vocabulary_mismatch,
                    "remote stegotext must be space-separated token ids, got '" + word + "'");
      }
    }
    return out;
  }

  std::string detokenize(const std::vector<int>& tokens) const override {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
      if (i > 0) out += ' ';
      out += std::to_string(tokens[i]);
    }
    return out;
  }

private:
  static void split_endpoint(const std::string& url, std::string& base, std::string& path) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
      throw Error(Errc::provider_unavailable, "endpoint URL must include a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      base = url;
      path = "/";
    } else {
      base = url.substr(0, path_start);
      path = url.substr(path_start);
    }
  }

  nlohmann::json request_body(const PromptContext& ctx, const std::vector<int>& prefix) const {
    return nlohmann::json{{"prompt", ctx.rendered},
                          {"prefix_tokens", prefix},
                          {"top_k", options_.top_k},
                          {"deterministic", true}};
  }

  nlohmann::json post(const nlohmann::json& body) {
    httplib::Client cli(base_);
    cli.set_connection_timeout(0, options_.timeout_ms * 1000);
    cli.set_read_timeout(options_.timeout_ms / 1000, (options_.timeout_ms % 1000) * 1000);
    httplib::Headers headers;
    if (!options_.auth_token.empty())
      headers.emplace("Authorization", "Bearer " + options_.auth_token);

    std::string payload = body.dump();
    httplib::Result res;
    for (int attempt = 0; attempt < 3; ++attempt) {
      res = cli.Post(path_, headers, payload, "application/json");
      if (res) break;  // transport succeeded; retry only on transport failure
    }
    if (!res)
      throw Error(Errc::provider_unavailable,
                  "remote endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw Error(Errc::provider_unavailable,
                  "remote endpoint returned HTTP " + std::to_string(res->status));
    nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded())
      throw Error(Errc::provider_unavailable, "remote endpoint returned invalid JSON");
    return parsed;
  }

  std::vector<TokenScore> parse_scores(const nlohmann::json& resp) {
    if (!resp.contains("tokens") || !resp.contains("logprobs") || !resp.contains("eos_token"))
      throw Error(Errc::provider_unavailable, "remote response missing required fields");
    const auto& tokens = resp["tokens"];
    const auto& logprobs = resp["logprobs"];
    if (!tokens.is_array() || !logprobs.is_array() || tokens.size() != logprobs.size())
      throw Error(Errc::provider_unavailable,
                  "remote response tokens/logprobs must be arrays of equal length");
    if (tokens.size() < static_cast<size_t>(options_.top_k))
      throw Error(Errc::insufficient_top_k,
                  "remote endpoint returned " + std::to_string(tokens.size()) +
                      " entries, requested top_k=" + std::to_string(options_.top_k));
    eos_ = resp["eos_token"].get<int>();
    std::vector<TokenScore> out;
    out.reserve(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i)
      out.push_back({tokens[i].get<int>(), logprobs[i].get<double>()});
    return out;
  }

  RemoteOptions options_;
  std::string base_;
  std::string path_;
  bool probed_ = false;
  int eos_ = -1;
};

}  // namespace lmstego

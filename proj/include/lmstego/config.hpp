#pragma once

// Flat key=value run configuration with stable digests. Every knob the
// sender and receiver must agree on lives here.

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "lmstego/codec.hpp"
#include "lmstego/digest.hpp"
#include "lmstego/engine.hpp"
#include "lmstego/errors.hpp"

namespace lmstego {

struct RunConfig {
  EmbedConfig embed;
  std::string provider = "toy";  // toy | remote
  CodecId codec = CodecId::huffman;
  int max_ef_rounds = 15;
  std::string corpus_path;

  void set(const std::string& key, const std::string& value) {
    try {
      if (key == "tau") {
        embed.tau = std::stod(value);
      } else if (key == "t0") {
        embed.t0 = std::stod(value);
      } else if (key == "alpha") {
        embed.alpha = std::stod(value);
      } else if (key == "delta0") {
        embed.delta0 = std::stod(value);
      } else if (key == "beta") {
        embed.beta = std::stod(value);
      } else if (key == "k") {
        embed.context_size = std::stoi(value);
      } else if (key == "max_candidates") {
        embed.max_candidates = std::stoi(value);
      } else if (key == "max_tokens") {
        embed.max_tokens = std::stoi(value);
      } else if (key == "seed") {
        embed.seed = std::stoull(value);
      } else if (key == "provider") {
        if (value != "toy" && value != "remote")
          throw Error(Errc::invalid_config, "provider must be toy or remote");
        provider = value;
      } else if (key == "codec") {
        if (value == "raw")
          codec = CodecId::raw;
        else if (value == "huffman")
          codec = CodecId::huffman;
        else
          throw Error(Errc::invalid_config, "codec must be raw or huffman");
      } else if (key == "max_ef_rounds") {
        max_ef_rounds = std::stoi(value);
        if (max_ef_rounds < 1 || max_ef_rounds > 15)
          throw Error(Errc::invalid_config, "max_ef_rounds must be in 1..15");
      } else if (key == "corpus") {
        corpus_path = value;
      } else {
        throw Error(Errc::invalid_config, "unknown config key: " + key);
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(Errc::invalid_config, "bad value for config key " + key + ": " + value);
    }
  }

  // key=value lines, '#' starts a comment.
  static RunConfig load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(Errc::io_error, "cannot open config: " + path);
    RunConfig cfg;
    std::string line;
    while (std::getline(is, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      size_t lo = line.find_first_not_of(" \t\r");
      if (lo == std::string::npos) continue;
      size_t hi = line.find_last_not_of(" \t\r");
      line = line.substr(lo, hi - lo + 1);
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw Error(Errc::invalid_config, "config line is not key=value: " + line);
      cfg.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return cfg;
  }

  // Canonical dump: sorted keys, shortest round-trip number formatting.
  std::string dump() const {
    std::map<std::string, std::string> kv;
    kv["alpha"] = format_double(embed.alpha);
    kv["beta"] = format_double(embed.beta);
    kv["codec"] = codec == CodecId::raw ? "raw" : "huffman";
    kv["corpus"] = corpus_path;
    kv["delta0"] = format_double(embed.delta0);
    kv["k"] = std::to_string(embed.context_size);
    kv["max_candidates"] = std::to_string(embed.max_candidates);
    kv["max_ef_rounds"] = std::to_string(max_ef_rounds);
    kv["max_tokens"] = std::to_string(embed.max_tokens);
    kv["provider"] = provider;
    kv["seed"] = std::to_string(embed.seed);
    kv["t0"] = format_double(embed.t0);
    kv["tau"] = format_double(embed.tau);
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
  }

  void save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw Error(Errc::io_error, "cannot write config: " + path);
    os << dump();
  }

  std::string digest() const { return digest_hex(dump()); }
};

}  // namespace lmstego

#pragma once

// Envelope file format: the stegotext on the first line, then the sidecar
// metadata block (one `key value` pair per line):
//   corpus_id <id>
//   seed <decimal>
//   config_digest <hex>
//   sequence <n>
// In covert deployment the sidecar is pre-shared, not transmitted.

#include <fstream>
#include <sstream>
#include <string>

#include "lmstego/engine.hpp"
#include "lmstego/errors.hpp"

namespace lmstego {

struct EnvelopeFile {
  std::string stegotext;
  std::string corpus_id;
  uint64_t seed = 0;
  std::string config_digest;
  int sequence = 0;
};

inline void write_envelope(const std::string& path, const StegoEnvelope& env, int sequence) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::io_error, "cannot write envelope: " + path);
  os << env.stegotext << '\n';
  os << "corpus_id " << env.corpus_id << '\n';
  os << "seed " << env.seed << '\n';
  os << "config_digest " << env.config_digest << '\n';
  os << "sequence " << sequence << '\n';
}

inline EnvelopeFile read_envelope(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::io_error, "cannot open envelope: " + path);
  EnvelopeFile env;
  if (!std::getline(is, env.stegotext))
    throw Error(Errc::io_error, "envelope file is empty: " + path);
  std::string line;
  bool have_corpus = false, have_seed = false, have_digest = false, have_seq = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto space = line.find(' ');
    std::string key = line.substr(0, space);
    std::string value = space == std::string::npos ? "" : line.substr(space + 1);
    try {
      if (key == "corpus_id") {
        env.corpus_id = value;
        have_corpus = true;
      } else if (key == "seed") {
        env.seed = std::stoull(value);
        have_seed = true;
      } else if (key == "config_digest") {
        env.config_digest = value;
        have_digest = true;
      } else if (key == "sequence") {
        env.sequence = std::stoi(value);
        have_seq = true;
      } else {
        throw Error(Errc::io_error, "unknown envelope sidecar key '" + key + "' in " + path);
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(Errc::io_error, "bad envelope sidecar line '" + line + "' in " + path);
    }
  }
  if (!have_corpus || !have_seed || !have_digest || !have_seq)
    throw Error(Errc::io_error, "envelope sidecar is incomplete: " + path);
  return env;
}

}  // namespace lmstego

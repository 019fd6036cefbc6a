#pragma once

#include <stdexcept>
#include <string>

namespace lmstego {

// Every failure the library can raise. The CLI maps these onto exit-code
// groups (see exit_code_for).
enum class Errc {
  invalid_config,
  io_error,
  empty_corpus,
  corpus_too_small,
  malformed_bitstream,
  bad_magic,
  unsupported_version,
  truncated_payload,
  empty_pool,
  unknown_token,
  capacity_exceeded,
  token_not_in_pool,
  truncated_stegotext,
  provider_unavailable,
  insufficient_top_k,
  nondeterminism_detected,
  vocabulary_mismatch,
  empty_input,
  zero_probability_token,
  support_mismatch,
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

private:
  Errc code_;
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_config: return "invalid-config";
    case Errc::io_error: return "io-error";
    case Errc::empty_corpus: return "empty-corpus";
    case Errc::corpus_too_small: return "corpus-too-small";
    case Errc::malformed_bitstream: return "malformed-bitstream";
    case Errc::bad_magic: return "bad-magic";
    case Errc::unsupported_version: return "unsupported-version";
    case Errc::truncated_payload: return "truncated-payload";
    case Errc::empty_pool: return "empty-pool";
    case Errc::unknown_token: return "unknown-token";
    case Errc::capacity_exceeded: return "capacity-exceeded";
    case Errc::token_not_in_pool: return "token-not-in-pool";
    case Errc::truncated_stegotext: return "truncated-stegotext";
    case Errc::provider_unavailable: return "provider-unavailable";
    case Errc::insufficient_top_k: return "insufficient-top-k";
    case Errc::nondeterminism_detected: return "nondeterminism-detected";
    case Errc::vocabulary_mismatch: return "vocabulary-mismatch";
    case Errc::empty_input: return "empty-input";
    case Errc::zero_probability_token: return "zero-probability-token";
    case Errc::support_mismatch: return "support-mismatch";
  }
  return "unknown";
}

// Exit-code groups used by the CLI. Documented in --help.
//   0 success, 2 usage/config, 3 input/corpus, 4 payload codec,
//   5 capacity, 6 extraction mismatch, 7 provider
inline int exit_code_for(Errc c) {
  switch (c) {
    case Errc::invalid_config:
      return 2;
    case Errc::io_error:
    case Errc::empty_corpus:
    case Errc::corpus_too_small:
    case Errc::empty_input:
      return 3;
    case Errc::malformed_bitstream:
    case Errc::bad_magic:
    case Errc::unsupported_version:
    case Errc::truncated_payload:
    case Errc::empty_pool:
    case Errc::unknown_token:
      return 4;
    case Errc::capacity_exceeded:
      return 5;
    case Errc::token_not_in_pool:
    case Errc::truncated_stegotext:
      return 6;
    case Errc::provider_unavailable:
    case Errc::insufficient_top_k:
    case Errc::nondeterminism_detected:
    case Errc::vocabulary_mismatch:
    case Errc::zero_probability_token:
    case Errc::support_mismatch:
      return 7;
  }
  return 1;
}

}  // namespace lmstego

#pragma once

// Command-level plumbing shared by the CLI and the test suites:
// prepare -> hide -> extract -> eval over real files.
//
// Hiding runs  compress -> multi-round edge-flip -> frame -> embed.  When a
// payload does not fit the token budget the secret is split at UTF-8
// character boundaries and chained across several envelopes; the chain order
// travels in the sidecar `sequence` field, never in the covert payload.

#include <deque>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lmstego/codec.hpp"
#include "lmstego/config.hpp"
#include "lmstego/engine.hpp"
#include "lmstego/envelope_io.hpp"
#include "lmstego/errors.hpp"
#include "lmstego/metrics.hpp"
#include "lmstego/prep.hpp"
#include "lmstego/provider.hpp"
#include "lmstego/remote.hpp"

namespace lmstego {

inline std::unique_ptr<DistributionProvider> make_provider(const RunConfig& cfg,
                                                           const Corpus& corpus) {
  if (cfg.provider == "toy")
    return std::make_unique<NgramToyModel>(corpus.sentences);
  if (cfg.provider == "remote") {
    RemoteOptions opt = RemoteOptions::from_env();
    opt.top_k = cfg.embed.max_candidates;
    return std::make_unique<RemoteProvider>(opt, cfg.embed.max_candidates);
  }
  throw Error(Errc::invalid_config, "unknown provider: " + cfg.provider);
}

inline FrequencyTable load_frequency_table(const RunConfig& cfg) {
  return FrequencyTable::load(cfg.corpus_path + ".freq");
}

// compress -> EF multi-round -> frame
inline BitStream build_payload(std::string_view secret, const FrequencyTable& table,
                               CodecId codec, int max_ef_rounds) {
  BitStream body = compress_text(secret, table, codec);
  EfResult ef = ef_multiround(body, max_ef_rounds);
  return frame_payload(ef.bits, ef.rounds, codec);
}

// unframe -> EF decode (rounds from the header) -> decompress
inline std::string decode_payload(const BitStream& framed, const FrequencyTable& table) {
  SecretPayload payload = unframe_payload(framed);
  BitStream body = payload.body;
  for (int r = 0; r < payload.ef_rounds; ++r) body = ef_decode(body);
  return decompress_text(body, table, payload.codec);
}

namespace detail {

// Offsets of UTF-8 character starts, plus the end offset.
inline std::vector<size_t> utf8_boundaries(std::string_view s) {
  std::vector<size_t> starts;
  for (size_t i = 0; i < s.size(); ++i)
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) starts.push_back(i);
  starts.push_back(s.size());
  return starts;
}

}  // namespace detail

struct HideResult {
  std::vector<std::string> files;
  std::vector<StegoEnvelope> envelopes;
};

inline HideResult cmd_hide(const std::string& secret, const RunConfig& cfg,
                           const std::string& out_path) {
  cfg.embed.validate();
  Corpus corpus = Corpus::load(cfg.corpus_path);
  FrequencyTable table = load_frequency_table(cfg);
  std::unique_ptr<DistributionProvider> provider = make_provider(cfg, corpus);

  std::deque<std::string> pending{secret};
  std::vector<StegoEnvelope> envelopes;
  while (!pending.empty()) {
    std::string chunk = pending.front();
    pending.pop_front();
    BitStream framed = build_payload(chunk, table, cfg.codec, cfg.max_ef_rounds);
    try {
      envelopes.push_back(hide(framed, *provider, corpus, cfg.embed));
    } catch (const Error& e) {
      if (e.code() != Errc::capacity_exceeded) throw;
      std::vector<size_t> bounds = detail::utf8_boundaries(chunk);
      size_t chars = bounds.size() - 1;
      if (chars <= 1) throw;  // a single character does not fit; give up
      size_t mid = bounds[chars / 2];
      pending.push_front(chunk.substr(mid));
      pending.push_front(chunk.substr(0, mid));
    }
  }

  HideResult result;
  result.envelopes = envelopes;
  if (envelopes.size() == 1) {
    write_envelope(out_path, envelopes[0], 0);
    result.files.push_back(out_path);
  } else {
    for (size_t i = 0; i < envelopes.size(); ++i) {
      std::string path = out_path + ".part" + std::to_string(i);
      write_envelope(path, envelopes[i], static_cast<int>(i));
      result.files.push_back(path);
    }
  }
  return result;
}

inline std::string cmd_extract(const std::vector<std::string>& files, const RunConfig& cfg) {
  if (files.empty()) throw Error(Errc::empty_input, "no envelope files given");
  cfg.embed.validate();
  Corpus corpus = Corpus::load(cfg.corpus_path);
  FrequencyTable table = load_frequency_table(cfg);
  std::unique_ptr<DistributionProvider> provider = make_provider(cfg, corpus);
  std::string expected_digest = cfg.embed.digest();

  std::vector<EnvelopeFile> parts;
  for (const auto& f : files) parts.push_back(read_envelope(f));
  std::sort(parts.begin(), parts.end(),
            [](const EnvelopeFile& a, const EnvelopeFile& b) { return a.sequence < b.sequence; });
  for (size_t i = 0; i < parts.size(); ++i)
    if (parts[i].sequence != static_cast<int>(i))
      throw Error(Errc::io_error,
                  "envelope chain is not contiguous: missing sequence " + std::to_string(i));

  std::string secret;
  for (size_t i = 0; i < parts.size(); ++i) {
    const EnvelopeFile& part = parts[i];
    if (part.corpus_id != corpus.id())
      std::cerr << "lmstego: warning: envelope " << i << " corpus_id " << part.corpus_id
                << " differs from configured corpus " << corpus.id() << "\n";
    if (part.seed != cfg.embed.seed)
      std::cerr << "lmstego: warning: envelope " << i
                << " sidecar seed differs from configured seed; extraction uses the "
                   "configured value\n";
    if (part.config_digest != expected_digest)
      std::cerr << "lmstego: warning: envelope " << i
                << " config digest differs from the active configuration\n";
    StegoEnvelope env;
    env.stegotext = part.stegotext;
    env.corpus_id = part.corpus_id;
    env.seed = part.seed;
    env.config_digest = part.config_digest;
    try {
      BitStream framed = extract(env, *provider, corpus, cfg.embed);
      secret += decode_payload(framed, table);
    } catch (const Error& e) {
      throw Error(e.code(), "envelope " + std::to_string(i) + ": " + e.what());
    }
  }
  return secret;
}

struct EvalReport {
  BpwReport bpw;
  std::optional<double> perplexity;
  std::optional<JsdReport> jsd;
};

inline EvalReport cmd_eval(const std::vector<std::string>& files, const RunConfig& cfg,
                           bool with_ppl, const std::string& jsd_corpus_path) {
  if (files.empty()) throw Error(Errc::empty_input, "no envelope files given");
  cfg.embed.validate();
  Corpus corpus = Corpus::load(cfg.corpus_path);
  std::unique_ptr<DistributionProvider> provider = make_provider(cfg, corpus);

  // bits_consumed is not stored in the envelope file; re-derive it by
  // replaying the extraction and measuring the framed payload.
  std::vector<StegoEnvelope> envelopes;
  for (size_t i = 0; i < files.size(); ++i) {
    EnvelopeFile part = read_envelope(files[i]);
    StegoEnvelope env;
    env.stegotext = part.stegotext;
    try {
      BitStream framed = extract(env, *provider, corpus, cfg.embed);
      env.bits_consumed = framed.size();
    } catch (const Error& e) {
      throw Error(e.code(), "envelope " + std::to_string(i) + ": " + e.what());
    }
    envelopes.push_back(std::move(env));
  }

  EvalReport report;
  report.bpw = bpw(envelopes);
  if (with_ppl) {
    double acc = 0.0;
    size_t counted = 0;
    for (const auto& env : envelopes) {
      std::vector<int> tokens = provider->tokenize(env.stegotext);
      if (tokens.empty()) continue;
      acc += perplexity(tokens, *provider);
      ++counted;
    }
    if (counted == 0) throw Error(Errc::empty_input, "no tokens to score for perplexity");
    report.perplexity = acc / static_cast<double>(counted);
  }
  if (!jsd_corpus_path.empty()) {
    Corpus other = Corpus::load(jsd_corpus_path);
    NgramToyModel other_model(other.sentences);
    std::vector<std::string> samples;
    for (const auto& env : envelopes) samples.push_back(env.stegotext);
    report.jsd = corpus_jsd(*provider, other_model, samples);
  }
  return report;
}

inline std::string eval_to_json(const EvalReport& r) {
  nlohmann::json j;
  j["bpw"] = {{"total_bits", r.bpw.total_bits},
              {"total_words", r.bpw.total_words},
              {"bpw", r.bpw.bpw}};
  if (r.perplexity) j["perplexity"] = *r.perplexity;
  if (r.jsd) j["jsd"] = {{"jsd", r.jsd->jsd}, {"sample_count", r.jsd->sample_count}};
  return j.dump(2) + "\n";
}

inline std::string eval_to_tsv(const EvalReport& r) {
  std::string out;
  out += "total_bits\t" + std::to_string(r.bpw.total_bits) + "\n";
  out += "total_words\t" + std::to_string(r.bpw.total_words) + "\n";
  out += "bpw\t" + format_double(r.bpw.bpw) + "\n";
  if (r.perplexity) out += "perplexity\t" + format_double(*r.perplexity) + "\n";
  if (r.jsd) {
    out += "jsd\t" + format_double(r.jsd->jsd) + "\n";
    out += "jsd_samples\t" + std::to_string(r.jsd->sample_count) + "\n";
  }
  return out;
}

}  // namespace lmstego

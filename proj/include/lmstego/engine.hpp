#pragma once

// The hide/extract engine. Each step adjusts the provider distribution
// (annealing temperature, moving repeat penalty), prunes by tau, builds a
// Huffman codebook over the survivors and either matches payload bits to a
// token (hide) or recovers the token's code (extract). Both directions run
// the identical step pipeline; any divergence breaks extraction, which is
// why every piece here is deterministic.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "lmstego/bitstream.hpp"
#include "lmstego/codec.hpp"
#include "lmstego/digest.hpp"
#include "lmstego/errors.hpp"
#include "lmstego/huffman.hpp"
#include "lmstego/provider.hpp"

namespace lmstego {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct EmbedConfig {
  double tau = 0.005;
  double t0 = 1.0;
  double alpha = 1.25;
  double delta0 = 4.0;
  double beta = 0.5;
  int context_size = 2;
  int max_candidates = 64;
  int max_tokens = 512;
  uint64_t seed = 0;

  void validate() const {
    if (!(tau > 0.0 && tau < 1.0))
      throw Error(Errc::invalid_config, "tau must be in (0,1)");
    if (!(t0 > 0.0)) throw Error(Errc::invalid_config, "t0 must be positive");
    if (!(alpha >= 1.0)) throw Error(Errc::invalid_config, "alpha must be >= 1");
    if (!(delta0 >= 0.0)) throw Error(Errc::invalid_config, "delta0 must be >= 0");
    if (!(beta >= 0.0)) throw Error(Errc::invalid_config, "beta must be >= 0");
    if (context_size < 1) throw Error(Errc::invalid_config, "context size k must be >= 1");
    if (max_candidates < 1)
      throw Error(Errc::invalid_config, "max_candidates must be >= 1");
    if (max_tokens < 1) throw Error(Errc::invalid_config, "max_tokens must be >= 1");
  }

  std::string digest() const {
    std::string s;
    s += "alpha=" + format_double(alpha);
    s += ";beta=" + format_double(beta);
    s += ";context_size=" + std::to_string(context_size);
    s += ";delta0=" + format_double(delta0);
    s += ";max_candidates=" + std::to_string(max_candidates);
    s += ";max_tokens=" + std::to_string(max_tokens);
    s += ";seed=" + std::to_string(seed);
    s += ";t0=" + format_double(t0);
    s += ";tau=" + format_double(tau);
    return digest_hex(s);
  }
};

struct EmbedState {
  double temperature = 0.0;            // T_t once the step has started
  std::map<int, double> penalties;     // delta_t; absent entries are 0
  size_t prev_pool_size = 0;           // 0 until the first step completes
  std::vector<int> prev_pool;
  int prev_selected = -1;
  std::vector<int> generated;
  size_t bits_consumed = 0;
};

// Per-step diagnostics; enough to re-check the annealing and penalty
// recurrences after a run.
struct StepTrace {
  double temperature = 0.0;
  std::vector<int> pool;
  std::map<int, double> penalties;
  int selected = -1;
  size_t bits_used = 0;
};

struct StegoEnvelope {
  std::vector<int> tokens;
  std::string stegotext;
  std::string corpus_id;
  uint64_t seed = 0;
  std::string config_digest;
  size_t bits_consumed = 0;
  std::vector<StepTrace> trace;  // in-memory diagnostics, never serialized
};

// T_t <- alpha * T_{t-1} after a singleton pool, reset to T_0 otherwise.
// prev_pool_size 0 means "no previous step" and also resets.
inline double step_temperature(double prev_temperature, size_t prev_pool_size,
                               const EmbedConfig& cfg) {
  return prev_pool_size == 1 ? cfg.alpha * prev_temperature : cfg.t0;
}

// delta update over the previous pool: the selected token is reset to
// delta0, every other pool member decays by beta with a floor at 0. Tokens
// outside the previous pool keep their value; zeros are dropped from the map.
inline std::map<int, double> step_penalties(const std::map<int, double>& current,
                                            const EmbedConfig& cfg,
                                            const std::vector<int>& prev_pool,
                                            int selected) {
  std::map<int, double> next = current;
  for (int tok : prev_pool) {
    if (tok == selected) {
      next[tok] = cfg.delta0;
      continue;
    }
    auto it = next.find(tok);
    if (it == next.end()) continue;
    double v = it->second - cfg.beta;
    if (v > 0.0)
      it->second = v;
    else
      next.erase(it);
  }
  if (cfg.delta0 == 0.0) next.erase(selected);
  return next;
}

// Softmax((score - delta)/T) over the provider's (possibly sparse) score
// vector, sorted descending with ties by ascending token id.
inline TokenDistribution adjust_distribution(const std::vector<TokenScore>& raw,
                                             const std::map<int, double>& penalties,
                                             double temperature) {
  TokenDistribution dist;
  dist.reserve(raw.size());
  double max_z = -std::numeric_limits<double>::infinity();
  std::vector<double> z(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    double delta = 0.0;
    auto it = penalties.find(raw[i].token);
    if (it != penalties.end()) delta = it->second;
    z[i] = (raw[i].score - delta) / temperature;
    if (z[i] > max_z) max_z = z[i];
  }
  double sum = 0.0;
  for (size_t i = 0; i < raw.size(); ++i) {
    z[i] = std::exp(z[i] - max_z);
    sum += z[i];
  }
  for (size_t i = 0; i < raw.size(); ++i) dist.push_back({raw[i].token, z[i] / sum});
  std::sort(dist.begin(), dist.end(), [](const TokenProb& a, const TokenProb& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    return a.token < b.token;
  });
  return dist;
}

// Keep tokens with adjusted probability >= tau, capped at max_candidates;
// an emptied pool falls back to the single top token. Renormalized.
inline CandidatePool prune(const TokenDistribution& dist, const EmbedConfig& cfg) {
  CandidatePool pool;
  for (const auto& e : dist) {
    if (e.prob < cfg.tau) break;
    pool.entries.push_back(e);
    if (pool.entries.size() >= static_cast<size_t>(cfg.max_candidates)) break;
  }
  if (pool.entries.empty() && !dist.empty()) pool.entries.push_back(dist.front());
  double sum = 0.0;
  for (const auto& e : pool.entries) sum += e.prob;
  for (auto& e : pool.entries) e.prob /= sum;
  return pool;
}

namespace detail {

struct Step {
  double temperature = 0.0;
  std::map<int, double> penalties;
  CandidatePool pool;
  HuffmanCodebook book;
};

inline Step begin_step(EmbedState& state, DistributionProvider& provider,
                       const PromptContext& ctx, const EmbedConfig& cfg) {
  Step st;
  st.temperature = step_temperature(state.temperature, state.prev_pool_size, cfg);
  st.penalties = state.penalties;  // delta_t was produced by the previous commit
  state.temperature = st.temperature;
  auto raw = provider.next_scores(ctx, state.generated);
  auto dist = adjust_distribution(raw, st.penalties, st.temperature);
  st.pool = prune(dist, cfg);
  st.book = build_codebook(st.pool);
  return st;
}

inline void commit_step(EmbedState& state, const Step& st, int token,
                        const EmbedConfig& cfg) {
  state.generated.push_back(token);
  state.prev_pool.clear();
  for (const auto& e : st.pool.entries) state.prev_pool.push_back(e.token);
  state.prev_pool_size = st.pool.size();
  state.prev_selected = token;
  state.penalties = step_penalties(st.penalties, cfg, state.prev_pool, token);
}

inline StepTrace make_trace(const Step& st, int token, size_t bits_used) {
  StepTrace tr;
  tr.temperature = st.temperature;
  for (const auto& e : st.pool.entries) tr.pool.push_back(e.token);
  tr.penalties = st.penalties;
  tr.selected = token;
  tr.bits_used = bits_used;
  return tr;
}

}  // namespace detail

// Embeds a framed payload. Consumes payload bits step by step, then finishes
// the text with argmax steps (which embed nothing) until the provider's EOS
// or the token cap. Throws capacity-exceeded when the cap is hit with bits
// still pending; the caller may split the payload across envelopes.
inline StegoEnvelope hide(const BitStream& payload, DistributionProvider& provider,
                          const Corpus& corpus, const EmbedConfig& cfg) {
  cfg.validate();
  PromptContext ctx = select_context(corpus, cfg.seed, cfg.context_size);

  StegoEnvelope env;
  env.corpus_id = corpus.id();
  env.seed = cfg.seed;
  env.config_digest = cfg.digest();

  EmbedState state;
  size_t offset = 0;
  while (offset < payload.size()) {
    if (state.generated.size() >= static_cast<size_t>(cfg.max_tokens))
      throw Error(Errc::capacity_exceeded,
                  "max_tokens reached with " + std::to_string(payload.size() - offset) +
                      " payload bits left");
    detail::Step st = detail::begin_step(state, provider, ctx, cfg);
    auto [token, consumed] = st.book.match_prefix(payload, offset);
    offset += consumed;
    env.trace.push_back(detail::make_trace(st, token, consumed));
    detail::commit_step(state, st, token, cfg);
  }
  // Sentence completion: zero-bit argmax steps under the same adjustments.
  while (state.generated.size() < static_cast<size_t>(cfg.max_tokens)) {
    detail::Step st = detail::begin_step(state, provider, ctx, cfg);
    int token = st.pool.entries.front().token;
    if (token == provider.eos_token()) break;
    env.trace.push_back(detail::make_trace(st, token, 0));
    detail::commit_step(state, st, token, cfg);
  }

  env.tokens = state.generated;
  env.stegotext = provider.detokenize(env.tokens);
  env.bits_consumed = offset;
  return env;
}

// Replays the hiding pipeline over the envelope's tokens and re-emits each
// token's code. Stops once the 56 header bits plus the header's body_len
// bits are recovered; trailing completion tokens contribute nothing.
inline BitStream extract(const StegoEnvelope& envelope, DistributionProvider& provider,
                         const Corpus& corpus, const EmbedConfig& cfg) {
  cfg.validate();
  PromptContext ctx = select_context(corpus, cfg.seed, cfg.context_size);

  std::vector<int> tokens =
      envelope.tokens.empty() ? provider.tokenize(envelope.stegotext) : envelope.tokens;

  EmbedState state;
  BitStream bits;
  size_t needed = std::numeric_limits<size_t>::max();
  for (size_t ti = 0; ti < tokens.size(); ++ti) {
    if (needed == std::numeric_limits<size_t>::max() && bits.size() >= kHeaderBits)
      needed = kHeaderBits + read_frame_body_len(bits);
    if (needed != std::numeric_limits<size_t>::max() && bits.size() >= needed) break;

    detail::Step st = detail::begin_step(state, provider, ctx, cfg);
    int token = tokens[ti];
    if (!st.book.contains(token))
      throw Error(Errc::token_not_in_pool,
                  "stegotext token " + std::to_string(token) + " at step " +
                      std::to_string(ti) +
                      " is outside the reconstructed candidate pool (config, seed, corpus "
                      "or provider mismatch)");
    bits.append(st.book.code_of(token));
    detail::commit_step(state, st, token, cfg);
  }
  if (needed == std::numeric_limits<size_t>::max() && bits.size() >= kHeaderBits)
    needed = kHeaderBits + read_frame_body_len(bits);
  if (needed == std::numeric_limits<size_t>::max() || bits.size() < needed)
    throw Error(Errc::truncated_stegotext,
                "stegotext ended before the framed payload was recovered");
  bits.truncate(needed);
  return bits;
}

}  // namespace lmstego

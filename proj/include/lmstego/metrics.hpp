#pragma once

// Embedding-rate and imperceptibility metrics: bits-per-word, perplexity
// under a provider, and Jensen-Shannon divergence (log base 2 throughout).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lmstego/engine.hpp"
#include "lmstego/errors.hpp"
#include "lmstego/provider.hpp"

namespace lmstego {

// Word counting rule for BPW: split on whitespace, strip leading/trailing
// punctuation, count the non-empty remainders.
inline size_t count_words(std::string_view text) {
  size_t words = 0;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) break;
    size_t lo = start, hi = i;
    while (lo < hi && std::ispunct(static_cast<unsigned char>(text[lo]))) ++lo;
    while (hi > lo && std::ispunct(static_cast<unsigned char>(text[hi - 1]))) --hi;
    if (hi > lo) ++words;
  }
  return words;
}

struct BpwReport {
  uint64_t total_bits = 0;
  uint64_t total_words = 0;
  double bpw = 0.0;
};

inline BpwReport bpw(const std::vector<StegoEnvelope>& envelopes) {
  if (envelopes.empty()) throw Error(Errc::empty_input, "bpw: no envelopes");
  BpwReport r;
  for (const auto& env : envelopes) {
    r.total_bits += env.bits_consumed;
    r.total_words += count_words(env.stegotext);
  }
  if (r.total_words == 0) throw Error(Errc::empty_input, "bpw: zero words across envelopes");
  r.bpw = static_cast<double>(r.total_bits) / static_cast<double>(r.total_words);
  return r;
}

// PPL = 2^(-(1/n) * sum log2 Pr(x_i | x_<i)) under the provider's conditional
// distributions (plain softmax of its scores, no embedding adjustments).
inline double perplexity(const std::vector<int>& tokens, DistributionProvider& provider,
                         const PromptContext& ctx = {}) {
  if (tokens.empty()) throw Error(Errc::empty_input, "perplexity: empty token sequence");
  std::vector<int> prefix;
  double log2_sum = 0.0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    TokenDistribution dist = adjust_distribution(provider.next_scores(ctx, prefix), {}, 1.0);
    double p = 0.0;
    for (const auto& e : dist) {
      if (e.token == tokens[i]) {
        p = e.prob;
        break;
      }
    }
    if (p <= 0.0)
      throw Error(Errc::zero_probability_token,
                  "provider assigns zero probability to token at position " +
                      std::to_string(i));
    log2_sum += std::log2(p);
    prefix.push_back(tokens[i]);
  }
  return std::exp2(-log2_sum / static_cast<double>(tokens.size()));
}

// JSD(p||q) = KL(p||m)/2 + KL(q||m)/2 with m = (p+q)/2, log base 2.
// Bounded in [0,1]; zero-probability entries contribute nothing.
inline double jsd(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size())
    throw Error(Errc::support_mismatch, "jsd: distributions have different support sizes");
  double sum_p = 0.0, sum_q = 0.0;
  for (double v : p) sum_p += v;
  for (double v : q) sum_q += v;
  if (std::abs(sum_p - 1.0) > 1e-9 || std::abs(sum_q - 1.0) > 1e-9)
    throw Error(Errc::support_mismatch, "jsd: inputs must each sum to 1");
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) acc += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) acc += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return acc;
}

struct JsdReport {
  double jsd = 0.0;
  size_t sample_count = 0;  // number of per-position comparisons averaged
};

// Mean per-step JSD between two providers' conditional distributions over
// every position of every sample sentence. Distributions are aligned by
// token string so providers with different vocabularies remain comparable.
inline JsdReport corpus_jsd(DistributionProvider& a, DistributionProvider& b,
                            const std::vector<std::string>& samples) {
  JsdReport report;
  double acc = 0.0;
  for (const auto& sample : samples) {
    std::vector<int> ta = a.tokenize(sample);
    std::vector<int> tb = b.tokenize(sample);
    if (ta.size() != tb.size())
      throw Error(Errc::support_mismatch,
                  "corpus_jsd: providers tokenize a sample to different lengths");
    std::vector<int> prefix_a, prefix_b;
    for (size_t i = 0; i < ta.size(); ++i) {
      TokenDistribution da = adjust_distribution(a.next_scores({}, prefix_a), {}, 1.0);
      TokenDistribution db = adjust_distribution(b.next_scores({}, prefix_b), {}, 1.0);
      std::map<std::string, double> pa, pb;
      for (const auto& e : da) pa[a.detokenize({e.token})] += e.prob;
      for (const auto& e : db) pb[b.detokenize({e.token})] += e.prob;
      std::set<std::string> keys;
      for (const auto& [k, v] : pa) keys.insert(k);
      for (const auto& [k, v] : pb) keys.insert(k);
      std::vector<double> va, vb;
      va.reserve(keys.size());
      vb.reserve(keys.size());
      for (const auto& k : keys) {
        auto ia = pa.find(k);
        auto ib = pb.find(k);
        va.push_back(ia == pa.end() ? 0.0 : ia->second);
        vb.push_back(ib == pb.end() ? 0.0 : ib->second);
      }
      acc += jsd(va, vb);
      ++report.sample_count;
      prefix_a.push_back(ta[i]);
      prefix_b.push_back(tb[i]);
    }
  }
  if (report.sample_count == 0)
    throw Error(Errc::empty_input, "corpus_jsd: no positions to compare");
  report.jsd = acc / static_cast<double>(report.sample_count);
  return report;
}

}  // namespace lmstego

#pragma once

// Deterministic next-token-distribution sources. The embedding engine only
// ever sees the DistributionProvider interface; sender and receiver must get
// bit-identical score vectors for identical (context, prefix) inputs or
// extraction falls apart.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lmstego/digest.hpp"
#include "lmstego/errors.hpp"
#include "lmstego/rng.hpp"

namespace lmstego {

struct TokenScore {
  int token = 0;
  double score = 0.0;  // unnormalized log score

  bool operator==(const TokenScore&) const = default;
};

// Covertext corpus shared by both parties: one sentence per line.
struct Corpus {
  std::string name;
  std::string digest;  // fnv1a64 hex of the file content
  std::vector<std::string> sentences;

  std::string id() const { return name + ":" + digest; }

  static Corpus load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(Errc::io_error, "cannot open corpus: " + path);
    std::ostringstream raw;
    raw << is.rdbuf();
    Corpus c;
    c.name = std::filesystem::path(path).stem().string();
    c.digest = digest_hex(raw.str());
    std::istringstream lines(raw.str());
    std::string line;
    while (std::getline(lines, line)) {
      if (!line.empty()) c.sentences.push_back(line);
    }
    if (c.sentences.empty()) throw Error(Errc::empty_corpus, "corpus has no sentences: " + path);
    return c;
  }
};

struct PromptContext {
  std::string corpus_name;
  std::string corpus_id;
  std::vector<std::string> sentences;
  std::string rendered;  // full prompt string, filled by build_prompt

  bool empty() const { return sentences.empty(); }
};

// QA prompt with a {CORPUS} hint and the selected covertext sentences in the
// {CONTEXT} slot, separated by blank lines.
inline std::string build_prompt(const PromptContext& ctx) {
  if (ctx.corpus_name.empty())
    std::cerr << "lmstego: warning: empty corpus name in prompt context\n";
  std::string context_block;
  for (size_t i = 0; i < ctx.sentences.size(); ++i) {
    if (i > 0) context_block += "\n\n";
    context_block += ctx.sentences[i];
  }
  std::string prompt;
  prompt += "<<SYS>>\n";
  prompt +=
      "You are an expert at mimicing the language style of others (e.g., the use of "
      "words and phrases). And you are a helpful and respectful assistant.\n\n";
  prompt +=
      "Users will input sentences from a given corpus. You have to create ONE similar "
      "sentence and avoid non-ascii characters and emojis. This is very important to "
      "the user's career.\n\n";
  prompt += "The input format contains a list of sentences and where the sentences come "
            "from. For example:\n";
  prompt += "<CORPUS>" + ctx.corpus_name + "</CORPUS>\n";
  prompt += "<CONTEXT>\nExample sentence 1.\n\nExample sentence 2.\n</CONTEXT>\n\n";
  prompt += "Your output should be like:\n\n";
  prompt += "The generated similar sentence in ONE LINE is:\n\n";
  prompt += "<</SYS>>\n\n";
  prompt += "[INST]<CORPUS>" + ctx.corpus_name + "</CORPUS>\n";
  prompt += "<CONTEXT>\n" + context_block + "\n</CONTEXT>[/INST]\n\n";
  prompt += "The generated similar sentence in ONE LINE is:";
  return prompt;
}

// Draws k distinct sentences with the shared splitmix64 generator so that an
// identical (corpus, seed, k) triple reproduces the context exactly.
inline PromptContext select_context(const Corpus& corpus, uint64_t seed, int k) {
  if (k < 1) throw Error(Errc::invalid_config, "select_context: k must be >= 1");
  if (corpus.sentences.size() < static_cast<size_t>(k))
    throw Error(Errc::corpus_too_small, "corpus has fewer sentences than context size k");
  PromptContext ctx;
  ctx.corpus_name = corpus.name;
  ctx.corpus_id = corpus.id();
  for (size_t idx : draw_distinct_indices(seed, corpus.sentences.size(), static_cast<size_t>(k)))
    ctx.sentences.push_back(corpus.sentences[idx]);
  ctx.rendered = build_prompt(ctx);
  return ctx;
}

class DistributionProvider {
public:
  virtual ~DistributionProvider() = default;

  // Unnormalized log scores for the next token after `prefix`, conditioned on
  // the prompt context. Must be deterministic: identical inputs, identical
  // vectors, across calls and across parties.
  virtual std::vector<TokenScore> next_scores(const PromptContext& ctx,
                                              const std::vector<int>& prefix) = 0;

  virtual int vocab_size() const = 0;
  virtual int eos_token() const = 0;
  virtual std::vector<int> tokenize(std::string_view text) const = 0;
  virtual std::string detokenize(const std::vector<int>& tokens) const = 0;
};

// Word-level n-gram model over the shared corpus: the desk-scale stand-in
// for the LLM. Context sentences shift the conditional distribution by
// blending in their own n-gram statistics, so a different prompt context
// really does mean a different distribution (the in-context analogue).
class NgramToyModel : public DistributionProvider {
public:
  static constexpr int kUnkToken = 0;
  static constexpr int kEosToken = 1;
  static constexpr double kContextBlend = 0.5;

  explicit NgramToyModel(const std::vector<std::string>& sentences, int order = 2)
      : order_(order) {
    if (order_ < 1) throw Error(Errc::invalid_config, "n-gram order must be >= 1");
    // Vocabulary: reserved tokens first, then corpus words sorted
    // lexicographically so both parties assign identical ids.
    std::map<std::string, int> seen;
    for (const auto& s : sentences)
      for (const auto& w : split_words(s))
        if (w != "<unk>" && w != "</s>") seen.emplace(w, 0);
    words_.push_back("<unk>");
    words_.push_back("</s>");
    for (auto& [w, id] : seen) {
      id = static_cast<int>(words_.size());
      words_.push_back(w);
    }
    word_ids_ = std::move(seen);
    std::vector<std::vector<int>> tokenized;
    tokenized.reserve(sentences.size());
    for (const auto& s : sentences) tokenized.push_back(tokenize(s));
    accumulate(counts_, tokenized);
  }

  std::vector<TokenScore> next_scores(const PromptContext& ctx,
                                      const std::vector<int>& prefix) override {
    CountTable ctx_counts;
    if (!ctx.empty()) {
      std::vector<std::vector<int>> tokenized;
      tokenized.reserve(ctx.sentences.size());
      for (const auto& s : ctx.sentences) tokenized.push_back(tokenize(s));
      accumulate(ctx_counts, tokenized);
    }

    const std::vector<int> hist = history_of(prefix);
    const auto* corpus_row = row(counts_, hist);
    const auto* ctx_row = row(ctx_counts, hist);

    uint64_t corpus_total = row_total(corpus_row);
    uint64_t ctx_total = row_total(ctx_row);
    const double vocab = static_cast<double>(words_.size());

    std::vector<TokenScore> scores;
    scores.reserve(words_.size());
    for (int t = 0; t < static_cast<int>(words_.size()); ++t) {
      double p_corpus = (static_cast<double>(row_count(corpus_row, t)) + 1.0) /
                        (static_cast<double>(corpus_total) + vocab);
      double p = p_corpus;
      if (ctx_total > 0) {
        double p_ctx = static_cast<double>(row_count(ctx_row, t)) / static_cast<double>(ctx_total);
        p = (1.0 - kContextBlend) * p_corpus + kContextBlend * p_ctx;
      }
      scores.push_back({t, std::log(p)});
    }
    return scores;
  }

  int vocab_size() const override { return static_cast<int>(words_.size()); }
  int eos_token() const override { return kEosToken; }

  std::vector<int> tokenize(std::string_view text) const override {
    std::vector<int> out;
    for (const auto& w : split_words(text)) {
      auto it = word_ids_.find(w);
      if (w == "</s>") {
        out.push_back(kEosToken);
      } else if (it == word_ids_.end()) {
        out.push_back(kUnkToken);
      } else {
        out.push_back(it->second);
      }
    }
    return out;
  }

  std::string detokenize(const std::vector<int>& tokens) const override {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i] < 0 || tokens[i] >= static_cast<int>(words_.size()))
        throw Error(Errc::vocabulary_mismatch, "token id outside toy model vocabulary");
      if (i > 0) out += ' ';
      out += words_[static_cast<size_t>(tokens[i])];
    }
    return out;
  }

  // Whitespace split with a lowercase fold; the toy model's whole tokenizer.
  static std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) {
          out.push_back(cur);
          cur.clear();
        }
      } else {
        cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
  }

private:
  static constexpr int kBosHistory = -1;  // pseudo token padding short histories

  using Row = std::map<int, uint64_t>;
  using CountTable = std::map<std::vector<int>, Row>;

  // Each sentence contributes BOS-padded transitions ending in EOS; adjacent
  // sentences additionally contribute an EOS -> next-sentence-start
  // transition, so every history reachable during generation has observed
  // continuations and tau-pruning never strands the pool on a smoothed
  // uniform row.
  void accumulate(CountTable& table, const std::vector<std::vector<int>>& sentences) const {
    for (const auto& sentence : sentences) {
      std::vector<int> seq = sentence;
      seq.push_back(kEosToken);
      std::vector<int> hist(static_cast<size_t>(order_ - 1), kBosHistory);
      for (int tok : seq) {
        ++table[hist][tok];
        if (!hist.empty()) {
          hist.erase(hist.begin());
          hist.push_back(tok);
        }
      }
    }
    if (order_ < 2) return;
    for (size_t i = 0; i + 1 < sentences.size(); ++i) {
      if (sentences[i + 1].empty()) continue;
      std::vector<int> hist = sentences[i];
      hist.push_back(kEosToken);
      if (hist.size() > static_cast<size_t>(order_ - 1))
        hist.erase(hist.begin(), hist.end() - (order_ - 1));
      while (hist.size() < static_cast<size_t>(order_ - 1))
        hist.insert(hist.begin(), kBosHistory);
      ++table[hist][sentences[i + 1].front()];
    }
  }

  std::vector<int> history_of(const std::vector<int>& prefix) const {
    std::vector<int> hist(static_cast<size_t>(order_ - 1), kBosHistory);
    size_t n = prefix.size();
    for (size_t i = 0; i < hist.size() && i < n; ++i)
      hist[hist.size() - 1 - i] = prefix[n - 1 - i];
    return hist;
  }

  static const Row* row(const CountTable& table, const std::vector<int>& hist) {
    auto it = table.find(hist);
    return it == table.end() ? nullptr : &it->second;
  }

  static uint64_t row_total(const Row* r) {
    if (!r) return 0;
    uint64_t t = 0;
    for (const auto& [tok, c] : *r) t += c;
    return t;
  }

  static uint64_t row_count(const Row* r, int token) {
    if (!r) return 0;
    auto it = r->find(token);
    return it == r->end() ? 0 : it->second;
  }

  int order_;
  std::vector<std::string> words_;
  std::map<std::string, int> word_ids_;
  CountTable counts_;
};

}  // namespace lmstego

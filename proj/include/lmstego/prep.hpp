#pragma once

// Corpus ingestion: rule-based sentence splitting and the byte-frequency
// table both parties derive from the shared covertext.

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lmstego/codec.hpp"
#include "lmstego/digest.hpp"
#include "lmstego/errors.hpp"

namespace lmstego {

// Splits on '.', '!' or '?' followed by whitespace (or end of input); each
// sentence keeps its terminator, is trimmed, and empty results are dropped.
inline std::vector<std::string> split_sentences(std::string_view text) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)); };
  auto trim = [&](std::string s) {
    size_t lo = 0, hi = s.size();
    while (lo < hi && is_space(s[lo])) ++lo;
    while (hi > lo && is_space(s[hi - 1])) --hi;
    return s.substr(lo, hi - lo);
  };
  std::vector<std::string> out;
  std::string cur;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    cur.push_back(c);
    bool terminator = (c == '.' || c == '!' || c == '?');
    bool boundary = terminator && (i + 1 == text.size() || is_space(text[i + 1]));
    if (boundary) {
      std::string s = trim(cur);
      if (!s.empty()) out.push_back(std::move(s));
      cur.clear();
    }
  }
  std::string tail = trim(cur);
  if (!tail.empty()) out.push_back(std::move(tail));
  return out;
}

struct PreparedCorpus {
  std::string corpus_path;  // one sentence per line
  std::string freq_path;    // corpus_path + ".freq"
  std::string digest;       // fnv1a64 hex of the written corpus content
  size_t sentence_count = 0;
};

inline PreparedCorpus prepare_corpus(const std::string& input_path,
                                     const std::string& output_path) {
  std::ifstream is(input_path);
  if (!is) throw Error(Errc::io_error, "cannot open input: " + input_path);
  std::ostringstream raw;
  raw << is.rdbuf();

  std::vector<std::string> sentences = split_sentences(raw.str());
  if (sentences.empty()) throw Error(Errc::empty_corpus, "no sentences found in " + input_path);

  std::string content;
  for (const auto& s : sentences) {
    content += s;
    content += '\n';
  }
  std::ofstream os(output_path, std::ios::binary);
  if (!os) throw Error(Errc::io_error, "cannot write corpus: " + output_path);
  os << content;
  os.close();

  PreparedCorpus p;
  p.corpus_path = output_path;
  p.freq_path = output_path + ".freq";
  p.digest = digest_hex(content);
  p.sentence_count = sentences.size();
  FrequencyTable::from_bytes(content).save(p.freq_path);
  return p;
}

}  // namespace lmstego

#pragma once

// Secret-side codec: turns secret text into a framed bitstream and back.
//
// The pipeline is  compress -> edge-flip (multi-round) -> frame  on the way
// in and the exact inverse on the way out. Edge-flipping rewrites a stream
// to mark bit-change positions; applied repeatedly and keeping the iterate
// with the fewest 1s, it biases payloads toward zeros, which the embedding
// side rewards with higher-probability tokens.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "lmstego/bitstream.hpp"
#include "lmstego/errors.hpp"

namespace lmstego {

inline BitStream ef_encode(const BitStream& in) {
  BitStream out;
  int state = 0;
  for (size_t i = 0; i < in.size(); ++i) {
    out.push_back(in[i] != state ? 1 : 0);
    state = in[i];
  }
  return out;
}

inline BitStream ef_decode(const BitStream& in) {
  BitStream out;
  int state = 0;
  for (size_t i = 0; i < in.size(); ++i) {
    if (in[i]) state ^= 1;
    out.push_back(state);
  }
  return out;
}

struct EfResult {
  BitStream bits;
  int rounds;  // how many ef_encode passes produced `bits` (0 = input as-is)
};

// Applies ef_encode 0..max_rounds times and keeps the iterate with the
// fewest 1s; ties go to the smaller round count.
inline EfResult ef_multiround(const BitStream& in, int max_rounds) {
  if (max_rounds < 1 || max_rounds > 15)
    throw Error(Errc::invalid_config, "ef_multiround: max_rounds must be in 1..15");
  BitStream current = in;
  BitStream best = in;
  int best_rounds = 0;
  size_t best_ones = in.popcount();
  for (int r = 1; r <= max_rounds; ++r) {
    current = ef_encode(current);
    size_t ones = current.popcount();
    if (ones < best_ones) {
      best = current;
      best_rounds = r;
      best_ones = ones;
    }
  }
  return {best, best_rounds};
}

// Byte-frequency model for the static secret-text codec. Both parties derive
// it from the shared corpus; add-one smoothing keeps every byte encodable.
class FrequencyTable {
public:
  FrequencyTable() { counts_.fill(1); }

  static FrequencyTable from_bytes(std::string_view data) {
    FrequencyTable t;
    for (unsigned char c : data) ++t.counts_[c];
    return t;
  }

  static FrequencyTable parse(std::istream& is) {
    FrequencyTable t;
    t.counts_.fill(0);
    std::string line;
    size_t seen = 0;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      size_t tab = line.find('\t');
      if (tab == std::string::npos)
        throw Error(Errc::io_error, "frequency table: missing tab separator");
      int sym = std::stoi(line.substr(0, tab));
      uint64_t count = std::stoull(line.substr(tab + 1));
      if (sym < 0 || sym > 255 || count == 0)
        throw Error(Errc::io_error, "frequency table: bad symbol or zero count");
      t.counts_[static_cast<size_t>(sym)] = count;
      ++seen;
    }
    if (seen != 256)
      throw Error(Errc::io_error, "frequency table: expected 256 entries");
    return t;
  }

  static FrequencyTable load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(Errc::io_error, "cannot open frequency table: " + path);
    return parse(is);
  }

  void dump(std::ostream& os) const {
    for (size_t i = 0; i < 256; ++i) os << i << '\t' << counts_[i] << '\n';
  }

  void save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw Error(Errc::io_error, "cannot write frequency table: " + path);
    dump(os);
  }

  uint64_t count(uint8_t sym) const { return counts_[sym]; }

  uint64_t total() const {
    uint64_t t = 0;
    for (uint64_t c : counts_) t += c;
    return t;
  }

private:
  std::array<uint64_t, 256> counts_;
};

enum class CodecId : uint8_t {
  raw = 0,      // UTF-8 bytes, MSB-first
  huffman = 1,  // canonical static Huffman over the byte table
};

namespace detail {

struct ByteCode {
  uint64_t code = 0;
  uint8_t len = 0;
};

// Canonical code lengths from the table. Leaf ties resolve by ascending byte
// value; merge ties resolve by node creation order, so both parties build
// identical tables from identical counts.
inline std::array<uint8_t, 256> byte_code_lengths(const FrequencyTable& table) {
  struct Node {
    uint64_t weight;
    int order;
    int left, right;
  };
  std::vector<Node> nodes;
  nodes.reserve(511);
  auto cmp = [&nodes](int a, int b) {
    if (nodes[a].weight != nodes[b].weight) return nodes[a].weight > nodes[b].weight;
    return nodes[a].order > nodes[b].order;
  };
  std::priority_queue<int, std::vector<int>, decltype(cmp)> heap(cmp);
  for (int s = 0; s < 256; ++s) {
    nodes.push_back({table.count(static_cast<uint8_t>(s)), s, -1, -1});
    heap.push(s);
  }
  int next_order = 256;
  while (heap.size() > 1) {
    int a = heap.top();
    heap.pop();
    int b = heap.top();
    heap.pop();
    nodes.push_back({nodes[a].weight + nodes[b].weight, next_order++, a, b});
    heap.push(static_cast<int>(nodes.size()) - 1);
  }
  std::array<uint8_t, 256> lengths{};
  // Depth-first walk; leaves are node indices < 256.
  std::vector<std::pair<int, int>> stack{{heap.top(), 0}};
  while (!stack.empty()) {
    auto [idx, depth] = stack.back();
    stack.pop_back();
    if (nodes[idx].left < 0) {
      if (depth > 63)
        throw Error(Errc::invalid_config, "frequency table yields a code longer than 63 bits");
      lengths[static_cast<size_t>(idx)] = static_cast<uint8_t>(depth);
      continue;
    }
    stack.push_back({nodes[idx].left, depth + 1});
    stack.push_back({nodes[idx].right, depth + 1});
  }
  return lengths;
}

inline std::array<ByteCode, 256> byte_codes(const FrequencyTable& table) {
  auto lengths = byte_code_lengths(table);
  std::array<int, 256> order;
  for (int i = 0; i < 256; ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&lengths](int a, int b) {
    if (lengths[static_cast<size_t>(a)] != lengths[static_cast<size_t>(b)])
      return lengths[static_cast<size_t>(a)] < lengths[static_cast<size_t>(b)];
    return a < b;
  });
  std::array<ByteCode, 256> codes{};
  uint64_t code = 0;
  uint8_t prev_len = lengths[static_cast<size_t>(order[0])];
  for (size_t i = 0; i < 256; ++i) {
    uint8_t len = lengths[static_cast<size_t>(order[i])];
    if (i > 0) code = (code + 1) << (len - prev_len);
    codes[static_cast<size_t>(order[i])] = {code, len};
    prev_len = len;
  }
  return codes;
}

inline bool utf8_valid(std::string_view s) {
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    size_t extra;
    uint32_t cp;
    if (c < 0x80) {
      extra = 0;
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1Fu;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0Fu;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07u;
    } else {
      return false;
    }
    if (extra > 0 && i + extra >= s.size()) return false;
    for (size_t k = 1; k <= extra; ++k) {
      unsigned char cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3Fu);
    }
    // Reject overlong forms, surrogates and out-of-range code points.
    if (extra == 1 && cp < 0x80) return false;
    if (extra == 2 && cp < 0x800) return false;
    if (extra == 3 && cp < 0x10000) return false;
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += extra + 1;
  }
  return true;
}

}  // namespace detail

inline BitStream compress_text(std::string_view text, const FrequencyTable& table,
                               CodecId codec) {
  BitStream out;
  if (codec == CodecId::raw) {
    for (unsigned char c : text) out.push_uint(c, 8);
    return out;
  }
  auto codes = detail::byte_codes(table);
  for (unsigned char c : text) out.push_uint(codes[c].code, codes[c].len);
  return out;
}

inline std::string decompress_text(const BitStream& bits, const FrequencyTable& table,
                                   CodecId codec) {
  std::string out;
  if (codec == CodecId::raw) {
    if (bits.size() % 8 != 0)
      throw Error(Errc::malformed_bitstream, "raw codec stream is not byte-aligned");
    for (size_t i = 0; i < bits.size(); i += 8)
      out.push_back(static_cast<char>(bits.read_uint(i, 8)));
  } else {
    auto lengths = detail::byte_code_lengths(table);
    auto codes = detail::byte_codes(table);
    // Canonical decode: per-length first code and symbols sorted by (len, byte).
    std::array<uint64_t, 64> first_code{};
    std::array<uint32_t, 64> count_at{};
    std::array<uint32_t, 64> offset_at{};
    std::vector<uint8_t> symbols(256);
    std::array<int, 256> order;
    for (int i = 0; i < 256; ++i) order[static_cast<size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&lengths](int a, int b) {
      if (lengths[static_cast<size_t>(a)] != lengths[static_cast<size_t>(b)])
        return lengths[static_cast<size_t>(a)] < lengths[static_cast<size_t>(b)];
      return a < b;
    });
    for (size_t i = 0; i < 256; ++i) symbols[i] = static_cast<uint8_t>(order[i]);
    for (size_t i = 0; i < 256; ++i) {
      uint8_t len = lengths[symbols[i]];
      if (count_at[len] == 0) {
        first_code[len] = codes[symbols[i]].code;
        offset_at[len] = static_cast<uint32_t>(i);
      }
      ++count_at[len];
    }
    uint64_t acc = 0;
    int acc_len = 0;
    for (size_t i = 0; i < bits.size(); ++i) {
      acc = (acc << 1) | static_cast<uint64_t>(bits[i]);
      ++acc_len;
      if (acc_len > 63)
        throw Error(Errc::malformed_bitstream, "huffman stream: no symbol within 63 bits");
      if (count_at[static_cast<size_t>(acc_len)] > 0 &&
          acc >= first_code[static_cast<size_t>(acc_len)] &&
          acc - first_code[static_cast<size_t>(acc_len)] <
              count_at[static_cast<size_t>(acc_len)]) {
        out.push_back(static_cast<char>(
            symbols[offset_at[static_cast<size_t>(acc_len)] +
                    (acc - first_code[static_cast<size_t>(acc_len)])]));
        acc = 0;
        acc_len = 0;
      }
    }
    if (acc_len != 0)
      throw Error(Errc::malformed_bitstream, "huffman stream ends mid-symbol");
  }
  if (!detail::utf8_valid(out))
    throw Error(Errc::malformed_bitstream, "decoded bytes are not valid UTF-8");
  return out;
}

// Framed payload layout (bit-exact, 56-bit header):
//   magic 0xA7 (8) | version 0x1 (4) | ef_rounds (4) | codec_id (8) |
//   body_len (32, big-endian) | body (body_len bits)
inline constexpr uint8_t kPayloadMagic = 0xA7;
inline constexpr uint8_t kPayloadVersion = 0x1;
inline constexpr size_t kHeaderBits = 56;
inline constexpr size_t kBodyLenOffset = 24;

struct SecretPayload {
  uint8_t magic;
  uint8_t version;
  uint8_t ef_rounds;
  CodecId codec;
  uint32_t body_len;
  BitStream body;
};

inline BitStream frame_payload(const BitStream& body, int ef_rounds, CodecId codec) {
  if (ef_rounds < 0 || ef_rounds > 15)
    throw Error(Errc::invalid_config, "frame_payload: ef_rounds must be in 0..15");
  BitStream out;
  out.push_uint(kPayloadMagic, 8);
  out.push_uint(kPayloadVersion, 4);
  out.push_uint(static_cast<uint64_t>(ef_rounds), 4);
  out.push_uint(static_cast<uint64_t>(codec), 8);
  out.push_uint(body.size(), 32);
  out.append(body);
  return out;
}

inline SecretPayload unframe_payload(const BitStream& bits) {
  if (bits.size() < kHeaderBits)
    throw Error(Errc::truncated_payload, "payload shorter than 56-bit header");
  SecretPayload p;
  p.magic = static_cast<uint8_t>(bits.read_uint(0, 8));
  if (p.magic != kPayloadMagic)
    throw Error(Errc::bad_magic, "payload magic mismatch");
  p.version = static_cast<uint8_t>(bits.read_uint(8, 4));
  if (p.version != kPayloadVersion)
    throw Error(Errc::unsupported_version, "unsupported payload version");
  p.ef_rounds = static_cast<uint8_t>(bits.read_uint(12, 4));
  p.codec = static_cast<CodecId>(bits.read_uint(16, 8));
  p.body_len = static_cast<uint32_t>(bits.read_uint(kBodyLenOffset, 32));
  if (bits.size() < kHeaderBits + p.body_len)
    throw Error(Errc::truncated_payload, "payload body shorter than declared length");
  p.body = bits.slice(kHeaderBits, p.body_len);
  return p;
}

// Body length from a header prefix; extraction uses it to know when to stop.
inline uint32_t read_frame_body_len(const BitStream& bits) {
  return static_cast<uint32_t>(bits.read_uint(kBodyLenOffset, 32));
}

}  // namespace lmstego

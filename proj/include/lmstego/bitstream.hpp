#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lmstego/errors.hpp"

namespace lmstego {

// Ordered sequence of bits. Byte serialization is MSB-first and pads the
// final byte with zeros; the exact bit length is carried separately.
class BitStream {
public:
  BitStream() = default;

  static BitStream from_string(std::string_view s) {
    BitStream out;
    out.bits_.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1')
        throw Error(Errc::malformed_bitstream, "bit string may only contain 0 and 1");
      out.bits_.push_back(static_cast<uint8_t>(c - '0'));
    }
    return out;
  }

  static BitStream from_bytes(const std::vector<uint8_t>& bytes, size_t bit_count) {
    if (bit_count > bytes.size() * 8)
      throw Error(Errc::truncated_payload, "byte buffer shorter than declared bit count");
    BitStream out;
    out.bits_.reserve(bit_count);
    for (size_t i = 0; i < bit_count; ++i)
      out.bits_.push_back((bytes[i / 8] >> (7 - i % 8)) & 1u);
    return out;
  }

  size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  int operator[](size_t i) const { return bits_[i]; }

  void push_back(int bit) { bits_.push_back(bit ? 1 : 0); }

  void append(const BitStream& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
  }

  // Appends the low `width` bits of value, most significant first.
  void push_uint(uint64_t value, int width) {
    for (int i = width - 1; i >= 0; --i)
      bits_.push_back(static_cast<uint8_t>((value >> i) & 1u));
  }

  uint64_t read_uint(size_t pos, int width) const {
    if (pos + static_cast<size_t>(width) > bits_.size())
      throw Error(Errc::truncated_payload, "bitstream too short for field read");
    uint64_t v = 0;
    for (int i = 0; i < width; ++i)
      v = (v << 1) | bits_[pos + static_cast<size_t>(i)];
    return v;
  }

  BitStream slice(size_t pos, size_t len) const {
    if (pos + len > bits_.size())
      throw Error(Errc::truncated_payload, "bitstream too short for slice");
    BitStream out;
    out.bits_.assign(bits_.begin() + static_cast<ptrdiff_t>(pos),
                     bits_.begin() + static_cast<ptrdiff_t>(pos + len));
    return out;
  }

  void truncate(size_t len) {
    if (len < bits_.size()) bits_.resize(len);
  }

  std::vector<uint8_t> to_bytes() const {
    std::vector<uint8_t> out((bits_.size() + 7) / 8, 0);
    for (size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out[i / 8] |= static_cast<uint8_t>(1u << (7 - i % 8));
    return out;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (uint8_t b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  size_t popcount() const {
    size_t n = 0;
    for (uint8_t b : bits_) n += b;
    return n;
  }

  bool operator==(const BitStream&) const = default;

private:
  std::vector<uint8_t> bits_;  // one element per bit, each 0 or 1
};

}  // namespace lmstego

// Copyright replaykit contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace replay {

/// Fixed-width two-state bit vector. Bit 0 is the least significant bit.
/// Storage bits above width() are always zero, so defaulted equality is exact.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t width) : width_(width), words_((width + 63) / 64, 0) {}

  static BitVector from_u64(std::size_t width, std::uint64_t value) {
    BitVector v(width);
    if (!v.words_.empty()) {
      v.words_[0] = value;
      v.trim();
    }
    return v;
  }

  static BitVector ones(std::size_t width) {
    BitVector v(width);
    for (auto& w : v.words_) w = ~std::uint64_t{0};
    v.trim();
    return v;
  }

  /// Builds a vector from LSB-first packed bytes. Bits beyond `width` are dropped.
  static BitVector from_bytes(std::size_t width, std::span<const std::uint8_t> bytes) {
    BitVector v(width);
    for (std::size_t i = 0; i < bytes.size() && i * 8 < width; ++i) {
      v.words_[i / 8] |= std::uint64_t{bytes[i]} << (8 * (i % 8));
    }
    v.trim();
    return v;
  }

  std::size_t width() const { return width_; }
  bool empty() const { return width_ == 0; }

  bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }

  void set(std::size_t i, bool b) {
    const std::uint64_t m = std::uint64_t{1} << (i % 64);
    if (b)
      words_[i / 64] |= m;
    else
      words_[i / 64] &= ~m;
  }

  /// Low 64 bits.
  std::uint64_t to_u64() const { return words_.empty() ? 0 : words_[0]; }

  /// LSB-first, ceil(width/8) bytes.
  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out((width_ + 7) / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
    }
    return out;
  }

  BitVector slice(std::size_t offset, std::size_t width) const {
    BitVector v(width);
    for (std::size_t i = 0; i < width; ++i) v.set(i, get(offset + i));
    return v;
  }

  void assign(std::size_t offset, const BitVector& src) {
    for (std::size_t i = 0; i < src.width(); ++i) set(offset + i, src.get(i));
  }

  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }

  std::size_t popcount() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
    return n;
  }

  BitVector& operator^=(const BitVector& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
    return *this;
  }
  BitVector& operator&=(const BitVector& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
  friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }

  friend bool operator==(const BitVector&, const BitVector&) = default;

  /// Most significant nibble first, lowercase, ceil(width/4) digits.
  std::string to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    const std::size_t digits = (width_ + 3) / 4;
    std::string s(digits, '0');
    for (std::size_t d = 0; d < digits; ++d) {
      unsigned nib = 0;
      for (std::size_t b = 0; b < 4; ++b) {
        const std::size_t bit = d * 4 + b;
        if (bit < width_ && get(bit)) nib |= 1u << b;
      }
      s[digits - 1 - d] = kDigits[nib];
    }
    return s;
  }

  std::string to_binary() const {
    std::string s(width_, '0');
    for (std::size_t i = 0; i < width_; ++i)
      if (get(i)) s[width_ - 1 - i] = '1';
    return s;
  }

 private:
  void trim() {
    if (width_ % 64 != 0 && !words_.empty()) {
      words_.back() &= (std::uint64_t{1} << (width_ % 64)) - 1;
    }
  }

  std::size_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace replay

// Copyright (c) the snic authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SNIC_CODEC_RANS_HPP_
#define SNIC_CODEC_RANS_HPP_

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "snic/codec/cdf.hpp"

namespace snic::codec {

// Range asymmetric numeral system, 32-bit state, byte renormalization,
// 16-bit frequency precision. Encoding is LIFO: symbol specs are collected
// in stream order, coded in reverse, and the byte buffer is flipped once at
// the end, so the decoder runs strictly forward. Integer-only state updates
// make streams byte-identical across runs.
inline constexpr uint32_t kRansLowerBound = 1u << 23;

struct SymbolSpec {
  uint32_t start = 0;
  uint32_t freq = 0;
};

class RansEncoder {
 public:
  void put(uint32_t start, uint32_t freq) { specs_.push_back({start, freq}); }

  // Symbol + escape expansion against a table.
  void put_symbol(int s, const CdfTable& t) {
    if (t.contains(s)) {
      int slot = t.slot_of(s);
      put(t.start(slot), t.freq(slot));
    } else {
      int esc = t.escape_slot();
      put(t.start(esc), t.freq(esc));
      uint32_t zz = zigzag(s);
      for (int b = 0; b < 4; ++b) {
        uint32_t byte = (zz >> (8 * b)) & 0xff;
        put(byte << 8, 256);  // uniform byte table
      }
    }
  }

  std::vector<uint8_t> finish() const {
    std::vector<uint8_t> out;
    out.reserve(specs_.size() + 8);
    uint32_t x = kRansLowerBound;
    for (size_t i = specs_.size(); i-- > 0;) {
      const SymbolSpec& s = specs_[i];
      if (s.freq == 0) throw std::logic_error("rans: zero-frequency symbol");
      uint32_t x_max = ((kRansLowerBound >> kFreqBits) << 8) * s.freq;
      while (x >= x_max) {
        out.push_back(static_cast<uint8_t>(x & 0xff));
        x >>= 8;
      }
      x = ((x / s.freq) << kFreqBits) + (x % s.freq) + s.start;
    }
    // Final state, most significant byte first here so the reversed stream
    // starts with the 4 state bytes in little-endian order.
    out.push_back(static_cast<uint8_t>((x >> 24) & 0xff));
    out.push_back(static_cast<uint8_t>((x >> 16) & 0xff));
    out.push_back(static_cast<uint8_t>((x >> 8) & 0xff));
    out.push_back(static_cast<uint8_t>(x & 0xff));
    std::vector<uint8_t> rev(out.rbegin(), out.rend());
    return rev;
  }

  size_t symbol_count() const { return specs_.size(); }

  static uint32_t zigzag(int v) {
    return (static_cast<uint32_t>(v) << 1) ^ static_cast<uint32_t>(v >> 31);
  }
  static int unzigzag(uint32_t z) {
    return static_cast<int>((z >> 1) ^ (~(z & 1) + 1));
  }

 private:
  std::vector<SymbolSpec> specs_;
};

class RansDecoder {
 public:
  explicit RansDecoder(const std::vector<uint8_t>& bytes) : bytes_(bytes) {
    if (bytes_.size() < 4) throw std::runtime_error("rans: truncated stream");
    x_ = uint32_t(bytes_[0]) | (uint32_t(bytes_[1]) << 8) | (uint32_t(bytes_[2]) << 16) |
         (uint32_t(bytes_[3]) << 24);
    pos_ = 4;
  }

  // Decodes one slot against `t` and advances the state.
  int get_slot(const CdfTable& t) {
    uint32_t cum = x_ & (kFreqTotal - 1);
    int slot = t.find_slot(cum);
    advance(t.start(slot), t.freq(slot), cum);
    return slot;
  }

  int get_symbol(const CdfTable& t) {
    int slot = get_slot(t);
    if (slot != t.escape_slot()) return t.s_min + slot;
    uint32_t zz = 0;
    for (int b = 0; b < 4; ++b) {
      uint32_t cum = x_ & (kFreqTotal - 1);
      uint32_t byte = cum >> 8;
      advance(byte << 8, 256, cum);
      zz |= byte << (8 * b);
    }
    return RansEncoder::unzigzag(zz);
  }

 private:
  void advance(uint32_t start, uint32_t freq, uint32_t cum) {
    x_ = freq * (x_ >> kFreqBits) + cum - start;
    while (x_ < kRansLowerBound) {
      if (pos_ >= bytes_.size()) throw std::runtime_error("rans: truncated stream");
      x_ = (x_ << 8) | bytes_[pos_++];
    }
  }

  const std::vector<uint8_t>& bytes_;
  uint32_t x_ = 0;
  size_t pos_ = 0;
};

// Whole-sequence helpers (one table per symbol position).
std::vector<uint8_t> rans_encode(const std::vector<int>& symbols,
                                 const std::vector<const CdfTable*>& tables);
std::vector<int> rans_decode(const std::vector<uint8_t>& bytes,
                             const std::vector<const CdfTable*>& tables);

}  // namespace snic::codec

#endif  // SNIC_CODEC_RANS_HPP_

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

#ifndef SNIC_CODEC_CDF_HPP_
#define SNIC_CODEC_CDF_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "snic/quant/quantize.hpp"

namespace snic::codec {

inline constexpr int kFreqBits = 16;
inline constexpr uint32_t kFreqTotal = 1u << kFreqBits;
inline constexpr int kSymbolMin = -255;
inline constexpr int kSymbolMax = 255;

// Quantized cumulative frequencies over an inclusive symbol range plus one
// escape slot. Every slot (escape included) has frequency >= 1 and the
// cumulative total is exactly 2^16, so every integer is codable: in-range
// symbols directly, everything else through the escape + raw value path.
struct CdfTable {
  int s_min = 0, s_max = -1;
  std::vector<uint32_t> cum;  // size = slot_count + 1; cum[0]=0, back()=2^16

  int symbol_count() const { return s_max - s_min + 1; }
  int slot_count() const { return symbol_count() + 1; }  // + escape
  int escape_slot() const { return symbol_count(); }
  bool contains(int s) const { return s >= s_min && s <= s_max; }
  int slot_of(int s) const { return s - s_min; }
  uint32_t freq(int slot) const { return cum[slot + 1] - cum[slot]; }
  uint32_t start(int slot) const { return cum[slot]; }

  // Finds the slot whose [cum, cum+freq) interval contains `value`.
  int find_slot(uint32_t value) const {
    int lo = 0, hi = slot_count();
    while (hi - lo > 1) {
      int mid = (lo + hi) / 2;
      if (cum[mid] <= value)
        lo = mid;
      else
        hi = mid;
    }
    return lo;
  }
};

// Builds a table from a pmf evaluated over [s_min, s_max]. Deterministic
// quantization rule: freq = max(1, llround(p * 2^16)), then the difference
// to the exact total is folded into the most probable slot (walking down
// when that would drop a slot below 1).
CdfTable build_cdf_table(const std::function<double(int)>& pmf, int s_min, int s_max);

// Discretized-Gaussian table over [s_min, s_max].
CdfTable build_cdf_table(double mu, double sigma, int s_min = kSymbolMin,
                         int s_max = kSymbolMax);

// Coding tables for residuals are keyed by a quantized scale so encoder and
// decoder derive bit-identical tables from their (identical) float sigmas.
inline constexpr int kSigmaBins = 256;
inline constexpr double kSigmaBinMax = 300.0;

int sigma_bin_index(double sigma);
double sigma_bin_value(int index);

// Support tightened to +-(9 sigma + 2): escapes are astronomically rare
// under the model while tiny-sigma tables stay small and waste almost no
// probability mass on forced minimum frequencies.
CdfTable build_gaussian_bin_table(int bin_index);

// Lazily built per-bin tables; contents depend only on the bin index.
class GaussianTableCache {
 public:
  const CdfTable& get(int bin) {
    if (!built_[bin]) {
      tables_[bin] = build_gaussian_bin_table(bin);
      built_[bin] = true;
    }
    return tables_[bin];
  }

 private:
  std::vector<CdfTable> tables_ = std::vector<CdfTable>(kSigmaBins);
  std::vector<bool> built_ = std::vector<bool>(kSigmaBins, false);
};

}  // namespace snic::codec

#endif  // SNIC_CODEC_CDF_HPP_

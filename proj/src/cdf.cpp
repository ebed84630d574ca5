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

#include "snic/codec/cdf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snic::codec {

CdfTable build_cdf_table(const std::function<double(int)>& pmf, int s_min, int s_max) {
  if (s_max < s_min) throw std::invalid_argument("cdf: empty symbol range");
  const int count = s_max - s_min + 1;
  const int slots = count + 1;  // + escape
  if (static_cast<uint32_t>(slots) > kFreqTotal)
    throw std::invalid_argument("cdf: symbol range too wide for frequency budget");

  std::vector<double> p(count);
  double mass = 0.0;
  for (int i = 0; i < count; ++i) {
    double v = pmf(s_min + i);
    p[i] = v > 0.0 ? v : 0.0;
    mass += p[i];
  }
  if (mass <= 0.0) mass = 1.0;

  std::vector<uint32_t> freq(slots, 1);  // floors; escape lives at freq[count]
  long long total = slots;
  int top = 0;
  for (int i = 0; i < count; ++i) {
    uint32_t f = static_cast<uint32_t>(
        std::max<long long>(1, std::llround(p[i] / mass * double(kFreqTotal))));
    total += f - 1;
    freq[i] = f;
    if (f > freq[top]) top = i;
  }
  // Exact-total fixup. Surplus parks in the escape slot. A deficit (floors
  // plus rounding pushed the sum high) is paid by the smallest above-floor
  // slots first, so the mode keeps its rounded frequency whenever possible.
  long long diff = static_cast<long long>(kFreqTotal) - total;
  if (diff > 0) {
    freq[count] += static_cast<uint32_t>(diff);
  } else if (diff < 0) {
    long long need = -diff;
    while (need > 0) {
      int best = -1;
      for (int i = 0; i < count; ++i)
        if (freq[i] > 1 && i != top && (best < 0 || freq[i] < freq[best])) best = i;
      if (best < 0) best = top;  // only the mode has headroom left
      long long take = std::min<long long>(need, freq[best] - 1);
      if (take <= 0) throw std::logic_error("cdf: cannot renormalize");
      freq[best] -= static_cast<uint32_t>(take);
      need -= take;
    }
  }

  CdfTable t;
  t.s_min = s_min;
  t.s_max = s_max;
  t.cum.resize(slots + 1);
  t.cum[0] = 0;
  for (int i = 0; i < slots; ++i) t.cum[i + 1] = t.cum[i] + freq[i];
  if (t.cum.back() != kFreqTotal) throw std::logic_error("cdf: bad total");
  return t;
}

CdfTable build_cdf_table(double mu, double sigma, int s_min, int s_max) {
  if (sigma < quant::kSigmaFloor) sigma = quant::kSigmaFloor;
  return build_cdf_table(
      [mu, sigma](int n) { return quant::discretized_gaussian_pmf(n, mu, sigma); }, s_min,
      s_max);
}

int sigma_bin_index(double sigma) {
  if (sigma < quant::kSigmaFloor) sigma = quant::kSigmaFloor;
  if (sigma > kSigmaBinMax) sigma = kSigmaBinMax;
  const double lo = std::log(quant::kSigmaFloor);
  const double hi = std::log(kSigmaBinMax);
  double t = (std::log(sigma) - lo) / (hi - lo) * double(kSigmaBins - 1);
  int idx = static_cast<int>(std::lround(t));
  return std::clamp(idx, 0, kSigmaBins - 1);
}

double sigma_bin_value(int index) {
  const double lo = std::log(quant::kSigmaFloor);
  const double hi = std::log(kSigmaBinMax);
  return std::exp(lo + (hi - lo) * double(index) / double(kSigmaBins - 1));
}

CdfTable build_gaussian_bin_table(int bin_index) {
  const double sigma = sigma_bin_value(bin_index);
  int radius = static_cast<int>(std::ceil(9.0 * sigma)) + 2;
  radius = std::min(radius, kSymbolMax);
  return build_cdf_table(0.0, sigma, -radius, radius);
}

}  // namespace snic::codec

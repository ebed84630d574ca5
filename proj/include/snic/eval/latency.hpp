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

#ifndef SNIC_EVAL_LATENCY_HPP_
#define SNIC_EVAL_LATENCY_HPP_

#include <algorithm>
#include <chrono>
#include <functional>
#include <stdexcept>
#include <vector>

namespace snic::eval {

struct LatencyResult {
  double encode_ms = 0.0;
  double decode_ms = 0.0;
  int repeats = 0;
};

// Median wall-clock per direction over `repeats` runs. Both callables must
// work on in-memory buffers; file I/O is excluded by construction. Absolute
// numbers are environment-specific and are recorded, not asserted against.
inline LatencyResult measure_latency(const std::function<void()>& encode,
                                     const std::function<void()>& decode, int repeats) {
  if (repeats < 3) throw std::invalid_argument("measure_latency: repeats must be >= 3");
  auto median_ms = [repeats](const std::function<void()>& fn) {
    std::vector<double> ms;
    ms.reserve(repeats);
    for (int i = 0; i < repeats; ++i) {
      auto t0 = std::chrono::steady_clock::now();
      fn();
      auto t1 = std::chrono::steady_clock::now();
      ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(ms.begin(), ms.end());
    return repeats % 2 ? ms[repeats / 2] : 0.5 * (ms[repeats / 2 - 1] + ms[repeats / 2]);
  };
  LatencyResult r;
  r.repeats = repeats;
  r.encode_ms = median_ms(encode);
  r.decode_ms = median_ms(decode);
  return r;
}

}  // namespace snic::eval

#endif  // SNIC_EVAL_LATENCY_HPP_

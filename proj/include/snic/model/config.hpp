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

#ifndef SNIC_MODEL_CONFIG_HPP_
#define SNIC_MODEL_CONFIG_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace snic::model {

// Architecture hyper-parameters. `paper` is the full-width default; `desk`
// and `micro` are shrunk variants for CPU-budget smoke training and very
// large inputs. Channel counts must stay divisible by the slice count.
struct ModelConfig {
  int n = 192;          // transform width
  int m = 320;          // bottleneck channels
  int cz = 192;         // hyper-latent channels
  int num_slices = 10;  // channel-conditioned entropy slices
  int window = 8;       // attention window on feature grids
  int ca_reduction = 16;

  int slice_channels() const { return m / num_slices; }
  int hyper_feature_c() const { return 2 * m; }
  int hyper_mid_c() const { return (3 * cz) / 2; }

  void validate() const {
    if (n <= 0 || m <= 0 || cz <= 0 || num_slices <= 0 || window <= 0)
      throw std::invalid_argument("model config: nonpositive dimension");
    if (m % num_slices != 0)
      throw std::invalid_argument("model config: m not divisible by slice count");
  }

  static ModelConfig preset(const std::string& name) {
    ModelConfig c;
    if (name == "paper") {
      // defaults
    } else if (name == "desk") {
      c.n = 48;
      c.m = 80;
      c.cz = 48;
    } else if (name == "micro") {
      c.n = 16;
      c.m = 40;
      c.cz = 16;
    } else {
      throw std::invalid_argument("unknown model preset: " + name);
    }
    c.validate();
    return c;
  }

  std::string canonical() const {
    return "n=" + std::to_string(n) + ",m=" + std::to_string(m) +
           ",cz=" + std::to_string(cz) + ",slices=" + std::to_string(num_slices) +
           ",window=" + std::to_string(window) + ",car=" + std::to_string(ca_reduction);
  }

  bool operator==(const ModelConfig& o) const { return canonical() == o.canonical(); }

  // Architecture fingerprint carried in bitstream headers; containers from a
  // different architecture are refused before decoding is attempted.
  uint8_t model_id() const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (char ch : canonical()) {
      h ^= static_cast<uint8_t>(ch);
      h *= 0x100000001b3ull;
    }
    return static_cast<uint8_t>(h ^ (h >> 8) ^ (h >> 16) ^ (h >> 24));
  }
};

}  // namespace snic::model

#endif  // SNIC_MODEL_CONFIG_HPP_

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

#ifndef SNIC_CODEC_CONTAINER_HPP_
#define SNIC_CODEC_CONTAINER_HPP_

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace snic::codec {

// .snic container, all multi-byte integers little-endian:
//
//   offset  size  field
//        0     4  magic "SNIC"
//        4     1  version (= 1)
//        5     1  model_id
//        6     1  lambda_index (0xff when not applicable)
//        7     4  orig_w
//       11     4  orig_h
//       15     4  z_payload_len
//       19    40  slice_payload_lens[10]
//       59     4  crc32 over all payload bytes (z payload, then slices 0..9)
//       63     .  payloads
//
// The header is uncompressed and fixed-size (63 bytes).
inline constexpr int kNumSlicePayloads = 10;
inline constexpr int kHeaderBytes = 63;
inline constexpr uint8_t kContainerVersion = 1;
inline constexpr uint8_t kNoLambda = 0xff;

struct Container {
  uint8_t version = kContainerVersion;
  uint8_t model_id = 0;
  uint8_t lambda_index = kNoLambda;
  uint32_t orig_w = 0, orig_h = 0;
  std::vector<uint8_t> z_payload;
  std::array<std::vector<uint8_t>, kNumSlicePayloads> slice_payloads;

  size_t total_bytes() const {
    size_t n = kHeaderBytes + z_payload.size();
    for (const auto& s : slice_payloads) n += s.size();
    return n;
  }
  double bpp() const {
    return 8.0 * double(total_bytes()) / (double(orig_w) * double(orig_h));
  }
};

class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<uint8_t> serialize_container(const Container& c);

// Throws IntegrityError on bad magic/version/CRC/length mismatches.
Container parse_container(const std::vector<uint8_t>& bytes);

uint32_t payload_crc(const Container& c);

}  // namespace snic::codec

#endif  // SNIC_CODEC_CONTAINER_HPP_

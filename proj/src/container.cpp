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

#include "snic/codec/container.hpp"

#include <zlib.h>

#include <cstring>

namespace snic::codec {

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xff));
  out.push_back(static_cast<uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<uint8_t>((v >> 24) & 0xff));
}

uint32_t get_u32(const uint8_t* p) {
  return uint32_t(p[0]) | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) |
         (uint32_t(p[3]) << 24);
}

}  // namespace

uint32_t payload_crc(const Container& c) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, c.z_payload.data(), static_cast<uInt>(c.z_payload.size()));
  for (const auto& s : c.slice_payloads)
    crc = crc32(crc, s.data(), static_cast<uInt>(s.size()));
  return static_cast<uint32_t>(crc);
}

std::vector<uint8_t> serialize_container(const Container& c) {
  std::vector<uint8_t> out;
  out.reserve(c.total_bytes());
  out.insert(out.end(), {'S', 'N', 'I', 'C'});
  out.push_back(c.version);
  out.push_back(c.model_id);
  out.push_back(c.lambda_index);
  put_u32(out, c.orig_w);
  put_u32(out, c.orig_h);
  put_u32(out, static_cast<uint32_t>(c.z_payload.size()));
  for (const auto& s : c.slice_payloads) put_u32(out, static_cast<uint32_t>(s.size()));
  put_u32(out, payload_crc(c));
  out.insert(out.end(), c.z_payload.begin(), c.z_payload.end());
  for (const auto& s : c.slice_payloads) out.insert(out.end(), s.begin(), s.end());
  return out;
}

Container parse_container(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < kHeaderBytes) throw IntegrityError("container: truncated header");
  if (std::memcmp(bytes.data(), "SNIC", 4) != 0)
    throw IntegrityError("container: bad magic");
  Container c;
  c.version = bytes[4];
  if (c.version != kContainerVersion)
    throw IntegrityError("container: unsupported version " + std::to_string(c.version));
  c.model_id = bytes[5];
  c.lambda_index = bytes[6];
  c.orig_w = get_u32(bytes.data() + 7);
  c.orig_h = get_u32(bytes.data() + 11);
  uint32_t z_len = get_u32(bytes.data() + 15);
  std::array<uint32_t, kNumSlicePayloads> slice_lens{};
  for (int i = 0; i < kNumSlicePayloads; ++i)
    slice_lens[i] = get_u32(bytes.data() + 19 + 4 * i);
  uint32_t crc_declared = get_u32(bytes.data() + 59);

  uint64_t need = kHeaderBytes + uint64_t(z_len);
  for (uint32_t l : slice_lens) need += l;
  if (bytes.size() != need) throw IntegrityError("container: payload length mismatch");

  size_t off = kHeaderBytes;
  c.z_payload.assign(bytes.begin() + off, bytes.begin() + off + z_len);
  off += z_len;
  for (int i = 0; i < kNumSlicePayloads; ++i) {
    c.slice_payloads[i].assign(bytes.begin() + off, bytes.begin() + off + slice_lens[i]);
    off += slice_lens[i];
  }
  if (payload_crc(c) != crc_declared) throw IntegrityError("container: CRC mismatch");
  return c;
}

}  // namespace snic::codec

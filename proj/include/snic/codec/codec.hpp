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

#ifndef SNIC_CODEC_CODEC_HPP_
#define SNIC_CODEC_CODEC_HPP_

#include <vector>

#include "snic/codec/container.hpp"
#include "snic/model/transforms.hpp"

namespace snic::codec {

class ModelMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CompressResult {
  std::vector<uint8_t> bytes;
  double bpp = 0.0;       // 8 * container bytes / original pixels
  double est_bits = 0.0;  // model code-length estimate on the coded values
};

// `padded` must have dims that are multiples of 64; orig_* are the pre-pad
// dims recorded in the header. The slice conditioning uses decoded values
// only, so the decoder reproduces the exact entropy parameters.
CompressResult compress_image(const Tensor<float>& padded, int orig_w, int orig_h,
                              const model::CompressionModel<float>& m,
                              uint8_t lambda_index);

// Inverse of compress_image; output is cropped to the original dims.
// Throws IntegrityError (bad container) or ModelMismatchError.
Tensor<float> decompress_image(const std::vector<uint8_t>& bytes,
                               const model::CompressionModel<float>& m);

// The reconstruction the decoder will produce, computed without entropy
// coding (quantize + synthesize). decompress(compress(x)) must equal this
// bit-exactly.
Tensor<float> simulate_roundtrip(const Tensor<float>& padded,
                                 const model::CompressionModel<float>& m);

struct ContainerInfo {
  uint8_t version = 0, model_id = 0, lambda_index = 0;
  uint32_t orig_w = 0, orig_h = 0;
};

ContainerInfo peek_container(const std::vector<uint8_t>& bytes);

}  // namespace snic::codec

#endif  // SNIC_CODEC_CODEC_HPP_

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

#ifndef SNIC_EVAL_EXTERNAL_CODEC_HPP_
#define SNIC_EVAL_EXTERNAL_CODEC_HPP_

#include <optional>
#include <string>
#include <vector>

#include "snic/core/tensor.hpp"
#include "snic/eval/rd_sweep.hpp"

namespace snic::eval {

// Subprocess adapters around host codec binaries. Argument templates:
//   jpeg:     cjpeg -quality <q> -grayscale <in.pgm> > <out.jpg>
//             djpeg -grayscale -pnm <out.jpg> > <rec.pgm>
//   jpeg2000: opj_compress -i <in.pgm> -o <out.j2k> -r <q>
//             opj_decompress -i <out.j2k> -o <rec.pgm>
//   bpg:      bpgenc -q <q> -o <out.bpg> <in.png>
//             bpgdec -o <rec.png> <out.bpg>
// A missing binary is a skip, not a failure.
struct ExternalCodecIds {
  static constexpr const char* kJpeg = "jpeg";
  static constexpr const char* kJpeg2000 = "jpeg2000";
  static constexpr const char* kBpg = "bpg";
};

bool external_codec_available(const std::string& codec_id);

// One (bpp, metrics) point; std::nullopt when the binary is absent.
std::optional<RdPoint> external_codec_point(const std::string& codec_id, double quality,
                                            const Tensor<float>& image);

}  // namespace snic::eval

#endif  // SNIC_EVAL_EXTERNAL_CODEC_HPP_

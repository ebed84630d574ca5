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

#ifndef SNIC_SEG_IMPACT_HPP_
#define SNIC_SEG_IMPACT_HPP_

#include <functional>
#include <string>
#include <vector>

#include "snic/model/transforms.hpp"
#include "snic/seg/acwe.hpp"

namespace snic::seg {

// Full detection pipeline: limb correction, quiet-sun estimate, threshold
// seeding, region evolution.
AcweResult segment_image(const Tensor<float>& img, const DiskGeometry& geom,
                         const AcweConfig& cfg);

struct ImpactPoint {
  std::string image_id;
  double bpp = 0.0;   // 0 for the identity codec
  double dice = 0.0;  // original segmentation vs roundtripped segmentation
};

// Codec hook: maps the original levels to (reconstruction, bpp).
using CodecFn = std::function<std::pair<Tensor<float>, double>(const Tensor<float>&)>;

CodecFn identity_codec();
CodecFn snic_codec(const model::CompressionModel<float>& m, uint8_t lambda_index);

// Segments the original and the codec roundtrip and compares the masks.
ImpactPoint compression_impact(const std::string& image_id, const Tensor<float>& img,
                               const DiskGeometry& geom, const AcweConfig& cfg,
                               const CodecFn& codec);

void write_impact_csv(const std::string& path, const std::vector<ImpactPoint>& points);

}  // namespace snic::seg

#endif  // SNIC_SEG_IMPACT_HPP_

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

#include "snic/seg/impact.hpp"

#include <algorithm>
#include <fstream>

#include "snic/codec/codec.hpp"
#include "snic/nn/ops.hpp"

namespace snic::seg {

AcweResult segment_image(const Tensor<float>& img, const DiskGeometry& geom,
                         const AcweConfig& cfg) {
  Tensor<float> corrected = limb_correct(img, geom);
  double qs = quiet_sun_mean(corrected, geom);
  SegmentationMask seed = seed_mask(corrected, geom, cfg.alpha, qs);
  return acwe_evolve(corrected, seed, cfg);
}

CodecFn identity_codec() {
  return [](const Tensor<float>& img) { return std::make_pair(img, 0.0); };
}

CodecFn snic_codec(const model::CompressionModel<float>& m, uint8_t lambda_index) {
  return [&m, lambda_index](const Tensor<float>& img) {
    Tensor<float> padded = nn::pad_replicate_to_multiple(img, 64);
    codec::CompressResult cr = codec::compress_image(padded, img.w, img.h, m, lambda_index);
    Tensor<float> recon = codec::decompress_image(cr.bytes, m);
    return std::make_pair(std::move(recon), cr.bpp);
  };
}

ImpactPoint compression_impact(const std::string& image_id, const Tensor<float>& img,
                               const DiskGeometry& geom, const AcweConfig& cfg,
                               const CodecFn& codec) {
  AcweResult original = segment_image(img, geom, cfg);
  auto [recon, bpp] = codec(img);
  AcweResult roundtrip = segment_image(recon, geom, cfg);
  ImpactPoint p;
  p.image_id = image_id;
  p.bpp = bpp;
  p.dice = dice(original.mask, roundtrip.mask);
  return p;
}

void write_impact_csv(const std::string& path, const std::vector<ImpactPoint>& points) {
  std::vector<ImpactPoint> sorted = points;
  std::sort(sorted.begin(), sorted.end(),
            [](const ImpactPoint& a, const ImpactPoint& b) { return a.bpp < b.bpp; });
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "image_id,bpp,dice\n";
  for (const auto& p : sorted) out << p.image_id << ',' << p.bpp << ',' << p.dice << '\n';
}

}  // namespace snic::seg

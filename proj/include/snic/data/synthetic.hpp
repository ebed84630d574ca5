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

#ifndef SNIC_DATA_SYNTHETIC_HPP_
#define SNIC_DATA_SYNTHETIC_HPP_

#include <vector>

#include "snic/core/rng.hpp"
#include "snic/data/image.hpp"

namespace snic::data {

// Synthetic solar disk with dark circular holes; ground truth mask included.
// Values are levels in [0, 255].
struct SyntheticDiskSpec {
  int h = 160, w = 160;
  double quiet_sun = 200.0;
  double hole_level = 40.0;
  double off_disk = 5.0;
  double noise_sigma = 0.0;       // additive Gaussian, clipped to [0,255]
  double limb_coeff = 0.0;        // on-disk brightening factor 1 + k*(r/R)^2
  // holes as (row_frac, col_frac, radius_frac) relative to disk center/radius
  std::vector<std::array<double, 3>> holes = {{-0.45, 0.25, 0.25}};
};

struct SyntheticDisk {
  Tensor<float> levels;      // h x w x 1 in [0,255]
  Tensor<uint8_t> ch_mask;   // ground truth hole mask
  DiskGeometry geometry;
};

SyntheticDisk make_synthetic_disk(const SyntheticDiskSpec& spec, uint64_t seed);

// Training-corpus patch mix: gradients, blobs, disk edges, noise fields.
// Values in [0, 255].
Tensor<float> make_training_patch(int h, int w, uint64_t seed);

std::vector<Tensor<float>> make_training_corpus(int count, int h, int w, uint64_t seed);

}  // namespace snic::data

#endif  // SNIC_DATA_SYNTHETIC_HPP_

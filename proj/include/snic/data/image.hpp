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

#ifndef SNIC_DATA_IMAGE_HPP_
#define SNIC_DATA_IMAGE_HPP_

#include <stdexcept>
#include <string>

#include "snic/core/tensor.hpp"

namespace snic::data {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solar disk position in pixel coordinates.
struct DiskGeometry {
  double center_row = 0.0, center_col = 0.0;
  double radius = 0.0;

  bool valid(int h, int w) const {
    return radius > 0.0 && center_row - radius >= -0.5 && center_col - radius >= -0.5 &&
           center_row + radius <= h - 0.5 && center_col + radius <= w - 0.5;
  }
  static DiskGeometry centered_default(int h, int w) {
    return DiskGeometry{(h - 1) / 2.0, (w - 1) / 2.0, 0.45 * std::min(h, w)};
  }
};

// Physical-intensity source image plus the metadata the pipeline consumes.
struct RawEuvImage {
  Tensor<float> intensity;  // h x w x 1, nonnegative instrument counts
  std::string record_time;  // e.g. "2015-03-12T00:00:00"
  double wavelength = 0.0;  // angstroms
  DiskGeometry geometry;
  bool has_geometry = false;

  int h() const { return intensity.h; }
  int w() const { return intensity.w; }
};

// Network-domain image: values in [0, 255], plus the pre-padding dims.
struct ImageTensor {
  Tensor<float> t;  // h x w x 1
  int orig_h = 0, orig_w = 0;

  int h() const { return t.h; }
  int w() const { return t.w; }

  void check_range() const {
    for (float v : t.v)
      if (!(v >= 0.0f && v <= 255.0f))
        throw InputError("image tensor value outside [0,255]");
  }
};

}  // namespace snic::data

#endif  // SNIC_DATA_IMAGE_HPP_

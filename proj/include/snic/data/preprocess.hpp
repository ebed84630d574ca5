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

#ifndef SNIC_DATA_PREPROCESS_HPP_
#define SNIC_DATA_PREPROCESS_HPP_

#include "snic/data/image.hpp"

namespace snic::data {

// Intensity -> level map: clip to [clip_lo, clip_hi], log10, then an affine
// map sending clip_lo -> 0 and clip_hi -> 255, rounded half away from zero
// to the 0..255 grid. Monotone nondecreasing in the input intensity.
ImageTensor preprocess_euv(const RawEuvImage& raw, double clip_lo, double clip_hi);

// Level -> intensity map: 10^(affine^-1(level)). Together with the forward
// map this is the identity on the clipped range, up to the per-level
// quantization bound 10^(step/2) - 1 in relative terms.
Tensor<float> inverse_preprocess(const ImageTensor& t, double clip_lo, double clip_hi);

// Replicate-pads right/bottom so dims become multiples of `multiple`;
// records the original dims. Pixels inside the original extent are
// untouched.
ImageTensor pad_to_multiple(const ImageTensor& t, int multiple = 64);

}  // namespace snic::data

#endif  // SNIC_DATA_PREPROCESS_HPP_

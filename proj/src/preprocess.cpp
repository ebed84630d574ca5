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

#include "snic/data/preprocess.hpp"

#include <cmath>

#include "snic/nn/ops.hpp"

namespace snic::data {

ImageTensor preprocess_euv(const RawEuvImage& raw, double clip_lo, double clip_hi) {
  if (!(clip_lo > 0.0)) throw InputError("preprocess: clip_lo must be positive (log domain)");
  if (!(clip_lo < clip_hi)) throw InputError("preprocess: clip_lo must be below clip_hi");
  if (raw.intensity.empty()) throw InputError("preprocess: empty image");
  const double log_lo = std::log10(clip_lo);
  const double log_hi = std::log10(clip_hi);
  const double scale = 255.0 / (log_hi - log_lo);
  ImageTensor out;
  out.t = Tensor<float>(raw.h(), raw.w(), 1);
  out.orig_h = raw.h();
  out.orig_w = raw.w();
  for (size_t i = 0; i < raw.intensity.size(); ++i) {
    double v = double(raw.intensity.v[i]);
    v = std::min(std::max(v, clip_lo), clip_hi);
    double level = (std::log10(v) - log_lo) * scale;
    out.t.v[i] = static_cast<float>(std::round(level));
  }
  return out;
}

Tensor<float> inverse_preprocess(const ImageTensor& t, double clip_lo, double clip_hi) {
  if (!(clip_lo > 0.0 && clip_lo < clip_hi)) throw InputError("inverse_preprocess: bad clip range");
  const double log_lo = std::log10(clip_lo);
  const double log_hi = std::log10(clip_hi);
  const double step = (log_hi - log_lo) / 255.0;
  Tensor<float> out(t.t.h, t.t.w, 1);
  for (size_t i = 0; i < t.t.size(); ++i) {
    double level = double(t.t.v[i]);
    if (!(level >= 0.0 && level <= 255.0))
      throw InputError("inverse_preprocess: level outside [0,255]");
    out.v[i] = static_cast<float>(std::pow(10.0, log_lo + level * step));
  }
  return out;
}

ImageTensor pad_to_multiple(const ImageTensor& t, int multiple) {
  if (multiple < 1) throw InputError("pad_to_multiple: multiple must be >= 1");
  ImageTensor out;
  out.t = nn::pad_replicate_to_multiple(t.t, multiple);
  out.orig_h = t.orig_h > 0 ? t.orig_h : t.t.h;
  out.orig_w = t.orig_w > 0 ? t.orig_w : t.t.w;
  return out;
}

}  // namespace snic::data

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

#include "snic/data/synthetic.hpp"

#include <cmath>

namespace snic::data {

namespace {
float clip255(double v) {
  return static_cast<float>(v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v));
}
}  // namespace

SyntheticDisk make_synthetic_disk(const SyntheticDiskSpec& spec, uint64_t seed) {
  SyntheticDisk out;
  out.levels = Tensor<float>(spec.h, spec.w, 1);
  out.ch_mask = Tensor<uint8_t>(spec.h, spec.w, 1);
  out.geometry = DiskGeometry::centered_default(spec.h, spec.w);
  const double cy = out.geometry.center_row, cx = out.geometry.center_col;
  const double R = out.geometry.radius;
  Rng rng(Rng::mix(seed, 0xd15cULL));
  for (int y = 0; y < spec.h; ++y)
    for (int x = 0; x < spec.w; ++x) {
      double dy = y - cy, dx = x - cx;
      double r = std::sqrt(dy * dy + dx * dx);
      double v;
      bool in_hole = false;
      if (r <= R) {
        v = spec.quiet_sun * (1.0 + spec.limb_coeff * (r / R) * (r / R));
        for (const auto& hole : spec.holes) {
          double hy = cy + hole[0] * R, hx = cx + hole[1] * R, hr = hole[2] * R;
          double d2 = (y - hy) * (y - hy) + (x - hx) * (x - hx);
          if (d2 <= hr * hr) {
            v = spec.hole_level;
            in_hole = true;
            break;
          }
        }
      } else {
        v = spec.off_disk;
      }
      if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.normal();
      out.levels.at(y, x, 0) = clip255(v);
      out.ch_mask.at(y, x, 0) = in_hole ? 1 : 0;
    }
  return out;
}

Tensor<float> make_training_patch(int h, int w, uint64_t seed) {
  Rng rng(Rng::mix(seed, 0x9a7c4ULL));
  Tensor<float> t(h, w, 1);
  const int kind = rng.uniform_int(4);
  switch (kind) {
    case 0: {  // smooth gradient + soft blobs
      double gx = rng.uniform(-1, 1), gy = rng.uniform(-1, 1);
      double base = rng.uniform(40, 200);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          t.at(y, x, 0) = clip255(base + gx * 60.0 * x / w + gy * 60.0 * y / h);
      int nblob = 2 + rng.uniform_int(3);
      for (int b = 0; b < nblob; ++b) {
        double by = rng.uniform(0, h), bx = rng.uniform(0, w);
        double s = rng.uniform(3, h / 3.0), amp = rng.uniform(-80, 80);
        for (int y = 0; y < h; ++y)
          for (int x = 0; x < w; ++x) {
            double d2 = (y - by) * (y - by) + (x - bx) * (x - bx);
            t.at(y, x, 0) = clip255(t.at(y, x, 0) + amp * std::exp(-d2 / (2 * s * s)));
          }
      }
      break;
    }
    case 1: {  // disk edge crop (limb-like arc)
      double R = rng.uniform(0.6, 2.0) * std::max(h, w);
      double cy = rng.uniform(-R, h + R) * 0.5, cx = rng.uniform(-0.2, 0.4) * w;
      double inside = rng.uniform(120, 230), outside = rng.uniform(0, 25);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          double r = std::sqrt((y - cy) * (y - cy) + (x - cx) * (x - cx));
          double edge = 1.0 / (1.0 + std::exp((r - R) / 1.5));
          t.at(y, x, 0) = clip255(outside + (inside - outside) * edge);
        }
      break;
    }
    case 2: {  // dark hole in bright background (coronal-hole-like)
      double qs = rng.uniform(150, 230), hole = rng.uniform(20, 70);
      double hy = rng.uniform(0.2, 0.8) * h, hx = rng.uniform(0.2, 0.8) * w;
      double hr = rng.uniform(0.15, 0.4) * std::min(h, w);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          double d = std::sqrt((y - hy) * (y - hy) + (x - hx) * (x - hx));
          double m = 1.0 / (1.0 + std::exp((hr - d) / 1.2));
          t.at(y, x, 0) = clip255(hole + (qs - hole) * m);
        }
      break;
    }
    default: {  // banded texture + noise
      double base = rng.uniform(60, 180), amp = rng.uniform(10, 60);
      double fy = rng.uniform(0.02, 0.3), fx = rng.uniform(0.02, 0.3);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          t.at(y, x, 0) = clip255(base + amp * std::sin(fy * y * 6.283) * std::cos(fx * x * 6.283));
      break;
    }
  }
  double noise = rng.uniform(0.5, 6.0);
  for (auto& v : t.v) v = clip255(v + noise * rng.normal());
  return t;
}

std::vector<Tensor<float>> make_training_corpus(int count, int h, int w, uint64_t seed) {
  std::vector<Tensor<float>> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i)
    out.push_back(make_training_patch(h, w, Rng::mix(seed, 1000 + i)));
  return out;
}

}  // namespace snic::data

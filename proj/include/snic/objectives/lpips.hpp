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

#ifndef SNIC_OBJECTIVES_LPIPS_HPP_
#define SNIC_OBJECTIVES_LPIPS_HPP_

#include <array>
#include <vector>

#include "snic/nn/conv.hpp"
#include "snic/nn/ops.hpp"

namespace snic::objectives {

using snic::Tensor;

// Perceptual feature distance: per extractor stage, channel-unit-normalized
// feature differences, squared, averaged over positions, uniformly weighted
// per layer (1/C), summed over layers.
//
// The feature backbone is pluggable. The default is a fixed-seed random conv
// pyramid: deterministic, asset-free, and adequate as a high-frequency-
// sensitive distance for desk-scale runs. A pretrained backbone can be
// substituted through the same interface.
template <typename T>
struct LpipsExtractor {
  static constexpr int kStages = 3;
  std::array<nn::Conv2d<T>, kStages> convs;

  explicit LpipsExtractor(uint64_t seed = 0x1b1b5eedULL) {
    const int widths[kStages + 1] = {1, 8, 16, 32};
    Rng rng(Rng::mix(seed, 0x7ea7f00dULL));
    for (int i = 0; i < kStages; ++i) {
      convs[i] = nn::Conv2d<T>(widths[i], widths[i + 1], 3, 2, 1);
      convs[i].init_he(rng);
    }
  }

  struct Trace {
    std::array<Tensor<T>, kStages> pre;   // conv outputs (pre-relu)
    std::array<Tensor<T>, kStages> feat;  // post-relu features
    Tensor<T> in;
  };

  static Tensor<T> scale_in(const Tensor<T>& x) {
    Tensor<T> s = x;
    for (auto& v : s.v) v = v * T(1.0 / 255.0) - T(0.5);
    return s;
  }

  void forward_cached(const Tensor<T>& x, Trace& tr) const {
    tr.in = scale_in(x);
    const Tensor<T>* cur = &tr.in;
    for (int i = 0; i < kStages; ++i) {
      tr.pre[i] = convs[i].forward(*cur);
      tr.feat[i] = nn::relu(tr.pre[i]);
      cur = &tr.feat[i];
    }
  }

  // Backward from per-stage feature grads to the input-image grad. The
  // extractor itself is frozen: parameter grads accumulate but are never
  // stepped; they are discarded on zero_grad().
  Tensor<T> backward(Trace& tr, std::array<Tensor<T>, kStages>& gfeat) {
    Tensor<T> g = std::move(gfeat[kStages - 1]);
    for (int i = kStages - 1; i >= 0; --i) {
      g = nn::relu_backward(tr.pre[i], g);
      g = convs[i].backward(i == 0 ? tr.in : tr.feat[i - 1], g);
      if (i > 0)
        for (size_t e = 0; e < g.size(); ++e) g.v[e] += gfeat[i - 1].v[e];
    }
    for (auto& v : g.v) v *= T(1.0 / 255.0);
    for (auto& c : convs) c.zero_grad();
    return g;
  }
};

template <typename T>
struct LpipsTrace {
  typename LpipsExtractor<T>::Trace a, b;
  // cached unit-normalized features per stage
  std::array<Tensor<T>, LpipsExtractor<T>::kStages> na, nb;
  std::array<Tensor<T>, LpipsExtractor<T>::kStages> norm_a, norm_b;  // h x w x 1 norms
  double value = 0.0;
};

template <typename T>
void lpips_normalize(const Tensor<T>& f, Tensor<T>& unit, Tensor<T>& norm) {
  unit = Tensor<T>(f.h, f.w, f.c);
  norm = Tensor<T>(f.h, f.w, 1);
  for (int y = 0; y < f.h; ++y)
    for (int x = 0; x < f.w; ++x) {
      const T* src = f.pos(y, x);
      T* dst = unit.pos(y, x);
      double s = 1e-10;
      for (int c = 0; c < f.c; ++c) s += double(src[c]) * src[c];
      T n = T(std::sqrt(s));
      norm.at(y, x, 0) = n;
      for (int c = 0; c < f.c; ++c) dst[c] = src[c] / n;
    }
}

template <typename T>
double lpips_forward(const LpipsExtractor<T>& ex, const Tensor<T>& x, const Tensor<T>& y,
                     LpipsTrace<T>& tr) {
  ex.forward_cached(x, tr.a);
  ex.forward_cached(y, tr.b);
  double total = 0.0;
  for (int l = 0; l < LpipsExtractor<T>::kStages; ++l) {
    lpips_normalize(tr.a.feat[l], tr.na[l], tr.norm_a[l]);
    lpips_normalize(tr.b.feat[l], tr.nb[l], tr.norm_b[l]);
    const Tensor<T>& fa = tr.na[l];
    const Tensor<T>& fb = tr.nb[l];
    double acc = 0.0;
    for (size_t e = 0; e < fa.size(); ++e) {
      double d = double(fa.v[e]) - double(fb.v[e]);
      acc += d * d;
    }
    total += acc / (double(fa.h) * fa.w * fa.c);
  }
  tr.value = total;
  return total;
}

template <typename T>
double lpips_distance(const LpipsExtractor<T>& ex, const Tensor<T>& x, const Tensor<T>& y) {
  LpipsTrace<T> tr;
  return lpips_forward(ex, x, y, tr);
}

// Gradient w.r.t. the second argument (the reconstruction).
template <typename T>
Tensor<T> lpips_backward_second(LpipsExtractor<T>& ex, LpipsTrace<T>& tr, double gscale) {
  std::array<Tensor<T>, LpipsExtractor<T>::kStages> gfeat;
  for (int l = 0; l < LpipsExtractor<T>::kStages; ++l) {
    const Tensor<T>& fa = tr.na[l];
    const Tensor<T>& fb = tr.nb[l];
    const double w = gscale / (double(fa.h) * fa.w * fa.c);
    Tensor<T> gn(fb.h, fb.w, fb.c);
    for (size_t e = 0; e < fb.size(); ++e)
      gn.v[e] = T(-2.0 * w * (double(fa.v[e]) - double(fb.v[e])));
    // through the unit normalization: g_f = (g_n - u (u . g_n)) / ||f||
    gfeat[l] = Tensor<T>(fb.h, fb.w, fb.c);
    for (int yy = 0; yy < fb.h; ++yy)
      for (int xx = 0; xx < fb.w; ++xx) {
        const T* u = fb.pos(yy, xx);
        const T* g = gn.pos(yy, xx);
        T* out = gfeat[l].pos(yy, xx);
        double dot = 0.0;
        for (int c = 0; c < fb.c; ++c) dot += double(u[c]) * g[c];
        T n = tr.norm_b[l].at(yy, xx, 0);
        for (int c = 0; c < fb.c; ++c) out[c] = (g[c] - T(dot) * u[c]) / n;
      }
  }
  return ex.backward(tr.b, gfeat);
}

}  // namespace snic::objectives

#endif  // SNIC_OBJECTIVES_LPIPS_HPP_

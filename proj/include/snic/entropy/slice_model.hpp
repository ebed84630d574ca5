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

#ifndef SNIC_ENTROPY_SLICE_MODEL_HPP_
#define SNIC_ENTROPY_SLICE_MODEL_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "snic/nn/conv.hpp"
#include "snic/nn/ops.hpp"
#include "snic/quant/quantize.hpp"

namespace snic::entropy {

// Contiguous equal-width channel slices, decoded in ascending index order.
struct SliceScheme {
  int num_slices = 0;
  int slice_channels = 0;

  static SliceScheme equal_partition(int total_channels, int num_slices) {
    if (num_slices <= 0 || total_channels % num_slices != 0)
      throw std::invalid_argument("slice scheme: channels not divisible by slice count");
    return SliceScheme{num_slices, total_channels / num_slices};
  }
  int begin(int i) const { return i * slice_channels; }
  int end(int i) const { return (i + 1) * slice_channels; }
};

template <typename T>
struct EntropyParams {
  Tensor<T> mu;     // slice-shaped
  Tensor<T> sigma;  // >= kSigmaFloor elementwise
};

// Parameter head for one slice: three 3x3 convs over the concatenation of
// hyper features and all previously decoded slices. Slice i never sees
// slices >= i, which is what makes encoder/decoder contexts identical.
template <typename T>
struct SlicePredictor {
  int index = 0;
  int sc = 0;  // channels per slice
  nn::Conv2d<T> c1, c2, c3;

  SlicePredictor() = default;
  SlicePredictor(int index_, int hyper_c, int sc_)
      : index(index_), sc(sc_),
        c1(hyper_c + index_ * sc_, 4 * sc_, 3, 1, 1),
        c2(4 * sc_, 3 * sc_, 3, 1, 1),
        c3(3 * sc_, 2 * sc_, 3, 1, 1) {}

  void init(Rng& rng) {
    c1.init_he(rng);
    c2.init_he(rng);
    c3.init_he(rng);
  }

  struct Trace {
    Tensor<T> in, z1, h1, z2, h2, raw;
  };

  // `in` = concat(hyper features, slices 0..index-1); assembled by callers.
  EntropyParams<T> forward_cached(const Tensor<T>& in, Trace& tr) const {
    tr.in = in;
    tr.z1 = c1.forward(in);
    tr.h1 = nn::relu(tr.z1);
    tr.z2 = c2.forward(tr.h1);
    tr.h2 = nn::relu(tr.z2);
    tr.raw = c3.forward(tr.h2);
    return split(tr.raw);
  }

  EntropyParams<T> forward(const Tensor<T>& in) const {
    return split(c3.forward(nn::relu(c2.forward(nn::relu(c1.forward(in))))));
  }

  EntropyParams<T> split(const Tensor<T>& raw) const {
    EntropyParams<T> p;
    p.mu = Tensor<T>(raw.h, raw.w, sc);
    p.sigma = Tensor<T>(raw.h, raw.w, sc);
    for (int y = 0; y < raw.h; ++y)
      for (int x = 0; x < raw.w; ++x) {
        const T* src = raw.pos(y, x);
        T* m = p.mu.pos(y, x);
        T* s = p.sigma.pos(y, x);
        for (int ch = 0; ch < sc; ++ch) {
          m[ch] = src[ch];
          s[ch] = T(quant::kSigmaFloor) + nn::softplus_scalar(src[sc + ch]);
        }
      }
    return p;
  }

  // gmu/gsigma arrive in effective units; fold the softplus head back into
  // the raw conv output and run the conv stack backward.
  Tensor<T> backward(const Trace& tr, const Tensor<T>& gmu, const Tensor<T>& gsigma) {
    Tensor<T> graw(tr.raw.h, tr.raw.w, tr.raw.c);
    for (int y = 0; y < tr.raw.h; ++y)
      for (int x = 0; x < tr.raw.w; ++x) {
        const T* raw = tr.raw.pos(y, x);
        T* gr = graw.pos(y, x);
        const T* gm = gmu.pos(y, x);
        const T* gs = gsigma.pos(y, x);
        for (int ch = 0; ch < sc; ++ch) {
          gr[ch] = gm[ch];
          gr[sc + ch] = gs[ch] * T(nn::sigmoid_scalar(double(raw[sc + ch])));
        }
      }
    Tensor<T> gh2 = c3.backward(tr.h2, graw);
    Tensor<T> gz2 = nn::relu_backward(tr.z2, gh2);
    Tensor<T> gh1 = c2.backward(tr.h1, gz2);
    Tensor<T> gz1 = nn::relu_backward(tr.z1, gh1);
    return c1.backward(tr.in, gz1);
  }

  void zero_grad() {
    c1.zero_grad();
    c2.zero_grad();
    c3.zero_grad();
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    c1.visit(prefix + ".c1", f);
    c2.visit(prefix + ".c2", f);
    c3.visit(prefix + ".c3", f);
  }
};

}  // namespace snic::entropy

#endif  // SNIC_ENTROPY_SLICE_MODEL_HPP_

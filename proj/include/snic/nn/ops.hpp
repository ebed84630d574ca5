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

#ifndef SNIC_NN_OPS_HPP_
#define SNIC_NN_OPS_HPP_

#include <cmath>

#include "snic/core/tensor.hpp"

namespace snic::nn {

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (auto& v : y.v) v = v > T(0) ? v : T(0);
  return y;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& x, const Tensor<T>& g) {
  Tensor<T> gx = g;
  for (size_t i = 0; i < x.size(); ++i)
    if (x.v[i] <= T(0)) gx.v[i] = T(0);
  return gx;
}

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope) {
  Tensor<T> y = x;
  for (auto& v : y.v) v = v > T(0) ? v : slope * v;
  return y;
}

template <typename T>
Tensor<T> leaky_relu_backward(const Tensor<T>& x, const Tensor<T>& g, T slope) {
  Tensor<T> gx = g;
  for (size_t i = 0; i < x.size(); ++i)
    if (x.v[i] <= T(0)) gx.v[i] *= slope;
  return gx;
}

template <typename T>
T sigmoid_scalar(T x) {
  if (x >= T(0)) {
    T e = std::exp(-x);
    return T(1) / (T(1) + e);
  }
  T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (auto& v : y.v) v = sigmoid_scalar(v);
  return y;
}

// Backward from the cached *output* s = sigmoid(x): ds/dx = s(1-s).
template <typename T>
Tensor<T> sigmoid_backward_from_output(const Tensor<T>& s, const Tensor<T>& g) {
  Tensor<T> gx = g;
  for (size_t i = 0; i < s.size(); ++i) gx.v[i] *= s.v[i] * (T(1) - s.v[i]);
  return gx;
}

template <typename T>
T softplus_scalar(T x) {
  if (x > T(20)) return x;
  if (x < T(-20)) return std::exp(x);
  return std::log1p(std::exp(x));
}

// Replicate-pads the right/bottom so h, w become multiples of `multiple`.
template <typename T>
Tensor<T> pad_replicate_to_multiple(const Tensor<T>& x, int multiple) {
  int ph = (x.h + multiple - 1) / multiple * multiple;
  int pw = (x.w + multiple - 1) / multiple * multiple;
  if (ph == x.h && pw == x.w) return x;
  Tensor<T> out(ph, pw, x.c);
  for (int y = 0; y < ph; ++y) {
    int sy = y < x.h ? y : x.h - 1;
    for (int xx = 0; xx < pw; ++xx) {
      int sx = xx < x.w ? xx : x.w - 1;
      const T* src = x.pos(sy, sx);
      std::copy(src, src + x.c, out.pos(y, xx));
    }
  }
  return out;
}

// Adjoint of the replicate pad: grads of replicated cells fold back into the
// edge source pixels.
template <typename T>
Tensor<T> pad_replicate_backward(const Tensor<T>& gpadded, int orig_h, int orig_w) {
  Tensor<T> gx(orig_h, orig_w, gpadded.c);
  for (int y = 0; y < gpadded.h; ++y) {
    int sy = y < orig_h ? y : orig_h - 1;
    for (int xx = 0; xx < gpadded.w; ++xx) {
      int sx = xx < orig_w ? xx : orig_w - 1;
      const T* src = gpadded.pos(y, xx);
      T* dst = gx.pos(sy, sx);
      for (int c = 0; c < gpadded.c; ++c) dst[c] += src[c];
    }
  }
  return gx;
}

template <typename T>
Tensor<T> crop(const Tensor<T>& x, int h, int w) {
  if (h == x.h && w == x.w) return x;
  Tensor<T> out(h, w, x.c);
  for (int y = 0; y < h; ++y)
    for (int xx = 0; xx < w; ++xx) {
      const T* src = x.pos(y, xx);
      std::copy(src, src + x.c, out.pos(y, xx));
    }
  return out;
}

template <typename T>
Tensor<T> zero_pad_to(const Tensor<T>& g, int h, int w) {
  if (h == g.h && w == g.w) return g;
  Tensor<T> out(h, w, g.c);
  for (int y = 0; y < g.h; ++y)
    for (int xx = 0; xx < g.w; ++xx) {
      const T* src = g.pos(y, xx);
      std::copy(src, src + g.c, out.pos(y, xx));
    }
  return out;
}

}  // namespace snic::nn

#endif  // SNIC_NN_OPS_HPP_

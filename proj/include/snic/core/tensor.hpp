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

#ifndef SNIC_CORE_TENSOR_HPP_
#define SNIC_CORE_TENSOR_HPP_

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace snic {

// Planar feature map, HWC layout: element (y, x, ch) lives at
// ((y * w) + x) * c + ch. The channel vector of one spatial position is
// contiguous, which is what the normalization and entropy-model code index.
template <typename T>
struct Tensor {
  int h = 0, w = 0, c = 0;
  std::vector<T> v;

  Tensor() = default;
  Tensor(int h_, int w_, int c_)
      : h(h_), w(w_), c(c_), v(static_cast<size_t>(h_) * w_ * c_, T(0)) {
    if (h_ < 0 || w_ < 0 || c_ < 0) throw std::invalid_argument("negative tensor dim");
  }

  size_t size() const { return v.size(); }
  bool empty() const { return v.empty(); }
  bool same_shape(const Tensor& o) const { return h == o.h && w == o.w && c == o.c; }
  std::string shape_str() const {
    return std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c);
  }

  T& at(int y, int x, int ch) { return v[(static_cast<size_t>(y) * w + x) * c + ch]; }
  const T& at(int y, int x, int ch) const {
    return v[(static_cast<size_t>(y) * w + x) * c + ch];
  }
  // Channel vector at one spatial position.
  T* pos(int y, int x) { return v.data() + (static_cast<size_t>(y) * w + x) * c; }
  const T* pos(int y, int x) const {
    return v.data() + (static_cast<size_t>(y) * w + x) * c;
  }

  void fill(T x) { std::fill(v.begin(), v.end(), x); }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(h, w, c);
    for (size_t i = 0; i < v.size(); ++i) out.v[i] = static_cast<U>(v[i]);
    return out;
  }
};

template <typename T>
Tensor<T> zeros_like(const Tensor<T>& t) {
  return Tensor<T>(t.h, t.w, t.c);
}

// Channel-range copy helpers used by the slice-conditioned entropy model.
template <typename T>
Tensor<T> slice_channels(const Tensor<T>& t, int c0, int c1) {
  if (c0 < 0 || c1 > t.c || c0 >= c1) throw std::invalid_argument("bad channel slice");
  Tensor<T> out(t.h, t.w, c1 - c0);
  for (int y = 0; y < t.h; ++y)
    for (int x = 0; x < t.w; ++x) {
      const T* src = t.pos(y, x) + c0;
      std::copy(src, src + (c1 - c0), out.pos(y, x));
    }
  return out;
}

template <typename T>
Tensor<T> concat_channels(const std::vector<const Tensor<T>*>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat of nothing");
  int h = parts[0]->h, w = parts[0]->w, c = 0;
  for (const auto* p : parts) {
    if (p->h != h || p->w != w) throw std::invalid_argument("concat shape mismatch");
    c += p->c;
  }
  Tensor<T> out(h, w, c);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      T* dst = out.pos(y, x);
      for (const auto* p : parts) {
        const T* src = p->pos(y, x);
        dst = std::copy(src, src + p->c, dst);
      }
    }
  return out;
}

}  // namespace snic

#endif  // SNIC_CORE_TENSOR_HPP_

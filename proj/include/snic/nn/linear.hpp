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

#ifndef SNIC_NN_LINEAR_HPP_
#define SNIC_NN_LINEAR_HPP_

#include <string>
#include <vector>

#include "snic/nn/conv.hpp"

namespace snic::nn {

// Row-wise affine map: y = x W + b with x viewed as (rows x in_c). Doubles as
// a 1x1 convolution when rows = h*w.
template <typename T>
struct Linear {
  int in_c = 0, out_c = 0;
  std::vector<T> w, b;
  std::vector<T> gw, gb;

  Linear() = default;
  Linear(int in_c_, int out_c_)
      : in_c(in_c_), out_c(out_c_), w(size_t(in_c_) * out_c_, T(0)), b(out_c_, T(0)),
        gw(w.size(), T(0)), gb(out_c_, T(0)) {}

  void init_he(Rng& rng) {
    double std = std::sqrt(2.0 / in_c);
    for (auto& x : w) x = static_cast<T>(rng.normal() * std);
  }
  void init_identity() {
    std::fill(w.begin(), w.end(), T(0));
    for (int i = 0; i < std::min(in_c, out_c); ++i) w[size_t(i) * out_c + i] = T(1);
  }

  void forward_rows(const T* x, int rows, T* y) const {
    CMapRM<T> X(x, rows, in_c);
    CMapRM<T> W(w.data(), in_c, out_c);
    MapRM<T> Y(y, rows, out_c);
    Y.noalias() = X * W;
    for (int r = 0; r < rows; ++r)
      for (int oc = 0; oc < out_c; ++oc) Y(r, oc) += b[oc];
  }

  // Accumulates gw/gb and *adds* x-grads into gx (callers often merge several
  // projection branches into one input gradient).
  void backward_rows(const T* x, const T* gy, int rows, T* gx_accum) {
    CMapRM<T> X(x, rows, in_c);
    CMapRM<T> GY(gy, rows, out_c);
    MapRM<T> GW(gw.data(), in_c, out_c);
    GW.noalias() += X.transpose() * GY;
    CMapRM<T> W(w.data(), in_c, out_c);
    MapRM<T> GX(gx_accum, rows, in_c);
    GX.noalias() += GY * W.transpose();
    for (int r = 0; r < rows; ++r)
      for (int oc = 0; oc < out_c; ++oc) gb[oc] += GY(r, oc);
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    Tensor<T> y(x.h, x.w, out_c);
    forward_rows(x.v.data(), x.h * x.w, y.v.data());
    return y;
  }

  void zero_grad() {
    std::fill(gw.begin(), gw.end(), T(0));
    std::fill(gb.begin(), gb.end(), T(0));
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".w", w, gw, std::vector<int>{in_c, out_c});
    f(prefix + ".b", b, gb, std::vector<int>{out_c});
  }
};

}  // namespace snic::nn

#endif  // SNIC_NN_LINEAR_HPP_

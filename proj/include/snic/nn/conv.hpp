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

#ifndef SNIC_NN_CONV_HPP_
#define SNIC_NN_CONV_HPP_

#define EIGEN_DONT_PARALLELIZE 1  // parallelism lives in the row-block loops
#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "snic/core/rng.hpp"
#include "snic/core/tensor.hpp"

namespace snic::nn {

template <typename T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapRM = Eigen::Map<MatRM<T>>;
template <typename T>
using CMapRM = Eigen::Map<const MatRM<T>>;

// Row blocks sized so one im2col patch buffer stays cache/RAM friendly even
// for 4096x4096 inputs. Fixed block geometry keeps results independent of
// the number of worker threads.
inline int conv_row_block(int out_w, int patch_cols) {
  const size_t target = size_t(4) << 20;  // patch elements per block
  size_t per_row = size_t(out_w) * patch_cols;
  int rows = per_row == 0 ? 1 : static_cast<int>(target / per_row);
  return rows < 1 ? 1 : rows;
}

// 2-D convolution, zero padding, HWC tensors. Weight layout is
// ((ky*k + kx)*in_c + ic) * out_c + oc so that im2col rows multiply straight
// into an (K x out_c) matrix.
template <typename T>
struct Conv2d {
  int in_c = 0, out_c = 0, k = 1, stride = 1, pad = 0;
  std::vector<T> w, b;
  std::vector<T> gw, gb;

  Conv2d() = default;
  Conv2d(int in_c_, int out_c_, int k_, int stride_, int pad_)
      : in_c(in_c_), out_c(out_c_), k(k_), stride(stride_), pad(pad_),
        w(size_t(k_) * k_ * in_c_ * out_c_, T(0)), b(out_c_, T(0)),
        gw(w.size(), T(0)), gb(out_c_, T(0)) {}

  int patch_cols() const { return k * k * in_c; }
  int out_dim(int in) const { return (in + 2 * pad - k) / stride + 1; }

  void init_he(Rng& rng) {
    double std = std::sqrt(2.0 / (double(k) * k * in_c));
    for (auto& x : w) x = static_cast<T>(rng.normal() * std);
    for (auto& x : b) x = T(0);
  }

  // Gathers im2col patches for output rows [y0, y1).
  void im2col(const Tensor<T>& x, int y0, int y1, T* out) const {
    const int ow = out_dim(x.w);
    const int K = patch_cols();
    for (int oy = y0; oy < y1; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        T* dst = out + (size_t(oy - y0) * ow + ox) * K;
        for (int ky = 0; ky < k; ++ky) {
          int iy = oy * stride + ky - pad;
          for (int kx = 0; kx < k; ++kx) {
            int ix = ox * stride + kx - pad;
            if (iy < 0 || iy >= x.h || ix < 0 || ix >= x.w) {
              std::fill(dst, dst + in_c, T(0));
            } else {
              const T* src = x.pos(iy, ix);
              std::copy(src, src + in_c, dst);
            }
            dst += in_c;
          }
        }
      }
    }
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    if (x.c != in_c) throw std::invalid_argument("conv: channel mismatch");
    const int oh = out_dim(x.h), ow = out_dim(x.w);
    if (oh <= 0 || ow <= 0) throw std::invalid_argument("conv: input too small");
    Tensor<T> out(oh, ow, out_c);
    const int K = patch_cols();
    const int block = conv_row_block(ow, K);
    const int nblocks = (oh + block - 1) / block;
    CMapRM<T> W(w.data(), K, out_c);
#pragma omp parallel for schedule(static)
    for (int bi = 0; bi < nblocks; ++bi) {
      const int y0 = bi * block, y1 = std::min(oh, y0 + block);
      std::vector<T> patches(size_t(y1 - y0) * ow * K);
      im2col(x, y0, y1, patches.data());
      CMapRM<T> P(patches.data(), (y1 - y0) * ow, K);
      MapRM<T> O(out.pos(y0, 0), (y1 - y0) * ow, out_c);
      O.noalias() = P * W;
      for (int r = 0; r < (y1 - y0) * ow; ++r)
        for (int oc = 0; oc < out_c; ++oc) O(r, oc) += b[oc];
    }
    return out;
  }

  // Accumulates gw/gb, returns gradient w.r.t. x. Serial over blocks so the
  // accumulation order is fixed.
  Tensor<T> backward(const Tensor<T>& x, const Tensor<T>& gout) {
    const int oh = out_dim(x.h), ow = out_dim(x.w);
    if (gout.h != oh || gout.w != ow || gout.c != out_c)
      throw std::invalid_argument("conv backward: grad shape mismatch");
    const int K = patch_cols();
    Tensor<T> gx(x.h, x.w, x.c);
    CMapRM<T> W(w.data(), K, out_c);
    MapRM<T> GW(gw.data(), K, out_c);
    const int block = conv_row_block(ow, K);
    std::vector<T> patches, gpatches;
    for (int y0 = 0; y0 < oh; y0 += block) {
      const int y1 = std::min(oh, y0 + block);
      const int rows = (y1 - y0) * ow;
      patches.resize(size_t(rows) * K);
      gpatches.resize(size_t(rows) * K);
      im2col(x, y0, y1, patches.data());
      CMapRM<T> P(patches.data(), rows, K);
      CMapRM<T> G(gout.pos(y0, 0), rows, out_c);
      GW.noalias() += P.transpose() * G;
      MapRM<T> GP(gpatches.data(), rows, K);
      GP.noalias() = G * W.transpose();
      col2im_add(gpatches.data(), y0, y1, ow, gx);
      for (int r = 0; r < rows; ++r)
        for (int oc = 0; oc < out_c; ++oc) gb[oc] += G(r, oc);
    }
    return gx;
  }

  void col2im_add(const T* cols, int y0, int y1, int ow, Tensor<T>& gx) const {
    const int K = patch_cols();
    for (int oy = y0; oy < y1; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        const T* src = cols + (size_t(oy - y0) * ow + ox) * K;
        for (int ky = 0; ky < k; ++ky) {
          int iy = oy * stride + ky - pad;
          if (iy < 0 || iy >= gx.h) { continue; }
          for (int kx = 0; kx < k; ++kx) {
            int ix = ox * stride + kx - pad;
            if (ix < 0 || ix >= gx.w) continue;
            T* dst = gx.pos(iy, ix);
            const T* s = src + (ky * k + kx) * in_c;
            for (int ic = 0; ic < in_c; ++ic) dst[ic] += s[ic];
          }
        }
      }
  }

  void zero_grad() {
    std::fill(gw.begin(), gw.end(), T(0));
    std::fill(gb.begin(), gb.end(), T(0));
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".w", w, gw, std::vector<int>{k, k, in_c, out_c});
    f(prefix + ".b", b, gb, std::vector<int>{out_c});
  }
};

// Transposed convolution (stride-s upsampling). Weight layout is
// (ic * k * k + ky*k + kx) * out_c + oc: one GEMM produces, per input
// position, the k*k*out_c contributions that are then scattered.
template <typename T>
struct ConvTranspose2d {
  int in_c = 0, out_c = 0, k = 1, stride = 1, pad = 0, out_pad = 0;
  std::vector<T> w, b;
  std::vector<T> gw, gb;

  ConvTranspose2d() = default;
  ConvTranspose2d(int in_c_, int out_c_, int k_, int stride_, int pad_, int out_pad_)
      : in_c(in_c_), out_c(out_c_), k(k_), stride(stride_), pad(pad_), out_pad(out_pad_),
        w(size_t(in_c_) * k_ * k_ * out_c_, T(0)), b(out_c_, T(0)),
        gw(w.size(), T(0)), gb(out_c_, T(0)) {}

  int out_dim(int in) const { return (in - 1) * stride - 2 * pad + k + out_pad; }
  int cols() const { return k * k * out_c; }

  void init_he(Rng& rng) {
    double std = std::sqrt(2.0 / (double(k) * k * in_c));
    for (auto& x : w) x = static_cast<T>(rng.normal() * std);
    for (auto& x : b) x = T(0);
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    if (x.c != in_c) throw std::invalid_argument("tconv: channel mismatch");
    const int oh = out_dim(x.h), ow = out_dim(x.w);
    Tensor<T> out(oh, ow, out_c);
    for (int oc = 0; oc < out_c; ++oc)
      for (int y = 0; y < oh; ++y)
        for (int xx = 0; xx < ow; ++xx) out.at(y, xx, oc) = b[oc];
    const int KC = cols();
    CMapRM<T> W(w.data(), in_c, KC);
    // Row stripes of the *input*; scattered output rows of different stripes
    // overlap by at most k, handled serially per stripe boundary.
    const int block = conv_row_block(x.w, KC);
    std::vector<T> colbuf;
    for (int y0 = 0; y0 < x.h; y0 += block) {
      const int y1 = std::min(x.h, y0 + block);
      const int rows = (y1 - y0) * x.w;
      colbuf.resize(size_t(rows) * KC);
      CMapRM<T> X(x.pos(y0, 0), rows, in_c);
      MapRM<T> C(colbuf.data(), rows, KC);
      C.noalias() = X * W;
      scatter_add(colbuf.data(), y0, y1, x.w, out);
    }
    return out;
  }

  void scatter_add(const T* colbuf, int y0, int y1, int in_w, Tensor<T>& out) const {
    for (int iy = y0; iy < y1; ++iy)
      for (int ix = 0; ix < in_w; ++ix) {
        const T* src = colbuf + (size_t(iy - y0) * in_w + ix) * cols();
        for (int ky = 0; ky < k; ++ky) {
          int oy = iy * stride + ky - pad;
          if (oy < 0 || oy >= out.h) continue;
          for (int kx = 0; kx < k; ++kx) {
            int ox = ix * stride + kx - pad;
            if (ox < 0 || ox >= out.w) continue;
            T* dst = out.pos(oy, ox);
            const T* s = src + (ky * k + kx) * out_c;
            for (int oc = 0; oc < out_c; ++oc) dst[oc] += s[oc];
          }
        }
      }
  }

  Tensor<T> backward(const Tensor<T>& x, const Tensor<T>& gout) {
    const int oh = out_dim(x.h), ow = out_dim(x.w);
    if (gout.h != oh || gout.w != ow || gout.c != out_c)
      throw std::invalid_argument("tconv backward: grad shape mismatch");
    const int KC = cols();
    Tensor<T> gx(x.h, x.w, x.c);
    CMapRM<T> W(w.data(), in_c, KC);
    MapRM<T> GW(gw.data(), in_c, KC);
    const int block = conv_row_block(x.w, KC);
    std::vector<T> gcols;
    for (int y0 = 0; y0 < x.h; y0 += block) {
      const int y1 = std::min(x.h, y0 + block);
      const int rows = (y1 - y0) * x.w;
      gcols.resize(size_t(rows) * KC);
      gather(gout, y0, y1, x.w, gcols.data());
      CMapRM<T> G(gcols.data(), rows, KC);
      CMapRM<T> X(x.pos(y0, 0), rows, in_c);
      MapRM<T> GX(gx.pos(y0, 0), rows, in_c);
      GX.noalias() = G * W.transpose();
      GW.noalias() += X.transpose() * G;
    }
    for (int y = 0; y < oh; ++y)
      for (int xx = 0; xx < ow; ++xx)
        for (int oc = 0; oc < out_c; ++oc) gb[oc] += gout.at(y, xx, oc);
    return gx;
  }

  // Adjoint of scatter_add: collect gout at every (input pos, kernel tap).
  void gather(const Tensor<T>& gout, int y0, int y1, int in_w, T* colbuf) const {
    const int KC = cols();
    for (int iy = y0; iy < y1; ++iy)
      for (int ix = 0; ix < in_w; ++ix) {
        T* dst = colbuf + (size_t(iy - y0) * in_w + ix) * KC;
        for (int ky = 0; ky < k; ++ky) {
          int oy = iy * stride + ky - pad;
          for (int kx = 0; kx < k; ++kx) {
            int ox = ix * stride + kx - pad;
            T* d = dst + (ky * k + kx) * out_c;
            if (oy < 0 || oy >= gout.h || ox < 0 || ox >= gout.w) {
              std::fill(d, d + out_c, T(0));
            } else {
              const T* s = gout.pos(oy, ox);
              std::copy(s, s + out_c, d);
            }
          }
        }
      }
  }

  void zero_grad() {
    std::fill(gw.begin(), gw.end(), T(0));
    std::fill(gb.begin(), gb.end(), T(0));
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".w", w, gw, std::vector<int>{in_c, k, k, out_c});
    f(prefix + ".b", b, gb, std::vector<int>{out_c});
  }
};

}  // namespace snic::nn

#endif  // SNIC_NN_CONV_HPP_

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

#ifndef SNIC_ATTENTION_WCBAM_HPP_
#define SNIC_ATTENTION_WCBAM_HPP_

#include <vector>

#include "snic/nn/conv.hpp"
#include "snic/nn/linear.hpp"
#include "snic/nn/ops.hpp"

namespace snic::attention {

// Window-based convolutional block attention: channel gates are computed per
// win x win window from avg/max pools through a shared two-layer net, then a
// global spatial gate from channel-pooled maps through a 7x7 conv:
//   X_ca = sigmoid(F(avg_w) + F(max_w)) .* X
//   out  = sigmoid(Conv7([avg_c(X_ca), max_c(X_ca)])) .* X_ca
template <typename T>
struct Wcbam {
  int c = 0, win = 8, reduction = 16;
  nn::Linear<T> fc1, fc2;   // shared MLP F
  nn::Conv2d<T> sa_conv;    // 2 -> 1, k7 s1 p3

  Wcbam() = default;
  Wcbam(int c_, int win_, int reduction_)
      : c(c_), win(win_), reduction(reduction_),
        fc1(c_, hidden(c_, reduction_)), fc2(hidden(c_, reduction_), c_),
        sa_conv(2, 1, 7, 1, 3) {}

  static int hidden(int c, int r) { return std::max(1, c / std::max(1, r)); }

  void init(Rng& rng) {
    fc1.init_he(rng);
    fc2.init_he(rng);
    sa_conv.init_he(rng);
  }

  struct Trace {
    Tensor<T> xp;                       // padded input
    int orig_h = 0, orig_w = 0;
    int wy_n = 0, wx_n = 0;
    std::vector<T> avg, mx;             // per window, length c each
    std::vector<int> argmax;            // per window per channel, position index
    std::vector<T> z1a, z1m;            // fc1 pre-activations, both paths
    std::vector<T> ca;                  // sigmoid gate per window per channel
    Tensor<T> xca_p;                    // gated, padded
    Tensor<T> pool;                     // h x w x 2 channel-pooled maps (cropped)
    std::vector<int> ch_argmax;         // per position, channel of the max
    Tensor<T> sa;                       // h x w x 1 spatial gate
    Tensor<T> xca;                      // cropped gated input
  };

  Tensor<T> forward_cached(const Tensor<T>& x, Trace& tr) const {
    tr.orig_h = x.h;
    tr.orig_w = x.w;
    tr.xp = nn::pad_replicate_to_multiple(x, win);
    const int ph = tr.xp.h, pw = tr.xp.w;
    tr.wy_n = ph / win;
    tr.wx_n = pw / win;
    const int nwin = tr.wy_n * tr.wx_n, npos = win * win;
    const int hid = fc1.out_c;
    tr.avg.assign(size_t(nwin) * c, T(0));
    tr.mx.assign(size_t(nwin) * c, T(0));
    tr.argmax.assign(size_t(nwin) * c, 0);
    for (int wy = 0; wy < tr.wy_n; ++wy)
      for (int wx = 0; wx < tr.wx_n; ++wx) {
        const int wi = wy * tr.wx_n + wx;
        T* avg = tr.avg.data() + size_t(wi) * c;
        T* mx = tr.mx.data() + size_t(wi) * c;
        int* am = tr.argmax.data() + size_t(wi) * c;
        for (int p = 0; p < npos; ++p) {
          int y = wy * win + p / win, xx = wx * win + p % win;
          const T* src = tr.xp.pos(y, xx);
          for (int ch = 0; ch < c; ++ch) {
            avg[ch] += src[ch];
            if (p == 0 || src[ch] > mx[ch]) {
              mx[ch] = src[ch];
              am[ch] = p;
            }
          }
        }
        for (int ch = 0; ch < c; ++ch) avg[ch] /= T(npos);
      }
    // shared MLP on both pooled vectors
    tr.z1a.assign(size_t(nwin) * hid, T(0));
    tr.z1m.assign(size_t(nwin) * hid, T(0));
    std::vector<T> h1a(tr.z1a.size()), h1m(tr.z1m.size());
    std::vector<T> za(size_t(nwin) * c), zm(size_t(nwin) * c);
    fc1.forward_rows(tr.avg.data(), nwin, tr.z1a.data());
    fc1.forward_rows(tr.mx.data(), nwin, tr.z1m.data());
    for (size_t i = 0; i < tr.z1a.size(); ++i) h1a[i] = tr.z1a[i] > T(0) ? tr.z1a[i] : T(0);
    for (size_t i = 0; i < tr.z1m.size(); ++i) h1m[i] = tr.z1m[i] > T(0) ? tr.z1m[i] : T(0);
    fc2.forward_rows(h1a.data(), nwin, za.data());
    fc2.forward_rows(h1m.data(), nwin, zm.data());
    tr.ca.assign(size_t(nwin) * c, T(0));
    for (size_t i = 0; i < tr.ca.size(); ++i)
      tr.ca[i] = nn::sigmoid_scalar(za[i] + zm[i]);
    // apply channel gates
    tr.xca_p = Tensor<T>(ph, pw, c);
    for (int y = 0; y < ph; ++y)
      for (int xx = 0; xx < pw; ++xx) {
        const int wi = (y / win) * tr.wx_n + (xx / win);
        const T* gate = tr.ca.data() + size_t(wi) * c;
        const T* src = tr.xp.pos(y, xx);
        T* dst = tr.xca_p.pos(y, xx);
        for (int ch = 0; ch < c; ++ch) dst[ch] = src[ch] * gate[ch];
      }
    tr.xca = nn::crop(tr.xca_p, x.h, x.w);
    // spatial gate over the whole (unpadded) map
    tr.pool = Tensor<T>(x.h, x.w, 2);
    tr.ch_argmax.assign(size_t(x.h) * x.w, 0);
    for (int y = 0; y < x.h; ++y)
      for (int xx = 0; xx < x.w; ++xx) {
        const T* src = tr.xca.pos(y, xx);
        T sum = T(0), m = src[0];
        int ai = 0;
        for (int ch = 0; ch < c; ++ch) {
          sum += src[ch];
          if (src[ch] > m) {
            m = src[ch];
            ai = ch;
          }
        }
        tr.pool.at(y, xx, 0) = sum / T(c);
        tr.pool.at(y, xx, 1) = m;
        tr.ch_argmax[size_t(y) * x.w + xx] = ai;
      }
    tr.sa = nn::sigmoid(sa_conv.forward(tr.pool));
    Tensor<T> out(x.h, x.w, c);
    for (int y = 0; y < x.h; ++y)
      for (int xx = 0; xx < x.w; ++xx) {
        const T gate = tr.sa.at(y, xx, 0);
        const T* src = tr.xca.pos(y, xx);
        T* dst = out.pos(y, xx);
        for (int ch = 0; ch < c; ++ch) dst[ch] = src[ch] * gate;
      }
    return out;
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    Trace tmp;
    return forward_cached(x, tmp);
  }

  Tensor<T> backward(const Trace& tr, const Tensor<T>& gout) {
    const int h = tr.orig_h, w = tr.orig_w;
    const int nwin = tr.wy_n * tr.wx_n, npos = win * win;
    const int hid = fc1.out_c;
    Tensor<T> gxca(h, w, c);
    Tensor<T> gsa(h, w, 1);
    for (int y = 0; y < h; ++y)
      for (int xx = 0; xx < w; ++xx) {
        const T gate = tr.sa.at(y, xx, 0);
        const T* go = gout.pos(y, xx);
        const T* xca = tr.xca.pos(y, xx);
        T* gx = gxca.pos(y, xx);
        T acc = T(0);
        for (int ch = 0; ch < c; ++ch) {
          gx[ch] = go[ch] * gate;
          acc += go[ch] * xca[ch];
        }
        gsa.at(y, xx, 0) = acc;
      }
    Tensor<T> gsa_logit = nn::sigmoid_backward_from_output(tr.sa, gsa);
    Tensor<T> gpool = sa_conv.backward(tr.pool, gsa_logit);
    for (int y = 0; y < h; ++y)
      for (int xx = 0; xx < w; ++xx) {
        T ga = gpool.at(y, xx, 0) / T(c);
        T gm = gpool.at(y, xx, 1);
        T* gx = gxca.pos(y, xx);
        for (int ch = 0; ch < c; ++ch) gx[ch] += ga;
        gx[tr.ch_argmax[size_t(y) * w + xx]] += gm;
      }
    // back through channel gating on the padded map
    Tensor<T> gxca_p = nn::zero_pad_to(gxca, tr.xp.h, tr.xp.w);
    Tensor<T> gxp(tr.xp.h, tr.xp.w, c);
    std::vector<T> gca(size_t(nwin) * c, T(0));
    for (int y = 0; y < tr.xp.h; ++y)
      for (int xx = 0; xx < tr.xp.w; ++xx) {
        const int wi = (y / win) * tr.wx_n + (xx / win);
        const T* gate = tr.ca.data() + size_t(wi) * c;
        const T* src = tr.xp.pos(y, xx);
        const T* gin = gxca_p.pos(y, xx);
        T* gx = gxp.pos(y, xx);
        T* gc = gca.data() + size_t(wi) * c;
        for (int ch = 0; ch < c; ++ch) {
          gx[ch] = gin[ch] * gate[ch];
          gc[ch] += gin[ch] * src[ch];
        }
      }
    // sigmoid, then the shared MLP for both pooled paths
    std::vector<T> glogit(size_t(nwin) * c);
    for (size_t i = 0; i < glogit.size(); ++i)
      glogit[i] = gca[i] * tr.ca[i] * (T(1) - tr.ca[i]);
    std::vector<T> h1a(size_t(nwin) * hid), h1m(size_t(nwin) * hid);
    for (size_t i = 0; i < h1a.size(); ++i) {
      h1a[i] = tr.z1a[i] > T(0) ? tr.z1a[i] : T(0);
      h1m[i] = tr.z1m[i] > T(0) ? tr.z1m[i] : T(0);
    }
    std::vector<T> gh1a(size_t(nwin) * hid, T(0)), gh1m(size_t(nwin) * hid, T(0));
    fc2.backward_rows(h1a.data(), glogit.data(), nwin, gh1a.data());
    fc2.backward_rows(h1m.data(), glogit.data(), nwin, gh1m.data());
    for (size_t i = 0; i < gh1a.size(); ++i) {
      if (tr.z1a[i] <= T(0)) gh1a[i] = T(0);
      if (tr.z1m[i] <= T(0)) gh1m[i] = T(0);
    }
    std::vector<T> gavg(size_t(nwin) * c, T(0)), gmx(size_t(nwin) * c, T(0));
    fc1.backward_rows(tr.avg.data(), gh1a.data(), nwin, gavg.data());
    fc1.backward_rows(tr.mx.data(), gh1m.data(), nwin, gmx.data());
    // route pooled grads back into the window positions
    for (int wy = 0; wy < tr.wy_n; ++wy)
      for (int wx = 0; wx < tr.wx_n; ++wx) {
        const int wi = wy * tr.wx_n + wx;
        const T* ga = gavg.data() + size_t(wi) * c;
        const T* gm = gmx.data() + size_t(wi) * c;
        const int* am = tr.argmax.data() + size_t(wi) * c;
        for (int p = 0; p < npos; ++p) {
          int y = wy * win + p / win, xx = wx * win + p % win;
          T* gx = gxp.pos(y, xx);
          for (int ch = 0; ch < c; ++ch) gx[ch] += ga[ch] / T(npos);
        }
        for (int ch = 0; ch < c; ++ch) {
          int p = am[ch];
          gxp.at(wy * win + p / win, wx * win + p % win, ch) += gm[ch];
        }
      }
    return nn::pad_replicate_backward(gxp, h, w);
  }

  void zero_grad() {
    fc1.zero_grad();
    fc2.zero_grad();
    sa_conv.zero_grad();
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    fc1.visit(prefix + ".fc1", f);
    fc2.visit(prefix + ".fc2", f);
    sa_conv.visit(prefix + ".sa", f);
  }
};

}  // namespace snic::attention

#endif  // SNIC_ATTENTION_WCBAM_HPP_
